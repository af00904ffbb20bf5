#include "revival/revival.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/mathieu.hpp"
#include "core/resonance.hpp"
#include "core/scaling.hpp"
#include "core/spectrum.hpp"
#include "core/tdse.hpp"

#ifndef REVIVAL_VERSION
#define REVIVAL_VERSION "0.0.0"
#endif

using namespace revival;

struct rv_spectrum {
  spectrum::SpectrumModel model;
};

struct rv_config {
  config::RunConfig cfg;
};

struct rv_series {
  tdse::AutocorrelationSeries series;
};

struct rv_sweep {
  std::vector<analysis::SweepRow> rows;
};

namespace {

thread_local std::string last_error;

rv_status set_error(rv_status status, const char* what) {
  last_error = what ? what : "";
  return status;
}

template <class F>
rv_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return RV_OK;
  } catch (const Error& e) {
    return set_error(static_cast<rv_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RV_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RV_ERR_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* name) {
  if (!p) fail(ErrorCode::kInvalidArgument, std::string(name) + " must not be NULL");
}

rv_status copy_string(const std::string& s, char* buf, size_t capacity, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || capacity < s.size() + 1) {
    return set_error(RV_ERR_INVALID_ARGUMENT, "buffer too small");
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return RV_OK;
}

rv_resonance to_c(const resonance::ResonanceContext& c) {
  rv_resonance r{};
  r.N = c.N;
  r.r = c.r;
  r.level = c.level;
  r.E_r = c.E_r;
  r.E_r1 = c.E_r1;
  r.E_r2 = c.E_r2;
  r.E_N = c.E_N;
  r.V = c.V;
  r.kbar = c.kbar;
  r.lambda = c.lambda;
  r.mu = c.mu;
  r.q = c.q;
  r.tie = c.tie ? 1 : 0;
  return r;
}

resonance::ResonanceContext from_c(const rv_resonance& r) {
  resonance::ResonanceContext c;
  c.N = r.N;
  c.r = r.r;
  c.level = r.level;
  c.E_r = r.E_r;
  c.E_r1 = r.E_r1;
  c.E_r2 = r.E_r2;
  c.E_N = r.E_N;
  c.V = r.V;
  c.kbar = r.kbar;
  c.lambda = r.lambda;
  c.mu = r.mu;
  c.q = r.q;
  c.tie = r.tie != 0;
  return c;
}

rv_status status_from_row(const std::string& status) {
  if (status == "ok") return RV_OK;
  if (status == "error:detection") return RV_ERR_DETECTION;
  if (status == "error:instability") return RV_ERR_INSTABILITY;
  if (status == "error:configuration") return RV_ERR_CONFIG;
  return RV_ERR_NUMERIC;
}

}  // namespace

extern "C" {

const char* rv_version(void) { return REVIVAL_VERSION; }

const char* rv_status_name(rv_status status) {
  switch (status) {
    case RV_OK: return "ok";
    case RV_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RV_ERR_DOMAIN: return "domain";
    case RV_ERR_CONFIG: return "configuration";
    case RV_ERR_NUMERIC: return "numeric";
    case RV_ERR_SINGULAR_ORDER: return "singular_order";
    case RV_ERR_RESONANCE_SINGULARITY: return "resonance_singularity";
    case RV_ERR_BRANCH_AMBIGUITY: return "branch_ambiguity";
    case RV_ERR_NO_RESONANCE: return "no_resonance";
    case RV_ERR_DEGENERATE_SPECTRUM: return "degenerate_spectrum";
    case RV_ERR_INSTABILITY: return "instability";
    case RV_ERR_FIT: return "fit";
    case RV_ERR_DETECTION: return "detection";
    case RV_ERR_IO: return "io";
    case RV_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rv_last_error(void) { return last_error.c_str(); }

rv_status rv_derive_units(double mass, double gravity, double drive_frequency, double hbar, rv_units* out) {
  return guarded([&] {
    need(out, "out");
    const auto u = scaling::derive_units(mass, gravity, drive_frequency, hbar);
    *out = {u.length_scale, u.time_scale, u.energy_scale, u.kbar};
  });
}

rv_status rv_spectrum_create(rv_spectrum_kind kind, double kbar, double V0, double kappa, rv_spectrum** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    switch (kind) {
      case RV_SPECTRUM_TRIANGULAR: *out = new rv_spectrum{spectrum::SpectrumModel::triangular_well(kbar)}; break;
      case RV_SPECTRUM_NUMERIC:
        *out = new rv_spectrum{spectrum::SpectrumModel::numeric_action(kbar, V0, kappa)};
        break;
      default: fail(ErrorCode::kInvalidArgument, "unknown spectrum kind");
    }
  });
}

void rv_spectrum_destroy(rv_spectrum* spectrum) { delete spectrum; }

rv_status rv_spectrum_energy(const rv_spectrum* s, double n, double* energy) {
  return guarded([&] {
    need(s, "spectrum");
    need(energy, "energy");
    *energy = s->model.energy(n);
  });
}

rv_status rv_spectrum_level(const rv_spectrum* s, double energy, double* n) {
  return guarded([&] {
    need(s, "spectrum");
    need(n, "n");
    *n = s->model.level_from_energy(energy);
  });
}

rv_status rv_spectrum_derivatives(const rv_spectrum* s, double n, double* first, double* second) {
  return guarded([&] {
    need(s, "spectrum");
    const auto d = s->model.derivatives(n);
    if (first) *first = d.first;
    if (second) *second = d.second;
  });
}

rv_status rv_spectrum_period(const rv_spectrum* s, double energy, double* period) {
  return guarded([&] {
    need(s, "spectrum");
    need(period, "period");
    *period = s->model.period(energy);
  });
}

rv_status rv_mathieu_series(double nu, double q, double* a) {
  return guarded([&] {
    need(a, "a");
    *a = mathieu::char_value_series(nu, q);
  });
}

rv_status rv_mathieu_matrix(double nu, double q, int truncation, double* a, int* truncation_used) {
  return guarded([&] {
    need(a, "a");
    const auto r = truncation > 0 ? mathieu::char_value_matrix(nu, q, truncation) : mathieu::char_value_matrix(nu, q);
    *a = r.a;
    if (truncation_used) *truncation_used = r.truncation;
  });
}

rv_status rv_resonance_build(const rv_spectrum* s, double E_r, double lambda, rv_resonance* out) {
  return guarded([&] {
    need(s, "spectrum");
    need(out, "out");
    *out = to_c(resonance::build_context(s->model, E_r, lambda));
  });
}

rv_status rv_quasi_energy(const rv_resonance* ctx, int k, int use_matrix, double* out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(out, "out");
    *out = resonance::quasi_energy(from_c(*ctx), k, use_matrix ? mathieu::Method::kMatrix : mathieu::Method::kSeries);
  });
}

rv_status rv_classical_period(const rv_resonance* ctx, double* out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(out, "out");
    *out = resonance::classical_period(from_c(*ctx));
  });
}

rv_status rv_revival_time(const rv_resonance* ctx, rv_formula formula, double lambda, rv_prediction* out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(out, "out");
    resonance::RevivalPrediction p;
    switch (formula) {
      case RV_FORMULA_GENERAL: p = resonance::revival_time_general(from_c(*ctx), lambda); break;
      case RV_FORMULA_BOUNCER: p = resonance::revival_time_bouncer(ctx->E_r, ctx->E_N, lambda, ctx->kbar); break;
      case RV_FORMULA_BOUNCER_SIMPLE:
        p = resonance::revival_time_bouncer_simple(ctx->E_r, ctx->E_N, lambda, ctx->kbar);
        break;
      default: fail(ErrorCode::kInvalidArgument, "unknown formula");
    }
    *out = {p.T0, p.T_lambda, p.ratio, formula};
  });
}

rv_status rv_config_parse(const char* text, rv_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new rv_config{config::parse_config(text)};
  });
}

rv_status rv_config_parse_file(const char* path, rv_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new rv_config{config::parse_config_file(path)};
  });
}

void rv_config_destroy(rv_config* c) { delete c; }

rv_status rv_config_set(rv_config* c, const char* key, const char* value) {
  return guarded([&] {
    need(c, "config");
    need(key, "key");
    need(value, "value");
    config::apply_override(c->cfg, key, value);
  });
}

rv_status rv_config_echo(const rv_config* c, char* buf, size_t capacity, size_t* needed) {
  std::string text;
  const rv_status st = guarded([&] {
    need(c, "config");
    text = config::echo(c->cfg);
  });
  if (st != RV_OK) return st;
  return copy_string(text, buf, capacity, needed);
}

rv_status rv_config_get_number(const rv_config* c, const char* key, double* value) {
  return guarded([&] {
    need(c, "config");
    need(key, "key");
    need(value, "value");
    const auto& k = std::string_view(key);
    const auto& cfg = c->cfg;
    if (k == "kbar") *value = cfg.kbar;
    else if (k == "V0") *value = cfg.V0;
    else if (k == "kappa") *value = cfg.kappa;
    else if (k == "E_r") *value = cfg.E_r;
    else if (k == "sigma") *value = cfg.sigma;
    else if (k == "p0") *value = cfg.p0;
    else if (k == "x_min") *value = cfg.x_min;
    else if (k == "x_max") *value = cfg.x_max;
    else if (k == "n_points") *value = static_cast<double>(cfg.n_points);
    else if (k == "dt") *value = cfg.dt;
    else if (k == "dt_divisions") *value = cfg.dt_divisions;
    else if (k == "sample_interval") *value = cfg.sample_interval;
    else if (k == "sample_divisions") *value = cfg.sample_divisions;
    else if (k == "t_end") *value = cfg.t_end;
    else if (k == "t_end_factor") *value = cfg.t_end_factor;
    else if (k == "smoothing_width") *value = cfg.smoothing_width;
    else if (k == "mass") *value = cfg.mass;
    else if (k == "gravity") *value = cfg.gravity;
    else if (k == "drive_frequency_hz") *value = cfg.drive_frequency_hz;
    else if (k == "hbar") *value = cfg.hbar;
    else if (k == "seed") *value = static_cast<double>(cfg.seed);
    else if (k == "spectrum_levels") *value = static_cast<double>(cfg.spectrum_levels);
    else fail(ErrorCode::kInvalidArgument, "no numeric key '" + std::string(k) + "'");
  });
}

rv_status rv_config_get_string(const rv_config* c, const char* key, char* buf, size_t capacity, size_t* needed) {
  std::string value;
  const rv_status st = guarded([&] {
    need(c, "config");
    need(key, "key");
    const auto k = std::string_view(key);
    if (k == "spectrum") value = c->cfg.spectrum;
    else if (k == "output_dir") value = c->cfg.output_dir;
    else fail(ErrorCode::kInvalidArgument, "no string key '" + std::string(k) + "'");
  });
  if (st != RV_OK) return st;
  return copy_string(value, buf, capacity, needed);
}

size_t rv_config_lambda_count(const rv_config* c) { return c ? c->cfg.lambdas.size() : 0; }

rv_status rv_config_lambdas(const rv_config* c, double* out, size_t capacity) {
  return guarded([&] {
    need(c, "config");
    if (capacity < c->cfg.lambdas.size()) fail(ErrorCode::kInvalidArgument, "lambda buffer too small");
    if (!c->cfg.lambdas.empty()) need(out, "out");
    std::copy(c->cfg.lambdas.begin(), c->cfg.lambdas.end(), out);
  });
}

rv_status rv_config_spectrum(const rv_config* c, rv_spectrum** out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    *out = new rv_spectrum{config::make_model(c->cfg)};
  });
}

rv_status rv_config_units(const rv_config* c, rv_units* out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    const auto u = config::make_units(c->cfg);
    *out = {u.length_scale, u.time_scale, u.energy_scale, u.kbar};
  });
}

rv_status rv_run_plan(const rv_config* c, double lambda, rv_run_info* out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    const auto run = analysis::prepare_run(config::make_model(c->cfg), c->cfg.E_r, lambda, config::make_sim_config(c->cfg));
    *out = {run.x0, run.sigma, run.T_cl, run.T_guess, run.dt, run.sample_interval, run.t_end,
            static_cast<int>(run.psi0.grid.n_points)};
  });
}

rv_status rv_simulate(const rv_config* c, double lambda, const char* resume_from, const char* checkpoint_to,
                      rv_progress_fn progress, void* user, rv_series** out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    *out = nullptr;
    const auto run = analysis::prepare_run(config::make_model(c->cfg), c->cfg.E_r, lambda, config::make_sim_config(c->cfg));
    tdse::WavePacket start = run.psi0;
    if (resume_from) {
      start = tdse::load_checkpoint(resume_from);
      require(start.grid == run.psi0.grid, ErrorCode::kConfiguration, "checkpoint grid differs from the configuration");
      require(start.time < run.t_end, ErrorCode::kConfiguration, "checkpoint time is past t_end");
    }
    tdse::EvolveOptions opts;
    if (progress) opts.progress = [progress, user](double t) { progress(t, user); };
    tdse::WavePacket final_state;
    auto series = tdse::evolve_and_record(run.psi0, start, run.t_end, run.dt, run.sample_interval, run.drive, opts,
                                          &final_state);
    if (checkpoint_to) tdse::save_checkpoint(checkpoint_to, final_state);
    const bool complete = series.complete;
    const std::string failure = series.failure;
    *out = new rv_series{std::move(series)};
    if (!complete) fail(ErrorCode::kInstability, failure);
  });
}

void rv_series_destroy(rv_series* s) { delete s; }

size_t rv_series_size(const rv_series* s) { return s ? s->series.times.size() : 0; }

rv_status rv_series_sample(const rv_series* s, size_t index, double* t, double* re, double* im) {
  return guarded([&] {
    need(s, "series");
    if (index >= s->series.times.size()) fail(ErrorCode::kInvalidArgument, "sample index out of range");
    if (t) *t = s->series.times[index];
    if (re) *re = s->series.values[index].real();
    if (im) *im = s->series.values[index].imag();
  });
}

int rv_series_complete(const rv_series* s) { return s && s->series.complete ? 1 : 0; }

double rv_series_max_norm_drift(const rv_series* s) { return s ? s->series.max_norm_drift : NAN; }

double rv_series_sample_interval(const rv_series* s) { return s ? s->series.sample_interval : NAN; }

double rv_series_time_step(const rv_series* s) { return s ? s->series.dt : NAN; }

rv_status rv_series_write_csv(const rv_series* s, const char* path) {
  return guarded([&] {
    need(s, "series");
    need(path, "path");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, std::string("cannot write '") + path + "'");
    analysis::write_series_csv(out, s->series);
    if (!out) fail(ErrorCode::kIo, std::string("write failed for '") + path + "'");
  });
}

rv_status rv_extract_revival(const rv_series* s, double T_guess, double smoothing_width, rv_revival_estimate* out) {
  return guarded([&] {
    need(s, "series");
    need(out, "out");
    analysis::ExtractOptions opts;
    opts.smoothing_width = smoothing_width;
    const auto e = analysis::extract_revival(s->series, T_guess, opts);
    *out = {e.T_rev, e.peak_value, e.t_lo, e.t_hi, e.smoothing_width};
  });
}

rv_status rv_extract_classical_period(const rv_series* s, double* period) {
  return guarded([&] {
    need(s, "series");
    need(period, "period");
    *period = analysis::extract_classical_period(s->series);
  });
}

rv_status rv_sweep_run(const rv_config* c, int workers, rv_progress_fn progress, void* user, rv_sweep** out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    *out = nullptr;
    analysis::SweepOptions opts;
    opts.workers = workers;
    opts.extract.smoothing_width = c->cfg.smoothing_width;
    if (progress) opts.on_row = [progress, user](const analysis::SweepRow& r) { progress(r.lambda, user); };
    auto rows = analysis::sweep(config::make_model(c->cfg), c->cfg.E_r, c->cfg.lambdas,
                                config::make_sim_config(c->cfg), opts);
    *out = new rv_sweep{std::move(rows)};
  });
}

rv_status rv_sweep_read_csv(const char* path, rv_sweep** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, std::string("cannot open '") + path + "'");
    *out = new rv_sweep{analysis::read_sweep_csv(in)};
  });
}

void rv_sweep_destroy(rv_sweep* s) { delete s; }

size_t rv_sweep_size(const rv_sweep* s) { return s ? s->rows.size() : 0; }

rv_status rv_sweep_row_get(const rv_sweep* s, size_t index, rv_sweep_row* out) {
  return guarded([&] {
    need(s, "sweep");
    need(out, "out");
    if (index >= s->rows.size()) fail(ErrorCode::kInvalidArgument, "row index out of range");
    const auto& r = s->rows[index];
    *out = {r.lambda,
            r.T_numeric,
            r.T_analytic_general,
            r.T_analytic_simple,
            r.ratio_numeric,
            r.ratio_analytic_general,
            r.ratio_analytic_simple,
            status_from_row(r.status),
            r.max_norm_drift};
  });
}

const char* rv_sweep_row_message(const rv_sweep* s, size_t index) {
  if (!s || index >= s->rows.size()) return "";
  return s->rows[index].message.c_str();
}

rv_status rv_sweep_write_csv(const rv_sweep* s, const char* path) {
  return guarded([&] {
    need(s, "sweep");
    need(path, "path");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, std::string("cannot write '") + path + "'");
    analysis::write_sweep_csv(out, s->rows);
    if (!out) fail(ErrorCode::kIo, std::string("write failed for '") + path + "'");
  });
}

rv_status rv_sweep_fit(const rv_sweep* s, rv_fit* out) {
  return guarded([&] {
    need(s, "sweep");
    need(out, "out");
    const auto f = analysis::quadratic_fit(s->rows);
    *out = {f.coefficient, f.intercept, f.r_squared, f.rows_used};
  });
}

rv_status rv_checkpoint_inspect(const char* path, rv_checkpoint_info* out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const auto psi = tdse::load_checkpoint(path);
    *out = {static_cast<int>(psi.grid.n_points), psi.grid.x_min, psi.grid.x_max, psi.time, psi.norm()};
  });
}

}  // extern "C"
