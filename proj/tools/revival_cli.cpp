// revival: command-line front end over the C interface.
//
//   revival units    [--config F]
//   revival spectrum [--config F] [--er E]
//   revival predict  [--config F] [--er E] [--lambda L] [--out DIR]
//   revival simulate [--config F] [--er E] [--lambda L] [--out DIR] [--checkpoint F] [--resume F]
//   revival sweep    [--config F] [--er E] [--lambda L] [--out DIR] [--workers N]
//   revival compare  [--out DIR] [--predict F] [--sweep F]
//
// Exit codes: 0 success, 1 configuration error, 2 numeric error, 3 detection error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "revival/revival.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitDetection = 3;

int exit_code(rv_status s) {
  switch (s) {
    case RV_OK: return 0;
    case RV_ERR_INVALID_ARGUMENT:
    case RV_ERR_DOMAIN:
    case RV_ERR_CONFIG:
    case RV_ERR_IO: return kExitConfig;
    case RV_ERR_DETECTION: return kExitDetection;
    default: return kExitNumeric;
  }
}

struct Failure {
  rv_status status;
  std::string message;
};

void check(rv_status s) {
  if (s != RV_OK) throw Failure{s, rv_last_error()};
}

struct ConfigDeleter {
  void operator()(rv_config* c) const { rv_config_destroy(c); }
};
struct SpectrumDeleter {
  void operator()(rv_spectrum* s) const { rv_spectrum_destroy(s); }
};
struct SeriesDeleter {
  void operator()(rv_series* s) const { rv_series_destroy(s); }
};
struct SweepDeleter {
  void operator()(rv_sweep* s) const { rv_sweep_destroy(s); }
};
using ConfigPtr = std::unique_ptr<rv_config, ConfigDeleter>;
using SpectrumPtr = std::unique_ptr<rv_spectrum, SpectrumDeleter>;
using SeriesPtr = std::unique_ptr<rv_series, SeriesDeleter>;
using SweepPtr = std::unique_ptr<rv_sweep, SweepDeleter>;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::string> lambda;
  std::optional<double> er;
  int workers = 1;
  std::string checkpoint;
  std::string resume;
  std::string predict_csv;
  std::string sweep_csv;
  bool no_extract = false;
};

std::string fmt(double v, int precision = 12) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

ConfigPtr load_config(const Options& o) {
  rv_config* raw = nullptr;
  if (o.config_path.empty()) {
    check(rv_config_parse("", &raw));
  } else {
    check(rv_config_parse_file(o.config_path.c_str(), &raw));
  }
  ConfigPtr cfg(raw);
  if (o.lambda) check(rv_config_set(cfg.get(), "lambda", o.lambda->c_str()));
  if (o.er) check(rv_config_set(cfg.get(), "E_r", fmt(*o.er, 17).c_str()));
  if (!o.out_dir.empty()) check(rv_config_set(cfg.get(), "output_dir", o.out_dir.c_str()));
  return cfg;
}

double number(const rv_config* cfg, const char* key) {
  double v = 0.0;
  check(rv_config_get_number(cfg, key, &v));
  return v;
}

std::string text(const rv_config* cfg, const char* key) {
  size_t needed = 0;
  rv_config_get_string(cfg, key, nullptr, 0, &needed);
  std::string s(needed, '\0');
  check(rv_config_get_string(cfg, key, s.data(), s.size(), &needed));
  s.resize(needed - 1);
  return s;
}

std::string echo(const rv_config* cfg) {
  size_t needed = 0;
  rv_config_echo(cfg, nullptr, 0, &needed);
  std::string s(needed, '\0');
  check(rv_config_echo(cfg, s.data(), s.size(), &needed));
  s.resize(needed - 1);
  return s;
}

std::vector<double> lambdas(const rv_config* cfg) {
  std::vector<double> out(rv_config_lambda_count(cfg));
  check(rv_config_lambdas(cfg, out.data(), out.size()));
  return out;
}

fs::path output_dir(const rv_config* cfg) {
  const fs::path dir = text(cfg, "output_dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{RV_ERR_IO, "cannot create output directory '" + dir.string() + "': " + ec.message()};
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Failure{RV_ERR_IO, "cannot write '" + path.string() + "'"};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Run metadata lives next to the data files so that the data stay byte-identical.
class Sidecar {
 public:
  explicit Sidecar(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}
  void set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void write(const fs::path& dir) const {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ostringstream s;
    s << "command = " << command_ << '\n'
      << "library_version = " << rv_version() << '\n'
      << "finished_utc = " << utc_now() << '\n'
      << "duration_s = " << fmt(seconds, 6) << '\n';
    for (const auto& [k, v] : entries_) s << k << " = " << v << '\n';
    write_file(dir / (command_ + ".meta"), s.str());
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

int cmd_units(const Options& o) {
  auto cfg = load_config(o);
  rv_units u{};
  check(rv_config_units(cfg.get(), &u));
  const double E_r = number(cfg.get(), "E_r");
  std::cout << "mass = " << fmt(number(cfg.get(), "mass")) << '\n'
            << "gravity = " << fmt(number(cfg.get(), "gravity")) << '\n'
            << "drive_frequency_hz = " << fmt(number(cfg.get(), "drive_frequency_hz")) << '\n'
            << "length_scale_m = " << fmt(u.length_scale) << '\n'
            << "time_scale_s = " << fmt(u.time_scale) << '\n'
            << "energy_scale_J = " << fmt(u.energy_scale) << '\n'
            << "kbar = " << fmt(u.kbar) << '\n'
            << "E_r = " << fmt(E_r) << '\n'
            << "E_r_height_m = " << fmt(E_r * u.length_scale) << '\n';
  return 0;
}

int cmd_spectrum(const Options& o) {
  auto cfg = load_config(o);
  rv_spectrum* raw = nullptr;
  check(rv_config_spectrum(cfg.get(), &raw));
  SpectrumPtr spec(raw);
  const double E_r = number(cfg.get(), "E_r");
  const auto half = static_cast<long>(number(cfg.get(), "spectrum_levels"));
  double level = 0.0;
  check(rv_spectrum_level(spec.get(), E_r, &level));
  const long r = std::lround(level);
  std::cout << "# E_r = " << fmt(E_r) << ", level = " << fmt(level, 10) << '\n';
  std::cout << "n,E_n,dE_dn,d2E_dn2\n";
  for (long n = std::max(1L, r - half); n <= r + half; ++n) {
    double E = 0.0, d1 = 0.0, d2 = 0.0;
    check(rv_spectrum_energy(spec.get(), static_cast<double>(n), &E));
    check(rv_spectrum_derivatives(spec.get(), static_cast<double>(n), &d1, &d2));
    std::cout << n << ',' << fmt(E) << ',' << fmt(d1) << ',' << fmt(d2) << '\n';
  }
  return 0;
}

constexpr const char* kPredictHeader =
    "lambda,N,E_N,mu,q,T0,T_general,ratio_general,T_bouncer,ratio_bouncer,T_simple,ratio_simple";

int cmd_predict(const Options& o) {
  Sidecar meta("predict");
  auto cfg = load_config(o);
  rv_spectrum* raw = nullptr;
  check(rv_config_spectrum(cfg.get(), &raw));
  SpectrumPtr spec(raw);
  const double E_r = number(cfg.get(), "E_r");
  const auto ls = lambdas(cfg.get());
  if (ls.empty()) throw Failure{RV_ERR_CONFIG, "predict: lambda list is empty"};

  std::ostringstream csv;
  csv << kPredictHeader << '\n';
  std::cout << std::left << std::setw(8) << "lambda" << std::setw(12) << "general" << std::setw(12) << "bouncer"
            << std::setw(12) << "simple" << '\n';
  rv_status first_error = RV_OK;
  for (double l : ls) {
    rv_resonance ctx{};
    check(rv_resonance_build(spec.get(), E_r, l, &ctx));
    rv_prediction p[3]{};
    const rv_formula formulas[3] = {RV_FORMULA_GENERAL, RV_FORMULA_BOUNCER, RV_FORMULA_BOUNCER_SIMPLE};
    std::string cells[3];
    for (int i = 0; i < 3; ++i) {
      const rv_status s = rv_revival_time(&ctx, formulas[i], l, &p[i]);
      if (s != RV_OK) {
        std::cerr << "predict: lambda=" << l << ": " << rv_last_error() << '\n';
        if (first_error == RV_OK) first_error = s;
        p[i].T0 = p[i].T_lambda = p[i].ratio = NAN;
      }
    }
    csv << fmt(l) << ',' << ctx.N << ',' << fmt(ctx.E_N) << ',' << fmt(ctx.mu) << ',' << fmt(ctx.q) << ','
        << fmt(p[0].T0) << ',' << fmt(p[0].T_lambda) << ',' << fmt(p[0].ratio) << ',' << fmt(p[1].T_lambda) << ','
        << fmt(p[1].ratio) << ',' << fmt(p[2].T_lambda) << ',' << fmt(p[2].ratio) << '\n';
    std::cout << std::setw(8) << fmt(l, 6) << std::setw(12) << fmt(p[0].ratio, 6) << std::setw(12)
              << fmt(p[1].ratio, 6) << std::setw(12) << fmt(p[2].ratio, 6) << '\n';
  }
  const auto dir = output_dir(cfg.get());
  write_file(dir / "predict.csv", csv.str());
  write_file(dir / "config.resolved", echo(cfg.get()));
  meta.set("formulas", "general,bouncer,bouncer_simple");
  meta.set("spectrum", text(cfg.get(), "spectrum"));
  meta.write(dir);
  if (first_error != RV_OK) throw Failure{first_error, "predict: some predictions failed"};
  return 0;
}

void report_progress(double t, void* user) {
  auto* state = static_cast<std::pair<double, double>*>(user);
  if (t >= state->second) {
    std::cerr << "  t = " << fmt(t, 8) << " / " << fmt(state->first, 8) << '\n';
    state->second += 0.1 * state->first;
  }
}

int cmd_simulate(const Options& o) {
  Sidecar meta("simulate");
  auto cfg = load_config(o);
  const auto ls = lambdas(cfg.get());
  if (ls.size() != 1) throw Failure{RV_ERR_CONFIG, "simulate: give exactly one lambda (use --lambda)"};
  const double lambda = ls.front();
  const auto dir = output_dir(cfg.get());
  write_file(dir / "config.resolved", echo(cfg.get()));

  rv_run_info plan{};
  check(rv_run_plan(cfg.get(), lambda, &plan));
  std::cerr << "simulate: lambda=" << lambda << " x0=" << fmt(plan.x0, 8) << " sigma=" << fmt(plan.sigma, 6)
            << " dt=" << fmt(plan.dt, 6) << " t_end=" << fmt(plan.t_end, 8) << '\n';

  std::pair<double, double> progress{plan.t_end, 0.0};
  rv_series* raw = nullptr;
  const rv_status st = rv_simulate(cfg.get(), lambda, o.resume.empty() ? nullptr : o.resume.c_str(),
                                   o.checkpoint.empty() ? nullptr : o.checkpoint.c_str(), report_progress, &progress,
                                   &raw);
  const std::string sim_error = st == RV_OK ? "" : rv_last_error();
  SeriesPtr series(raw);
  if (series) check(rv_series_write_csv(series.get(), (dir / "series.csv").string().c_str()));

  meta.set("lambda", fmt(lambda, 17));
  meta.set("integrator", "strang_split_fftw");
  meta.set("dt_used", series ? fmt(rv_series_time_step(series.get()), 17) : "nan");
  meta.set("sample_interval", fmt(plan.sample_interval, 17));
  meta.set("T_guess", fmt(plan.T_guess, 17));
  meta.set("max_norm_drift", series ? fmt(rv_series_max_norm_drift(series.get()), 6) : "nan");
  meta.set("resumed_from", o.resume.empty() ? "none" : o.resume);
  if (st != RV_OK) {
    meta.write(dir);
    throw Failure{st, sim_error};
  }

  if (!o.no_extract) {
    meta.set("envelope", "triangle_mean_abs_A4");
    rv_revival_estimate est{};
    const double smoothing = number(cfg.get(), "smoothing_width");
    const rv_status es = rv_extract_revival(series.get(), plan.T_guess, smoothing > 0.0 ? smoothing : plan.T_cl, &est);
    if (es != RV_OK) {
      const std::string why = rv_last_error();
      meta.set("T_rev", "nan");
      meta.write(dir);
      throw Failure{es, why};
    }
    meta.set("T_rev", fmt(est.T_rev, 17));
    std::cout << "T_guess = " << fmt(plan.T_guess) << '\n'
              << "T_rev = " << fmt(est.T_rev) << '\n'
              << "ratio = " << fmt(est.T_rev / plan.T_guess) << '\n';
  }
  meta.write(dir);
  return 0;
}

int cmd_sweep(const Options& o) {
  Sidecar meta("sweep");
  auto cfg = load_config(o);
  if (rv_config_lambda_count(cfg.get()) == 0) throw Failure{RV_ERR_CONFIG, "sweep: lambda list is empty"};
  const auto dir = output_dir(cfg.get());
  write_file(dir / "config.resolved", echo(cfg.get()));

  rv_sweep* raw = nullptr;
  auto on_row = [](double lambda, void*) { std::cerr << "  finished lambda = " << lambda << '\n'; };
  check(rv_sweep_run(cfg.get(), o.workers, on_row, nullptr, &raw));
  SweepPtr sweep(raw);
  check(rv_sweep_write_csv(sweep.get(), (dir / "sweep.csv").string().c_str()));

  rv_status worst = RV_OK;
  std::cout << std::left << std::setw(8) << "lambda" << std::setw(14) << "T_numeric" << std::setw(12) << "ratio_num"
            << std::setw(12) << "ratio_gen" << std::setw(12) << "ratio_simple" << "status\n";
  for (size_t i = 0; i < rv_sweep_size(sweep.get()); ++i) {
    rv_sweep_row r{};
    check(rv_sweep_row_get(sweep.get(), i, &r));
    std::cout << std::setw(8) << fmt(r.lambda, 6) << std::setw(14) << fmt(r.T_numeric, 8) << std::setw(12)
              << fmt(r.ratio_numeric, 6) << std::setw(12) << fmt(r.ratio_analytic_general, 6) << std::setw(12)
              << fmt(r.ratio_analytic_simple, 6) << rv_status_name(r.status) << '\n';
    if (r.status != RV_OK) {
      std::cerr << "  lambda = " << r.lambda << ": " << rv_sweep_row_message(sweep.get(), i) << '\n';
      if (worst == RV_OK) worst = r.status;
    }
  }
  rv_fit fit{};
  if (rv_sweep_fit(sweep.get(), &fit) == RV_OK) {
    std::cout << "fit: 1 - ratio = " << fmt(fit.intercept, 6) << " + " << fmt(fit.coefficient, 6)
              << " lambda^2, r^2 = " << fmt(fit.r_squared, 6) << '\n';
    meta.set("fit_coefficient", fmt(fit.coefficient, 17));
    meta.set("fit_r_squared", fmt(fit.r_squared, 17));
  } else {
    std::cout << "fit: " << rv_last_error() << '\n';
  }
  meta.set("workers", std::to_string(o.workers));
  meta.set("integrator", "strang_split_fftw");
  meta.set("envelope", "triangle_mean_abs_A4");
  meta.set("spectrum", text(cfg.get(), "spectrum"));
  meta.write(dir);
  if (worst != RV_OK) throw Failure{worst, "sweep: some rows failed (recorded in sweep.csv)"};
  return 0;
}

// Minimal reader for the two-dimensional numeric tables written above.
std::vector<std::map<std::string, std::string>> read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Failure{RV_ERR_IO, "cannot open '" + path.string() + "'"};
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw Failure{RV_ERR_IO, "'" + path.string() + "' is empty"};
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw Failure{RV_ERR_IO, "ragged row in '" + path.string() + "'"};
    std::map<std::string, std::string> row;
    for (size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

double cell(const std::map<std::string, std::string>& row, const std::string& key) {
  const auto it = row.find(key);
  if (it == row.end()) throw Failure{RV_ERR_IO, "missing column '" + key + "'"};
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    return NAN;
  }
}

int cmd_compare(const Options& o) {
  Sidecar meta("compare");
  const fs::path dir = o.out_dir.empty() ? fs::path("out") : fs::path(o.out_dir);
  const fs::path predict_path = o.predict_csv.empty() ? dir / "predict.csv" : fs::path(o.predict_csv);
  const fs::path sweep_path = o.sweep_csv.empty() ? dir / "sweep.csv" : fs::path(o.sweep_csv);
  const auto predict = read_table(predict_path);
  const auto sweep = read_table(sweep_path);
  std::error_code ec;
  fs::create_directories(dir, ec);

  std::map<double, std::map<std::string, double>> merged;
  for (const auto& r : predict) {
    auto& m = merged[cell(r, "lambda")];
    m["general"] = cell(r, "ratio_general");
    m["bouncer"] = cell(r, "ratio_bouncer");
    m["simple"] = cell(r, "ratio_simple");
  }
  for (const auto& r : sweep) {
    auto& m = merged[cell(r, "lambda")];
    m["numeric"] = r.at("status") == "ok" ? cell(r, "ratio_numeric") : NAN;
  }

  const char* curves[] = {"numeric", "general", "bouncer", "simple"};
  std::ostringstream table;
  table << "lambda,ratio_numeric,ratio_general,ratio_bouncer,ratio_simple\n";
  for (const auto& [l, m] : merged) {
    table << fmt(l);
    for (const char* c : curves) {
      const auto it = m.find(c);
      table << ',' << (it == m.end() ? std::string("nan") : fmt(it->second));
    }
    table << '\n';
  }
  write_file(dir / "compare.csv", table.str());
  std::cout << table.str();

  for (const char* c : curves) {
    std::ostringstream dat;
    dat << "# lambda ratio (" << c << ")\n";
    for (const auto& [l, m] : merged) {
      const auto it = m.find(c);
      if (it != m.end() && std::isfinite(it->second)) dat << fmt(l) << ' ' << fmt(it->second) << '\n';
    }
    write_file(dir / (std::string("curve_") + c + ".dat"), dat.str());
  }
  meta.set("predict_csv", predict_path.string());
  meta.set("sweep_csv", sweep_path.string());
  meta.write(dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave-packet revivals in a periodically driven gravitational cavity"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_lambda) {
    sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory (overrides output_dir)");
    sub->add_option("--er", o.er, "initial energy E_r (overrides the configuration)");
    if (with_lambda) sub->add_option("--lambda", o.lambda, "comma-separated lambda list (overrides the configuration)");
  };

  auto* units = app.add_subcommand("units", "laboratory to dimensionless units");
  add_common(units, false);
  auto* spectrum = app.add_subcommand("spectrum", "levels, dE/dn and d2E/dn2 around E_r");
  add_common(spectrum, false);
  auto* predict = app.add_subcommand("predict", "analytic revival times for each lambda");
  add_common(predict, true);
  auto* simulate = app.add_subcommand("simulate", "one driven evolution; writes series.csv");
  add_common(simulate, true);
  simulate->add_option("--checkpoint", o.checkpoint, "write the final state to this file");
  simulate->add_option("--resume", o.resume, "continue from a checkpoint")->check(CLI::ExistingFile);
  simulate->add_flag("--no-extract", o.no_extract, "skip revival extraction");
  auto* sweep = app.add_subcommand("sweep", "lambda sweep with numeric extraction; writes sweep.csv");
  add_common(sweep, true);
  sweep->add_option("--workers", o.workers, "parallel evolutions")->check(CLI::PositiveNumber);
  auto* compare = app.add_subcommand("compare", "merge predict.csv and sweep.csv into per-curve files");
  compare->add_option("--out", o.out_dir, "directory holding predict.csv and sweep.csv");
  compare->add_option("--predict", o.predict_csv, "predict.csv path");
  compare->add_option("--sweep", o.sweep_csv, "sweep.csv path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*units) return cmd_units(o);
    if (*spectrum) return cmd_spectrum(o);
    if (*predict) return cmd_predict(o);
    if (*simulate) return cmd_simulate(o);
    if (*sweep) return cmd_sweep(o);
    if (*compare) return cmd_compare(o);
  } catch (const Failure& f) {
    std::cerr << "error (" << rv_status_name(f.status) << "): " << f.message << '\n';
    return exit_code(f.status);
  }
  return kExitConfig;
}
