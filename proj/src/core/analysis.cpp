#include "core/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "core/error.hpp"

namespace revival::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> intensities(const tdse::AutocorrelationSeries& series) {
  std::vector<double> out(series.values.size());
  std::transform(series.values.begin(), series.values.end(), out.begin(), [](tdse::cplx a) { return std::norm(a); });
  return out;
}

// Centred moving average of width 2 * half + 1, truncated at the ends.
std::vector<double> moving_average(const std::vector<double>& y, std::size_t half) {
  const std::size_t n = y.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
  return out;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Vertex offset in samples of the parabola through (-1, a), (0, b), (1, c).
double parabola_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (denom == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace

RevivalEstimate extract_revival(const tdse::AutocorrelationSeries& series, double T_guess,
                                const ExtractOptions& options) {
  require(T_guess > 0.0, ErrorCode::kInvalidArgument, "extract_revival: T_guess must be > 0");
  require(series.sample_interval > 0.0 && series.times.size() >= 3, ErrorCode::kDetection,
          "extract_revival: series too short");
  if (series.times.front() > options.coverage_lo * T_guess || series.times.back() < options.coverage_hi * T_guess) {
    std::ostringstream msg;
    msg << "extract_revival: series [" << series.times.front() << ", " << series.times.back()
        << "] does not cover [" << options.coverage_lo * T_guess << ", " << options.coverage_hi * T_guess << "]";
    fail(ErrorCode::kDetection, msg.str());
  }

  const double width = options.smoothing_width > 0.0 ? options.smoothing_width : extract_classical_period(series);
  const auto half = static_cast<std::size_t>(std::lround(0.5 * width / series.sample_interval));
  const auto raw = intensities(series);
  // The one-period mean of |A|^2 is nearly constant through a revival (it is
  // fixed by the level populations); the mean of |A|^4 is not. A single box
  // of one period always holds one recurrence pulse and is flat to within
  // T_cl/2 of the peak; two passes give a triangle that peaks on the pulse.
  std::vector<double> squared(raw.size());
  std::transform(raw.begin(), raw.end(), squared.begin(), [](double v) { return v * v; });
  const auto envelope = moving_average(moving_average(squared, half), half);

  RevivalEstimate est;
  est.smoothing_width = width;
  est.t_lo = options.window_lo * T_guess;
  est.t_hi = options.window_hi * T_guess;
  const auto first = static_cast<std::size_t>(
      std::lower_bound(series.times.begin(), series.times.end(), est.t_lo) - series.times.begin());
  const auto last = static_cast<std::size_t>(
      std::upper_bound(series.times.begin(), series.times.end(), est.t_hi) - series.times.begin());
  require(last > first + 2, ErrorCode::kDetection, "extract_revival: search window holds too few samples");

  std::size_t best = first;
  for (std::size_t i = first; i < last; ++i) {
    if (envelope[i] > envelope[best]) best = i;
  }
  const double floor = median(std::vector<double>(envelope.begin() + static_cast<std::ptrdiff_t>(first),
                                                  envelope.begin() + static_cast<std::ptrdiff_t>(last)));
  if (!(envelope[best] >= options.noise_factor * floor)) {
    std::ostringstream msg;
    msg << "extract_revival: no revival above the noise floor (max " << envelope[best] << ", median " << floor << ")";
    fail(ErrorCode::kDetection, msg.str());
  }

  double offset = 0.0;
  if (best > first && best + 1 < last) offset = parabola_offset(envelope[best - 1], envelope[best], envelope[best + 1]);
  est.T_rev = std::clamp(series.times[best] + offset * series.sample_interval, est.t_lo, est.t_hi);

  const std::size_t lo = best >= half ? best - half : 0;
  const std::size_t hi = std::min(raw.size(), best + half + 1);
  est.peak_value = *std::max_element(raw.begin() + static_cast<std::ptrdiff_t>(lo),
                                     raw.begin() + static_cast<std::ptrdiff_t>(hi));
  return est;
}

double extract_classical_period(const tdse::AutocorrelationSeries& series, double window) {
  require(series.sample_interval > 0.0, ErrorCode::kDetection, "classical period: bad sample interval");
  std::size_t n = std::min<std::size_t>(series.values.size(), 8192);
  if (window > 0.0) {
    n = std::min(series.values.size(), static_cast<std::size_t>(window / series.sample_interval) + 1);
  }
  require(n >= 16, ErrorCode::kDetection, "classical period: too few samples");

  auto y = intensities(series);
  y.resize(n);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
    y[i] = (y[i] - mean) * hann;
  }

  std::size_t padded = 1;
  while (padded < 8 * n) padded <<= 1;
  std::vector<double> in(padded, 0.0);
  std::copy(y.begin(), y.end(), in.begin());
  std::vector<fftw_complex> out(padded / 2 + 1);
  {
    // Plans are created with FFTW_ESTIMATE, which leaves `in` untouched.
    static std::mutex planner;
    fftw_plan plan;
    {
      std::lock_guard lock(planner);
      plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner);
    fftw_destroy_plan(plan);
  }
  std::vector<double> power(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];

  // Skip the bins within two window-lengths of DC; Hann leakage of the mean lives there.
  const std::size_t k_min = std::max<std::size_t>(2, 2 * padded / n);
  require(k_min + 2 < power.size(), ErrorCode::kDetection, "classical period: window too short");
  std::size_t best = k_min;
  for (std::size_t k = k_min; k + 1 < power.size(); ++k) {
    if (power[k] > power[best]) best = k;
  }
  const double floor = median(std::vector<double>(power.begin() + static_cast<std::ptrdiff_t>(k_min), power.end()));
  require(power[best] > 0.0 && power[best] >= 20.0 * floor, ErrorCode::kDetection,
          "classical period: no dominant spectral peak");

  const auto safe_log = [](double p) { return std::log(std::max(p, std::numeric_limits<double>::min())); };
  const double offset = parabola_offset(safe_log(power[best - 1]), safe_log(power[best]), safe_log(power[best + 1]));
  const double frequency = (static_cast<double>(best) + offset) / (static_cast<double>(padded) * series.sample_interval);
  const double period = 1.0 / frequency;
  const double covered = static_cast<double>(n - 1) * series.sample_interval;
  require(covered >= 5.0 * period, ErrorCode::kDetection, "classical period: window holds fewer than five periods");
  return period;
}

double windowed_energy_drift(const tdse::AutocorrelationSeries& series, double classical_period) {
  require(!series.energies.empty(), ErrorCode::kInvalidArgument, "energy drift: series has no energies");
  require(classical_period > 0.0, ErrorCode::kInvalidArgument, "energy drift: period must be > 0");
  const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(classical_period / series.sample_interval)));
  const std::size_t n = series.energies.size();
  require(n >= w, ErrorCode::kInvalidArgument, "energy drift: series shorter than one period");
  auto window_mean = [&](std::size_t start) {
    double s = 0.0;
    for (std::size_t i = start; i < start + w; ++i) s += series.energies[i];
    return s / static_cast<double>(w);
  };
  const double reference = window_mean(0);
  double worst = 0.0;
  for (std::size_t start = w; start + w <= n; start += w) {
    worst = std::max(worst, std::abs(window_mean(start) - reference));
  }
  return worst / std::abs(reference);
}

double release_height(double E_r, double V0, double kappa) {
  require(kappa > 0.0 && V0 >= 0.0, ErrorCode::kConfiguration, "release_height: bad potential parameters");
  auto V = [&](double x) { return x + V0 * std::exp(-kappa * x); };
  double lo = V0 > 0.0 ? std::log(kappa * V0) / kappa : 0.0;  // potential minimum
  require(E_r > V(lo), ErrorCode::kConfiguration, "release_height: E_r below the potential minimum");
  double hi = std::max(E_r, lo + 1.0);
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (V(mid) < E_r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PreparedRun prepare_run(const spectrum::SpectrumModel& model, double E_r, double lambda, const SimConfig& config) {
  PreparedRun run;
  run.ctx = resonance::build_context(model, E_r, lambda);
  run.drive = {lambda, config.V0, config.kappa, config.kbar};
  run.drive.validate();
  run.T_cl = resonance::classical_period(run.ctx);
  run.T_guess = resonance::revival_time_general(run.ctx, lambda).T_lambda;
  require(run.T_guess > 0.0, ErrorCode::kNumeric, "prepare_run: analytic revival guess is not positive");

  tdse::Grid grid{config.x_min, config.x_max > 0.0 ? config.x_max : 4.0 * E_r, config.n_points};
  grid.validate();
  run.x0 = release_height(E_r, config.V0, config.kappa);
  run.sigma = config.sigma > 0.0 ? config.sigma : std::sqrt(config.kbar * run.T_cl / (4.0 * kPi));
  run.psi0 = tdse::init_gaussian(grid, run.x0, run.sigma, config.p0, config.kbar);

  require(config.dt > 0.0 || config.dt_divisions > 0.0, ErrorCode::kConfiguration, "prepare_run: no time step");
  require(config.sample_interval > 0.0 || config.sample_divisions > 0.0, ErrorCode::kConfiguration,
          "prepare_run: no sample interval");
  run.dt = config.dt > 0.0 ? config.dt : run.T_cl / config.dt_divisions;
  run.sample_interval = config.sample_interval > 0.0 ? config.sample_interval : run.T_cl / config.sample_divisions;
  run.t_end = config.t_end > 0.0 ? config.t_end : config.t_end_factor * run.T_guess;
  return run;
}

namespace {

std::string status_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kDetection: return "error:detection";
    case ErrorCode::kInstability: return "error:instability";
    case ErrorCode::kConfiguration:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDomain: return "error:configuration";
    default: return "error:numeric";
  }
}

SweepRow run_row(const spectrum::SpectrumModel& model, double E_r, double lambda, const SimConfig& config,
                 const SweepOptions& options) {
  SweepRow row;
  row.lambda = lambda;
  row.T_numeric = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto run = prepare_run(model, E_r, lambda, config);
    const auto general = resonance::revival_time_general(run.ctx, lambda);
    const auto simple = resonance::revival_time_bouncer_simple(E_r, run.ctx.E_N, lambda, config.kbar);
    row.T_analytic_general = general.T_lambda;
    row.T_analytic_simple = simple.T_lambda;
    row.ratio_analytic_general = general.ratio;
    row.ratio_analytic_simple = simple.ratio;

    const auto series =
        tdse::evolve_and_record(run.psi0, run.t_end, run.dt, run.sample_interval, run.drive, options.evolve);
    row.max_norm_drift = series.max_norm_drift;
    if (!series.complete) fail(ErrorCode::kInstability, series.failure);
    ExtractOptions extract = options.extract;
    if (extract.smoothing_width <= 0.0) extract.smoothing_width = run.T_cl;
    row.T_numeric = extract_revival(series, run.T_guess, extract).T_rev;
    row.ratio_numeric = row.T_numeric / general.T0;
  } catch (const Error& e) {
    row.status = status_for(e);
    row.message = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const spectrum::SpectrumModel& model, double E_r, std::span<const double> lambdas,
                            const SimConfig& config, const SweepOptions& options) {
  require(!lambdas.empty(), ErrorCode::kConfiguration, "sweep: lambda list is empty");
  for (double l : lambdas) require(std::isfinite(l) && l >= 0.0, ErrorCode::kConfiguration, "sweep: lambda must be >= 0");

  std::vector<double> sorted(lambdas.begin(), lambdas.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows(sorted.size());

  std::atomic<std::size_t> next{0};
  std::mutex callback;
  auto worker = [&] {
    for (std::size_t i = next++; i < sorted.size(); i = next++) {
      rows[i] = run_row(model, E_r, sorted[i], config, options);
      if (options.on_row) {
        std::lock_guard lock(callback);
        options.on_row(rows[i]);
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::clamp<int>(options.workers, 1, static_cast<int>(sorted.size())));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  // Rescale against the numeric undriven revival when one is available.
  const auto ref = std::find_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.lambda == 0.0 && r.status == "ok"; });
  if (ref != rows.end()) {
    const double T_ref = ref->T_numeric;
    for (auto& r : rows) {
      if (r.status == "ok") r.ratio_numeric = r.T_numeric / T_ref;
    }
  }
  return rows;
}

QuadraticFit quadratic_fit(std::span<const SweepRow> rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.status == "ok" && std::isfinite(r.ratio_numeric)) pts.emplace_back(r.lambda * r.lambda, 1.0 - r.ratio_numeric);
  }
  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p.first);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  require(xs.size() >= 3, ErrorCode::kFit, "quadratic_fit: need at least three distinct lambdas");

  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  require(sxx > 0.0, ErrorCode::kFit, "quadratic_fit: degenerate design matrix");

  QuadraticFit fit;
  fit.coefficient = sxy / sxx;
  fit.intercept = my - fit.coefficient * mx;
  fit.rows_used = pts.size();
  double ss_res = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = y - (fit.intercept + fit.coefficient * x);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  return fit;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  const auto old_precision = out.precision(12);
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.lambda << ',' << r.T_numeric << ',' << r.T_analytic_general << ',' << r.T_analytic_simple << ','
        << r.ratio_numeric << ',' << r.ratio_analytic_general << ',' << r.ratio_analytic_simple << ',' << r.status
        << '\n';
  }
  out.precision(old_precision);
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "sweep csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kSweepCsvHeader, ErrorCode::kIo, "sweep csv: unexpected header");
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) fail(ErrorCode::kIo, "sweep csv: line " + std::to_string(line_no) + " needs 8 columns");
    SweepRow r;
    try {
      r.lambda = std::stod(cells[0]);
      r.T_numeric = std::stod(cells[1]);
      r.T_analytic_general = std::stod(cells[2]);
      r.T_analytic_simple = std::stod(cells[3]);
      r.ratio_numeric = std::stod(cells[4]);
      r.ratio_analytic_general = std::stod(cells[5]);
      r.ratio_analytic_simple = std::stod(cells[6]);
    } catch (const std::exception&) {
      fail(ErrorCode::kIo, "sweep csv: bad number on line " + std::to_string(line_no));
    }
    r.status = cells[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_series_csv(std::ostream& out, const tdse::AutocorrelationSeries& series) {
  const auto old_precision = out.precision(12);
  out << "t,re_A,im_A,abs_A2\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const auto a = series.values[i];
    out << series.times[i] << ',' << a.real() << ',' << a.imag() << ',' << std::norm(a) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace revival::analysis
