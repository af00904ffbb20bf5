#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "core/analysis.hpp"
#include "core/resonance.hpp"
#include "helpers.hpp"

using namespace revival;
using namespace revival::analysis;

namespace {

constexpr double kPi = std::numbers::pi;

// A(t) = sum_n w_n exp(-i (E1 k + E2 k^2 / 2) t), k = n - r: the undriven
// autocorrelation with a quadratic spectrum. It revives exactly at
// T_rev = 4 pi / |E2|, with bounces every 2 pi / E1.
tdse::AutocorrelationSeries synthetic(double E1, double E2, const std::vector<double>& weights, double t_end,
                                      double sample_interval) {
  tdse::AutocorrelationSeries s;
  s.sample_interval = sample_interval;
  s.dt = sample_interval;
  const int half = static_cast<int>(weights.size() / 2);
  const auto n = static_cast<std::size_t>(std::floor(t_end / sample_interval + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * sample_interval;
    std::complex<double> a{0.0, 0.0};
    for (int j = 0; j < static_cast<int>(weights.size()); ++j) {
      const double k = j - half;
      a += weights[static_cast<std::size_t>(j)] * std::polar(1.0, -(E1 * k + 0.5 * E2 * k * k) * t);
    }
    s.times.push_back(t);
    s.values.push_back(a);
  }
  return s;
}

std::vector<double> gaussian_weights(int half, double width) {
  std::vector<double> w;
  double total = 0.0;
  for (int k = -half; k <= half; ++k) {
    w.push_back(std::exp(-0.5 * k * k / (width * width)));
    total += w.back();
  }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

TEST_CASE("revival of a synthetic quadratic spectrum") {
  const double E1 = 0.2, E2 = -2e-3;
  const double T_rev = 4.0 * kPi / std::abs(E2);
  const double T_cl = 2.0 * kPi / E1;
  const auto s = synthetic(E1, E2, gaussian_weights(20, 4.0), 1.7 * T_rev, T_cl / 50.0);
  for (double guess : {T_rev, 0.85 * T_rev, 1.15 * T_rev}) {
    const auto est = extract_revival(s, guess);
    CHECK(std::abs(est.T_rev - T_rev) <= s.sample_interval);
    CHECK(est.t_lo <= est.T_rev);
    CHECK(est.T_rev <= est.t_hi);
    CHECK(est.peak_value > 0.0);
    CHECK(est.peak_value <= 1.0 + 1e-12);
    CHECK(est.smoothing_width == doctest::Approx(T_cl).epsilon(0.01));
  }
}

TEST_CASE("extraction is unbiased over random level populations") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> width(2.5, 6.0);
  std::uniform_real_distribution<double> curvature(1.5e-3, 3e-3);
  std::uniform_real_distribution<double> frequency(0.15, 0.25);
  std::uniform_real_distribution<double> guess(0.8, 1.2);
  std::vector<double> errors;
  double sample = 0.0, T_last = INFINITY;
  for (int trial = 0; trial < 20; ++trial) {
    const double E1 = frequency(rng), E2 = -curvature(rng);
    const double T_rev = 4.0 * kPi / std::abs(E2);
    const auto w = gaussian_weights(24, width(rng));
    const double g = guess(rng) * T_rev;
    const auto s = synthetic(E1, E2, w, 1.45 * g, 2.0 * kPi / E1 / 50.0);
    sample = std::max(sample, s.sample_interval);
    // Recurrences are pulses one classical period apart; the revival is the
    // pulse nearest T_rev, where the quadratic phases all vanish.
    const double pulse = T_rev - std::remainder(E1 * T_rev, 2.0 * kPi) / E1;
    errors.push_back(std::abs(extract_revival(s, g).T_rev - pulse) / T_rev);
    T_last = std::min(T_last, T_rev);
  }
  std::nth_element(errors.begin(), errors.begin() + 10, errors.end());
  CHECK(errors[10] <= sample / T_last * 1.5);
}

TEST_CASE("extraction refuses series that miss the window or hold no revival") {
  const double E1 = 0.2, E2 = -2e-3;
  const double T_rev = 4.0 * kPi / std::abs(E2);
  const auto w = gaussian_weights(20, 4.0);
  const auto short_series = synthetic(E1, E2, w, 1.2 * T_rev, 2.0 * kPi / E1 / 20.0);
  CHECK(test::error_code([&] { extract_revival(short_series, T_rev); }) == ErrorCode::kDetection);
  // A linear spectrum has no collapse: the envelope is flat.
  const auto flat = synthetic(E1, 0.0, w, 1.45 * T_rev, 2.0 * kPi / E1 / 20.0);
  CHECK(test::error_code([&] { extract_revival(flat, T_rev); }) == ErrorCode::kDetection);
}

TEST_CASE("classical period from a pure tone") {
  tdse::AutocorrelationSeries s;
  s.sample_interval = 0.37;
  const double P = 28.9;
  for (int i = 0; i < 4000; ++i) {
    const double t = i * s.sample_interval;
    s.times.push_back(t);
    s.values.emplace_back(std::sqrt(0.5 + 0.5 * std::cos(2.0 * kPi * t / P)), 0.0);
  }
  const double bin = P * P / (8.0 * 4000 * s.sample_interval);
  CHECK(std::abs(extract_classical_period(s) - P) <= bin);
  CHECK(test::error_code([&] { extract_classical_period(s, 3.0 * P); }) == ErrorCode::kDetection);
}

TEST_CASE("windowed energy drift") {
  tdse::AutocorrelationSeries s;
  s.sample_interval = 0.1;
  for (int i = 0; i < 1000; ++i) {
    s.times.push_back(i * 0.1);
    s.energies.push_back(100.0 + 0.3 * std::sin(2.0 * kPi * i * 0.1 / 5.0) + 1e-4 * i * 0.1);
  }
  // Window means drift by 1e-4 per time unit; the last full window starts at t = 95.
  CHECK(windowed_energy_drift(s, 5.0) == doctest::Approx(95.0 * 1e-4 / 100.0).epsilon(1e-3));
  s.energies.clear();
  CHECK(test::error_code([&] { windowed_energy_drift(s, 5.0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("release height lies on the right branch") {
  const double x = release_height(104.1, 1.0, 1.0);
  CHECK(x + std::exp(-x) == doctest::Approx(104.1).epsilon(1e-13));
  CHECK(x > 0.0);
  CHECK(release_height(5.0, 0.0, 1.0) == doctest::Approx(5.0));
  CHECK(test::error_code([] { release_height(0.5, 1.0, 1.0); }) == ErrorCode::kConfiguration);
}

TEST_CASE("quadratic fit") {
  const auto m = spectrum::SpectrumModel::triangular_well(1.0);
  const double E_N = resonance::resonance_center(m, 4);
  std::vector<SweepRow> rows;
  for (double l : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25}) {
    SweepRow r;
    r.lambda = l;
    r.ratio_numeric = resonance::revival_time_bouncer_simple(70.28, E_N, l).ratio;
    rows.push_back(r);
  }
  const auto fit = quadratic_fit(rows);
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(fit.intercept) < 1e-12);
  CHECK(fit.rows_used == 6);
  rows[3].status = "error:detection";
  CHECK(quadratic_fit(rows).rows_used == 5);
  CHECK(test::error_code([&] { quadratic_fit(std::span(rows).first(1)); }) == ErrorCode::kFit);
  std::vector<SweepRow> same(4);
  CHECK(test::error_code([&] { quadratic_fit(same); }) == ErrorCode::kFit);
}

TEST_CASE("sweep csv round trip") {
  std::vector<SweepRow> rows(2);
  rows[0] = {0.0, 55187.123456789, 55187.0, 55187.0, 1.0, 1.0, 1.0, "ok", "", 0.0};
  rows[1] = {0.25, std::nan(""), 52000.5, 53000.25, std::nan(""), 0.95, 0.965, "error:detection", "x", 0.0};
  std::stringstream ss;
  write_sweep_csv(ss, rows);
  const std::string text = ss.str();
  CHECK(text.rfind(std::string(kSweepCsvHeader) + "\n", 0) == 0);
  CHECK(text.find("55187.1234568,") != std::string::npos);
  const auto back = read_sweep_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].T_numeric == doctest::Approx(55187.1234568).epsilon(1e-13));
  CHECK(std::isnan(back[1].T_numeric));
  CHECK(back[1].status == "error:detection");
  std::stringstream bad("lambda,T\n1,2\n");
  CHECK(test::error_code([&] { read_sweep_csv(bad); }) == ErrorCode::kIo);
}

TEST_CASE("series csv columns") {
  tdse::AutocorrelationSeries s;
  s.times = {0.0, 0.5};
  s.values = {{1.0, 0.0}, {0.6, -0.8}};
  std::stringstream ss;
  write_series_csv(ss, s);
  CHECK(ss.str() == "t,re_A,im_A,abs_A2\n0,1,0,1\n0.5,0.6,-0.8,1\n");
}

TEST_CASE("sweep records per-row failures and orders rows") {
  const auto m = spectrum::SpectrumModel::triangular_well(1.0);
  SimConfig cfg;
  cfg.n_points = 512;
  cfg.x_max = 60.0;
  cfg.t_end = 50.0;  // far short of the revival window
  const std::vector<double> lambdas{0.02, 0.0, 0.01};
  const auto rows = sweep(m, 12.0, lambdas, cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].lambda == 0.0);
  CHECK(rows[2].lambda == 0.02);
  for (const auto& r : rows) {
    CHECK(r.status == "error:detection");
    CHECK(r.T_analytic_general > 0.0);
    CHECK(r.T_analytic_simple > 0.0);
    CHECK(r.ratio_analytic_general <= 1.0);
  }
  CHECK(rows[1].ratio_analytic_general > rows[2].ratio_analytic_general);
  CHECK(test::error_code([&] { sweep(m, 12.0, std::vector<double>{}, cfg); }) == ErrorCode::kConfiguration);
}

TEST_CASE("numeric revival of a small cavity is width independent and parallel-safe") {
  // E_r = 30 keeps each run to about ten seconds. The soft-wall spectrum is used
  // for the guess so the window is centred on the true revival.
  const auto m = spectrum::SpectrumModel::numeric_action(1.0, 1.0, 1.0);
  SimConfig cfg;
  cfg.n_points = 1024;
  cfg.x_max = 120.0;
  cfg.dt_divisions = 1000.0;
  const auto run = prepare_run(m, 30.0, 0.0, cfg);
  const double T0 = resonance::t_zero(run.ctx);

  const std::vector<double> lambdas{0.0, 0.0};
  SweepOptions opts;
  opts.workers = 2;
  const auto rows = sweep(m, 30.0, lambdas, cfg, opts);
  INFO(rows[0].message);
  REQUIRE(rows[0].status == "ok");
  CHECK(rows[0].T_numeric == rows[1].T_numeric);
  CHECK(rows[0].ratio_numeric == 1.0);
  CHECK(rows[0].T_numeric == doctest::Approx(T0).epsilon(0.03));

  SimConfig narrow = cfg;
  narrow.sigma = 0.8 * run.sigma;
  const auto other = sweep(m, 30.0, std::vector<double>{0.0}, narrow);
  REQUIRE(other[0].status == "ok");
  CHECK(other[0].T_numeric == doctest::Approx(rows[0].T_numeric).epsilon(0.01));
}
