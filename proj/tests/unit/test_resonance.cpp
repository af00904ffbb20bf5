#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/resonance.hpp"
#include "helpers.hpp"

using namespace revival;
using namespace revival::resonance;
using spectrum::SpectrumModel;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form triangular-well quantities, written out independently of the library.
double tri_first(double E) { return kPi / std::sqrt(2.0 * E); }
double tri_second(double E) { return -kPi * kPi / (4.0 * E * E); }

}  // namespace

TEST_CASE("resonance order selection") {
  const auto m = SpectrumModel::triangular_well(1.0);
  CHECK(select_resonance(m, 104.1) == 5);
  CHECK(select_resonance(m, 70.28) == 4);
  for (int N : {1, 3, 6}) {
    const double E = N * N * kPi * kPi / 2.0;
    CHECK(select_resonance(m, E) == N);
    CHECK(std::abs(build_context(m, E, 0.1).mu) < 1e-9);
  }
  bool tie = false;
  CHECK(select_resonance(m, 4.5 * 4.5 * kPi * kPi / 2.0, &tie) == 4);
  CHECK(tie);
  CHECK(test::error_code([&] { select_resonance(m, 1.0); }) == ErrorCode::kNoResonance);
}

TEST_CASE("resonance centres") {
  const auto tri = SpectrumModel::triangular_well(1.0);
  CHECK(resonance_center(tri, 4) == doctest::Approx(78.957).epsilon(1e-5));
  CHECK(resonance_center(tri, 5) == doctest::Approx(123.370).epsilon(1e-5));
  const auto soft = SpectrumModel::numeric_action(1.0, 1.0, 1.0);
  for (int N : {2, 4, 5}) {
    const double E_N = resonance_center(soft, N);
    CHECK(soft.angular_frequency(E_N) * N == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("coupling matrix elements") {
  for (int N : {1, 4, 5, 9}) CHECK(coupling_limit(N * N * kPi * kPi / 2.0, N) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(coupling(104.1, 5, 319) == doctest::Approx(-0.848229).epsilon(1e-6));
  CHECK(coupling(104.1, 5, 1e9) == doctest::Approx(coupling_limit(104.1, 5)).epsilon(1e-8));
  CHECK(test::error_code([] { coupling(10.0, 6, 1.0); }) == ErrorCode::kDomain);
}

TEST_CASE("context at the low-energy sweep point") {
  const auto m = SpectrumModel::triangular_well(1.0);
  const auto ctx = build_context(m, 70.28, 0.25);
  CHECK(ctx.N == 4);
  CHECK(ctx.r == 177);
  CHECK(ctx.V == doctest::Approx(-1.0).epsilon(1e-12));
  const double mu = (tri_first(70.28) - 0.25) / tri_second(70.28);
  CHECK(ctx.mu == doctest::Approx(mu).epsilon(1e-12));
  CHECK(ctx.mu == doctest::Approx(-30.0).epsilon(0.01));
  CHECK(ctx.q == doctest::Approx(4.0 * 0.25 * -1.0 / (16.0 * tri_second(70.28))).epsilon(1e-12));
  CHECK(build_context(m, 70.28, 0.0).q == 0.0);
}

TEST_CASE("quasi-energies") {
  const auto m = SpectrumModel::triangular_well(1.0);
  const auto ctx = build_context(m, 104.1, 0.0);
  for (int k = -10; k <= 10; ++k) {
    if (std::abs(2.0 * k / ctx.N) == 1.0) continue;
    const double expected = 0.5 * ctx.E_r2 * k * k;
    if (k == 0) {
      CHECK(quasi_energy(ctx, k) == 0.0);
    } else {
      CHECK(std::abs(quasi_energy(ctx, k) - expected) <= 1e-12 * std::abs(expected));
    }
  }
  auto c = ctx;
  c.N = 5;
  c.E_r2 = -2.277e-4;
  c.q = 0.1;
  CHECK(quasi_energy(c, 1) == doctest::Approx(-1.0962e-4).epsilon(1e-4));
  CHECK(quasi_energy(c, 1, mathieu::Method::kMatrix) == doctest::Approx(quasi_energy(c, 1)).epsilon(1e-5));
  c.N = 2;
  CHECK(test::error_code([&] { quasi_energy(c, 1); }) == ErrorCode::kSingularOrder);
}

TEST_CASE("series quasi-energy reduces to the detuned parabola at q = 0") {
  const auto m = SpectrumModel::triangular_well(1.0);
  const auto ctx = build_context(m, 70.28, 0.0);
  for (double n : {170.0, 177.0, 185.0}) {
    const double nu = 2.0 * (n - ctx.r) / ctx.N + 2.0 * ctx.mu / ctx.N;
    CHECK(quasi_energy_series(ctx, n) == doctest::Approx(ctx.N * ctx.N * ctx.E_r2 / 8.0 * nu * nu).epsilon(1e-13));
  }
  auto exact = build_context(m, 8.0 * kPi * kPi, 0.0);
  exact.r = 40;
  exact.mu = 0.0;
  CHECK(quasi_energy_series(exact, 40.0) == 0.0);
}

TEST_CASE("curvature of the quasi-energies reproduces the general revival time") {
  // T_lambda = 4 pi kbar / |E''(r)| with E''(r) the second n-derivative of the
  // series quasi-energy; to first order its deficit equals the general formula's.
  const auto m = SpectrumModel::triangular_well(1.0);
  for (auto [E, lambda] : {std::pair{104.1, 0.05}, {104.1, 0.25}, {70.28, 0.05}, {70.28, 0.08}}) {
    const auto ctx = build_context(m, E, lambda);
    const double r = static_cast<double>(ctx.r);
    auto curvature = [&](double h) {
      return (quasi_energy_series(ctx, r + h) - 2.0 * quasi_energy_series(ctx, r) + quasi_energy_series(ctx, r - h)) /
             (h * h);
    };
    const double c = (16.0 * curvature(0.05) - curvature(0.1)) / 15.0;
    const double deficit_from_curvature = c / ctx.E_r2 - 1.0;
    const auto general = revival_time_general(ctx, lambda);
    REQUIRE(1.0 - general.ratio < 0.05);
    CHECK(deficit_from_curvature == doctest::Approx(1.0 - general.ratio).epsilon(1e-6));
  }
}

TEST_CASE("classical period and undriven revival time") {
  const auto m = SpectrumModel::triangular_well(1.0);
  const auto c104 = build_context(m, 104.1, 0.0);
  const auto c70 = build_context(m, 70.28, 0.0);
  CHECK(classical_period(c104) == doctest::Approx(28.86).epsilon(3e-4));
  CHECK(classical_period(c70) == doctest::Approx(23.71).epsilon(3e-4));
  CHECK(t_zero(c104) == doctest::Approx(16.0 * 104.1 * 104.1 / kPi).epsilon(1e-12));
  CHECK(t_zero(c104) == doctest::Approx(55187.0).epsilon(2e-4));
  CHECK(t_zero(c70) == doctest::Approx(25152.0).epsilon(2e-4));
  auto doubled = c104;
  doubled.kbar = 2.0;
  CHECK(classical_period(doubled) == doctest::Approx(2.0 * classical_period(c104)));
  auto flat = c104;
  flat.E_r2 = 0.0;
  CHECK(test::error_code([&] { t_zero(flat); }) == ErrorCode::kDegenerateSpectrum);
}

TEST_CASE("general revival formula") {
  const auto m = SpectrumModel::triangular_well(1.0);
  const auto ctx = build_context(m, 70.28, 0.25);
  CHECK(revival_time_general(ctx, 0.0).ratio == 1.0);
  const double s = 0.25 * ctx.V / ctx.E_r2;
  const double mu2 = ctx.mu * ctx.mu;
  const double deficit = 0.5 * s * s * (3.0 * mu2 + 4.0) / std::pow(mu2 - 4.0, 3);
  CHECK(revival_time_general(ctx, 0.25).ratio == doctest::Approx(1.0 - deficit).epsilon(1e-12));
  CHECK(revival_time_general(ctx, 0.25).ratio == doctest::Approx(0.535).epsilon(0.02));

  auto singular = ctx;
  singular.mu = -ctx.N / 2.0;
  CHECK(test::error_code([&] { revival_time_general(singular, 0.25); }) == ErrorCode::kResonanceSingularity);
  singular.mu = ctx.N / 2.0 * (1.0 + 1e-10);
  CHECK(test::error_code([&] { revival_time_general(singular, 0.25); }) == ErrorCode::kResonanceSingularity);
}

TEST_CASE("bouncer revival formulas") {
  CHECK(revival_time_bouncer(70.28, 8.0 * kPi * kPi, 0.25).ratio == doctest::Approx(0.626757).epsilon(1e-5));
  CHECK(revival_time_bouncer_simple(70.28, 8.0 * kPi * kPi, 0.25).ratio == doctest::Approx(0.632258).epsilon(1e-5));
  CHECK(1.0 - revival_time_bouncer_simple(104.1, 123.370, 0.25).ratio == doctest::Approx(0.035).epsilon(0.01));
  CHECK(revival_time_bouncer(70.28, 78.957, 0.0).ratio == 1.0);
  CHECK(revival_time_bouncer_simple(70.28, 78.957, 0.0).ratio == 1.0);
  CHECK(revival_time_bouncer(104.1, 123.37, 0.1).T0 == doctest::Approx(16.0 * 104.1 * 104.1 / kPi));
  CHECK(test::error_code([] { revival_time_bouncer_simple(70.0, 70.0, 0.1); }) == ErrorCode::kResonanceSingularity);
  // (1 - alpha)^2 = a^2 with a = alpha^2 kbar / (4 E_r): pick kbar to hit it.
  const double E_r = 70.0, E_N = 78.0;
  const double alpha = std::sqrt(E_N / E_r);
  const double kbar = std::abs(1.0 - alpha) * 4.0 * E_r / (alpha * alpha);
  CHECK(test::error_code([&] { revival_time_bouncer(E_r, E_N, 0.1, kbar); }) == ErrorCode::kResonanceSingularity);
}

TEST_CASE("bouncer formula tends to the simple form as kbar / E_r vanishes") {
  double previous = 1.0;
  for (double kbar : {1.0, 0.1, 0.01}) {
    const double full = 1.0 - revival_time_bouncer(70.28, 78.957, 0.25, kbar).ratio;
    const double simple = 1.0 - revival_time_bouncer_simple(70.28, 78.957, 0.25, kbar).ratio;
    const double a = (78.957 / 70.28) * kbar / (4.0 * 70.28);
    const double gap = std::pow(1.0 - std::sqrt(78.957 / 70.28), 2);
    const double diff = std::abs(full - simple) / simple;
    // full / simple = (1 + a^2 / 3g) / (1 - a^2 / g)^3 = 1 + (10/3) a^2 / g + O(a^4)
    CHECK(diff == doctest::Approx(10.0 / 3.0 * a * a / gap).epsilon(0.02));
    CHECK(diff < previous);
    previous = diff;
  }
}

TEST_CASE("every formula is exactly quadratic in lambda") {
  const auto m = SpectrumModel::triangular_well(1.0);
  const auto ctx = build_context(m, 104.1, 0.0);
  auto rate = [&](int formula, double l) {
    const auto p = formula == 0   ? revival_time_general(ctx, l)
                   : formula == 1 ? revival_time_bouncer(104.1, ctx.E_N, l)
                                  : revival_time_bouncer_simple(104.1, ctx.E_N, l);
    return (1.0 - p.ratio) / (l * l);
  };
  for (int f = 0; f < 3; ++f) {
    const double base = rate(f, 0.1);
    CHECK(rate(f, 0.05) == doctest::Approx(base).epsilon(1e-9));
    CHECK(rate(f, 0.2) == doctest::Approx(base).epsilon(1e-9));
    CHECK(base > 0.0);
  }
}

TEST_CASE("analytic deficits grow steeply at lower energy") {
  const auto m = SpectrumModel::triangular_well(1.0);
  const double E_lo = 70.28, E_hi = 104.1;
  const double N_lo = resonance_center(m, 4), N_hi = resonance_center(m, 5);
  for (double l : {0.05, 0.15, 0.25}) {
    const double lo = 1.0 - revival_time_bouncer_simple(E_lo, N_lo, l).ratio;
    const double hi = 1.0 - revival_time_bouncer_simple(E_hi, N_hi, l).ratio;
    const double a_lo = std::sqrt(N_lo / E_lo), a_hi = std::sqrt(N_hi / E_hi);
    const double predicted = std::pow(E_hi / E_lo, 2) * std::pow((1.0 - a_hi) / (1.0 - a_lo), 4);
    CHECK(lo / hi == doctest::Approx(predicted).epsilon(1e-12));
    CHECK(lo / hi >= 2.0);
    CHECK(lo / hi > std::pow(E_hi / E_lo, 2));
  }
}
