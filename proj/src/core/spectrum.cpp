#include "core/spectrum.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/error.hpp"

namespace revival::spectrum {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTol = 1e-12;
constexpr unsigned kQuadratureDepth = 15;

double bisect_root(auto&& f, double lo, double hi) {
  // f(lo) < 0 < f(hi) or the reverse; terminates at 1e-12 absolute width.
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::max(1.0, std::abs(a)); };
  std::uintmax_t max_iter = 400;
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
  return 0.5 * (a + b);
}

}  // namespace

SpectrumModel::SpectrumModel(SpectrumKind kind, double kbar, double V0, double kappa, double maslov)
    : kind_(kind), kbar_(kbar), V0_(V0), kappa_(kappa), maslov_shift_(maslov) {
  require(std::isfinite(kbar) && kbar > 0.0, ErrorCode::kDomain, "spectrum: kbar must be > 0");
  require(std::isfinite(V0) && V0 >= 0.0, ErrorCode::kDomain, "spectrum: V0 must be >= 0");
  require(std::isfinite(kappa) && kappa > 0.0, ErrorCode::kDomain, "spectrum: kappa must be > 0");
  require(std::isfinite(maslov) && maslov > -1.0, ErrorCode::kDomain, "spectrum: maslov shift must exceed -1");
}

SpectrumModel SpectrumModel::triangular_well(double kbar) {
  return SpectrumModel(SpectrumKind::kTriangularWell, kbar, 0.0, 1.0, kTriangularMaslov);
}

SpectrumModel SpectrumModel::numeric_action(double kbar, double V0, double kappa, double maslov_shift) {
  return SpectrumModel(SpectrumKind::kNumericAction, kbar, V0, kappa, maslov_shift);
}

double SpectrumModel::potential(double x) const {
  if (kind_ == SpectrumKind::kTriangularWell || V0_ == 0.0) {
    return x >= 0.0 ? x : std::numeric_limits<double>::infinity();
  }
  return x + V0_ * std::exp(-kappa_ * x);
}

double SpectrumModel::potential_minimum() const {
  if (kind_ == SpectrumKind::kTriangularWell || V0_ == 0.0) return 0.0;
  // V' = 1 - kappa V0 e^{-kappa x} vanishes at x* = ln(kappa V0) / kappa.
  const double x_star = std::log(kappa_ * V0_) / kappa_;
  return x_star + 1.0 / kappa_;
}

SpectrumModel::TurningPoints SpectrumModel::turning_points(double E) const {
  if (kind_ == SpectrumKind::kTriangularWell || V0_ == 0.0) return {0.0, E, true};
  const double x_star = std::log(kappa_ * V0_) / kappa_;
  auto g = [&](double x) { return potential(x) - E; };
  // V(x) > x, so the right turning point lies below E.
  const double right = bisect_root(g, x_star, std::max(E, x_star + 1.0));
  double lo = x_star - 1.0;
  for (double width = 1.0; g(lo) < 0.0; width *= 2.0) lo = x_star - width;
  const double left = bisect_root(g, lo, x_star);
  return {left, right, false};
}

// Both integrals use x = xL + w (1 - cos t) / 2 on t in [0, pi], which removes
// the square-root endpoint behaviour. E - V(x) is evaluated relative to the
// nearer turning point with expm1 so it stays positive and accurate there.
// Near the right turning point the wall term is formed in log space: at high
// energy e^{-kappa x_R} underflows while e^{kappa s} overflows.
double SpectrumModel::gap_from_turning_point(const TurningPoints& tp, double E, double t) const {
  const double w = tp.right - tp.left;
  if (t <= 0.5 * kPi) {
    const double s = w * std::pow(std::sin(0.5 * t), 2);
    if (tp.hard_wall) return E - s;
    const double a_left = V0_ * std::exp(-kappa_ * tp.left);
    return -(s + a_left * std::expm1(-kappa_ * s));
  }
  const double s = w * std::pow(std::cos(0.5 * t), 2);
  if (tp.hard_wall) return s;
  const double log_b = std::log(V0_) - kappa_ * tp.right;
  const double wall = kappa_ * s < 1.0 ? std::exp(log_b) * std::expm1(kappa_ * s)
                                       : std::exp(log_b + kappa_ * s) - std::exp(log_b);
  return s - wall;
}

double SpectrumModel::numeric_action(double E) const {
  const auto tp = turning_points(E);
  const double w = tp.right - tp.left;
  auto gap = [&](double t) { return gap_from_turning_point(tp, E, t); };
  auto f = [&](double t) {
    const double g = gap(t);
    return g > 0.0 ? std::sqrt(2.0 * g) * 0.5 * w * std::sin(t) : 0.0;
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, kQuadratureDepth, kQuadratureTol);
  return integral / kPi;
}

double SpectrumModel::numeric_period(double E) const {
  const auto tp = turning_points(E);
  const double w = tp.right - tp.left;
  auto f = [&](double t) {
    const double g = gap_from_turning_point(tp, E, t);
    return g > 0.0 ? 0.5 * w * std::sin(t) / std::sqrt(2.0 * g) : 0.0;
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, kQuadratureDepth, kQuadratureTol);
  return 2.0 * integral;
}

double SpectrumModel::action(double E) const {
  require(E > potential_minimum(), ErrorCode::kDomain, "spectrum: energy below potential minimum");
  if (kind_ == SpectrumKind::kTriangularWell) return 2.0 * std::numbers::sqrt2 / (3.0 * kPi) * std::pow(E, 1.5);
  return numeric_action(E);
}

double SpectrumModel::period(double E) const {
  require(E > potential_minimum(), ErrorCode::kDomain, "spectrum: energy below potential minimum");
  if (kind_ == SpectrumKind::kTriangularWell) return 2.0 * std::sqrt(2.0 * E);
  return numeric_period(E);
}

double SpectrumModel::angular_frequency(double E) const { return 2.0 * kPi / period(E); }

double SpectrumModel::level_from_energy(double E) const { return action(E) / kbar_ - maslov_shift_; }

double SpectrumModel::energy(double n) const {
  require(std::isfinite(n) && n >= 1.0, ErrorCode::kDomain, "spectrum: level number must be >= 1");
  const double target = kbar_ * (n + maslov_shift_);
  const double closed = std::pow(3.0 * kPi * target / (2.0 * std::numbers::sqrt2), 2.0 / 3.0);
  if (kind_ == SpectrumKind::kTriangularWell) return closed;

  const double e_min = potential_minimum();
  // I(E) is increasing; bracket the root, then Newton with dI/dE = T / (2 pi).
  // The bracket is never pushed onto the minimum itself, where the turning
  // points merge and the quadrature degenerates.
  double lo = closed + e_min;
  while (action(lo) > target) lo = e_min + 0.5 * (lo - e_min);
  double hi = closed + e_min + 1.0;
  while (action(hi) < target) hi = 2.0 * hi + 1.0;
  auto f = [&](double E) {
    return std::make_pair(action(E) - target, period(E) / (2.0 * kPi));
  };
  std::uintmax_t max_iter = 200;
  const double guess = std::clamp(closed + e_min, lo, hi);
  const double E = boost::math::tools::newton_raphson_iterate(f, guess, lo, hi, 40, max_iter);
  require(max_iter < 200, ErrorCode::kNumeric, "spectrum: action inversion did not converge");
  return E;
}

Derivatives SpectrumModel::derivatives_at_energy(double E) const {
  if (kind_ == SpectrumKind::kTriangularWell) {
    return {kbar_ * kPi / std::sqrt(2.0 * E), -kbar_ * kbar_ * kPi * kPi / (4.0 * E * E)};
  }
  const double omega = angular_frequency(E);
  const double first = kbar_ * omega;
  // E'' = kbar^2 Omega dOmega/dE; central differences in E refined by Richardson
  // extrapolation until successive estimates agree.
  auto central = [&](double h) { return (angular_frequency(E + h) - angular_frequency(E - h)) / (2.0 * h); };
  const double room = 0.5 * (E - potential_minimum());
  double h = std::min(first, room);
  double prev = central(h);
  double best = prev;
  for (int it = 0; it < 8; ++it) {
    h *= 0.5;
    const double cur = central(h);
    const double extrap = (4.0 * cur - prev) / 3.0;
    const bool converged = it > 0 && std::abs(extrap - best) <= 1e-9 * std::abs(extrap);
    best = extrap;
    prev = cur;
    if (converged) break;
  }
  return {first, kbar_ * kbar_ * omega * best};
}

Derivatives SpectrumModel::derivatives(double n) const {
  return derivatives_at_energy(energy(n));
}

}  // namespace revival::spectrum
