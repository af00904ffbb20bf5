#include "core/resonance.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "core/error.hpp"

namespace revival::resonance {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string_view formula_name(Formula f) {
  switch (f) {
    case Formula::kGeneral: return "general";
    case Formula::kBouncer: return "bouncer";
    case Formula::kBouncerSimple: return "bouncer_simple";
  }
  return "unknown";
}

int select_resonance(const spectrum::SpectrumModel& model, double E_r, bool* tie) {
  const double inverse = 1.0 / model.angular_frequency(E_r);
  const double frac = inverse - std::floor(inverse);
  const bool half = std::abs(frac - 0.5) < 1e-12;
  const double n = half ? std::floor(inverse) : std::round(inverse);
  if (tie) *tie = half;
  if (!(n >= 1.0)) {
    std::ostringstream msg;
    msg << "resonance: no resonance order >= 1 at E_r=" << E_r << " (1/Omega=" << inverse << ")";
    fail(ErrorCode::kNoResonance, msg.str());
  }
  return static_cast<int>(n);
}

double resonance_center(const spectrum::SpectrumModel& model, int N) {
  require(N >= 1, ErrorCode::kDomain, "resonance: N must be >= 1");
  if (model.kind() == spectrum::SpectrumKind::kTriangularWell) return N * N * kPi * kPi / 2.0;

  // The period grows with energy for this potential; bisect T(E) = 2 pi N.
  const double target = 2.0 * kPi * N;
  const double e_min = model.potential_minimum();
  double lo = e_min + 1e-9 * std::max(1.0, std::abs(e_min));
  require(model.period(lo) < target, ErrorCode::kNumeric, "resonance: no resonance centre above the potential minimum");
  double hi = std::max(2.0 * lo, N * N * kPi * kPi / 2.0 + 1.0);
  for (int i = 0; model.period(hi) < target; ++i) {
    require(i < 200, ErrorCode::kNumeric, "resonance: could not bracket the resonance centre");
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (model.period(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double coupling(double E_m, int N, double m) {
  require(N >= 1, ErrorCode::kDomain, "coupling: N must be >= 1");
  require(m > N / 6.0, ErrorCode::kDomain, "coupling: level must exceed N/6");
  const double c = 1.0 - N / (6.0 * m);
  return -2.0 * E_m / (N * N * kPi * kPi * c * c);
}

double coupling_limit(double E_N, int N) {
  require(N >= 1, ErrorCode::kDomain, "coupling: N must be >= 1");
  return -2.0 * E_N / (N * N * kPi * kPi);
}

ResonanceContext build_context(const spectrum::SpectrumModel& model, double E_r, double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::kDomain, "resonance: lambda must be >= 0");
  ResonanceContext ctx;
  ctx.kbar = model.kbar();
  ctx.lambda = lambda;
  ctx.E_r = E_r;
  ctx.N = select_resonance(model, E_r, &ctx.tie);
  ctx.level = model.level_from_energy(E_r);
  ctx.r = std::lround(ctx.level);
  require(ctx.r >= 1, ErrorCode::kDomain, "resonance: E_r lies below the first level");
  const auto d = model.derivatives_at_energy(E_r);
  ctx.E_r1 = d.first;
  ctx.E_r2 = d.second;
  require(std::isfinite(ctx.E_r2) && ctx.E_r2 != 0.0, ErrorCode::kDegenerateSpectrum,
          "resonance: E_r'' vanishes; spectrum is locally linear");
  ctx.E_N = resonance_center(model, ctx.N);
  ctx.V = coupling_limit(ctx.E_N, ctx.N);
  ctx.mu = (ctx.E_r1 - ctx.kbar / ctx.N) / ctx.E_r2;
  ctx.q = 4.0 * lambda * ctx.V / (ctx.N * ctx.N * ctx.E_r2);
  return ctx;
}

double quasi_energy(const ResonanceContext& ctx, int k, mathieu::Method method) {
  const double nu = 2.0 * k / ctx.N;
  const double a = method == mathieu::Method::kSeries ? mathieu::char_value_series(nu, ctx.q)
                                                      : mathieu::char_value_matrix(nu, ctx.q).a;
  return ctx.N * ctx.N * ctx.E_r2 / 8.0 * a;
}

double quasi_energy_series(const ResonanceContext& ctx, double n) {
  const double nu = 2.0 * (n - static_cast<double>(ctx.r)) / ctx.N + 2.0 * ctx.mu / ctx.N;
  return ctx.N * ctx.N * ctx.E_r2 / 8.0 * mathieu::char_value_series(nu, ctx.q);
}

double classical_period(const ResonanceContext& ctx) {
  require(ctx.E_r1 > 0.0, ErrorCode::kDomain, "classical_period: E_r' must be > 0");
  return 2.0 * kPi * ctx.kbar / ctx.E_r1;
}

double t_zero(const ResonanceContext& ctx) {
  require(ctx.E_r2 != 0.0, ErrorCode::kDegenerateSpectrum, "t_zero: E_r'' vanishes");
  return 4.0 * kPi * ctx.kbar / std::abs(ctx.E_r2);
}

namespace {

RevivalPrediction make_prediction(double T0, double deficit, Formula formula) {
  RevivalPrediction p;
  p.T0 = T0;
  p.ratio = 1.0 - deficit;
  p.T_lambda = T0 * p.ratio;
  p.formula = formula;
  return p;
}

}  // namespace

RevivalPrediction revival_time_general(const ResonanceContext& ctx, double lambda, double tolerance) {
  const double T0 = t_zero(ctx);
  const double half_n2 = ctx.N * ctx.N / 4.0;
  const double denom = ctx.mu * ctx.mu - half_n2;
  if (std::abs(denom) <= tolerance * half_n2) {
    std::ostringstream msg;
    msg << "revival_time_general: mu^2 = N^2/4 (mu=" << ctx.mu << ", N=" << ctx.N << "); packet on the separatrix";
    fail(ErrorCode::kResonanceSingularity, msg.str());
  }
  const double s = lambda * ctx.V / ctx.E_r2;
  const double deficit = 0.5 * s * s * (3.0 * ctx.mu * ctx.mu + half_n2) / (denom * denom * denom);
  return make_prediction(T0, deficit, Formula::kGeneral);
}

RevivalPrediction revival_time_bouncer(double E_r, double E_N, double lambda, double kbar, double tolerance) {
  require(E_r > 0.0 && E_N > 0.0 && kbar > 0.0, ErrorCode::kDomain, "revival_time_bouncer: E_r, E_N, kbar must be > 0");
  const double alpha = std::sqrt(E_N / E_r);
  const double shift = alpha * alpha * kbar / (4.0 * E_r);
  const double gap = (1.0 - alpha) * (1.0 - alpha);
  const double denom = gap - shift * shift;
  if (std::abs(denom) <= tolerance) {
    fail(ErrorCode::kResonanceSingularity, "revival_time_bouncer: (1 - alpha)^2 = a^2; packet on the separatrix");
  }
  const double s = lambda / E_r;
  const double deficit = s * s / 8.0 * (3.0 * gap + shift * shift) / (denom * denom * denom);
  return make_prediction(16.0 * E_r * E_r / (kPi * kbar), deficit, Formula::kBouncer);
}

RevivalPrediction revival_time_bouncer_simple(double E_r, double E_N, double lambda, double kbar, double tolerance) {
  require(E_r > 0.0 && E_N > 0.0 && kbar > 0.0, ErrorCode::kDomain,
          "revival_time_bouncer_simple: E_r, E_N, kbar must be > 0");
  const double alpha = std::sqrt(E_N / E_r);
  const double gap = (1.0 - alpha) * (1.0 - alpha);
  if (gap <= tolerance) fail(ErrorCode::kResonanceSingularity, "revival_time_bouncer_simple: alpha = 1");
  const double s = lambda / E_r;
  const double deficit = 3.0 / 8.0 * s * s / (gap * gap);
  return make_prediction(16.0 * E_r * E_r / (kPi * kbar), deficit, Formula::kBouncerSimple);
}

}  // namespace revival::resonance
