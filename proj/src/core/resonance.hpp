#pragma once

// Resonance-local quantities and the analytic revival-time family for a
// one-dimensional system driven by lambda V(x) sin t.
//
// All times are returned as magnitudes: for the bouncer E_r'' < 0, so the
// undriven revival time 4 pi kbar / E_r'' is negative as written and is
// reported as 4 pi kbar / |E_r''|.

#include <string_view>

#include "core/mathieu.hpp"
#include "core/spectrum.hpp"

namespace revival::resonance {

struct ResonanceContext {
  int N = 1;            // resonance order: Omega(E_r) closest to 1/N
  long r = 1;           // nearest integer level to E_r
  double level = 1.0;   // real-valued level number of E_r
  double E_r = 0.0;
  double E_r1 = 0.0;    // dE/dn at E_r
  double E_r2 = 0.0;    // d^2E/dn^2 at E_r
  double E_N = 0.0;     // resonance centre, Omega(E_N) = 1/N
  double V = 0.0;       // coupling matrix element, large-m limit
  double kbar = 1.0;
  double lambda = 0.0;
  double mu = 0.0;      // (E_r' - kbar/N) / E_r''
  double q = 0.0;       // 4 lambda V / (N^2 E_r'')
  bool tie = false;     // 1/Omega was a half-integer and the smaller N was taken
};

enum class Formula { kGeneral, kBouncer, kBouncerSimple };
std::string_view formula_name(Formula f);

struct RevivalPrediction {
  double T0 = 0.0;
  double T_lambda = 0.0;
  double ratio = 1.0;
  Formula formula = Formula::kGeneral;
};

/// N = round(1 / Omega(E_r)); half-integers round down. Throws kNoResonance when N < 1.
int select_resonance(const spectrum::SpectrumModel& model, double E_r, bool* tie = nullptr);

/// Energy with Omega(E_N) = 1/N. Closed form N^2 pi^2 / 2 for the triangular well.
double resonance_center(const spectrum::SpectrumModel& model, int N);

/// Triangular-well matrix element <m|x|m+-N> = -2 E_m / (N^2 pi^2 [1 - N/(6m)]^2).
double coupling(double E_m, int N, double m);
/// Large-m limit -2 E_N / (N^2 pi^2).
double coupling_limit(double E_N, int N);

ResonanceContext build_context(const spectrum::SpectrumModel& model, double E_r, double lambda);

/// Floquet quasi-energy (N^2 E_r'' / 8) a_nu(q) with nu = 2k/N.
double quasi_energy(const ResonanceContext& ctx, int k, mathieu::Method method = mathieu::Method::kSeries);

/// Small-q quasi-energy of level n including the detuning:
/// (N^2 E_r''/8) (nu_n^2 + q^2 / (2 (nu_n^2 - 1))), nu_n = 2 (n - r)/N + 2 mu / N.
double quasi_energy_series(const ResonanceContext& ctx, double n);

/// 2 pi kbar / E_r'.
double classical_period(const ResonanceContext& ctx);
/// 4 pi kbar / |E_r''|. Throws kDegenerateSpectrum when E_r'' = 0.
double t_zero(const ResonanceContext& ctx);

/// T0 [1 - (1/2) (lambda V / E_r'')^2 (3 mu^2 + N^2/4) / (mu^2 - N^2/4)^3].
/// Throws kResonanceSingularity when |mu^2 - N^2/4| <= tolerance * N^2/4.
RevivalPrediction revival_time_general(const ResonanceContext& ctx, double lambda, double tolerance = 1e-8);

/// Bouncer form with alpha = sqrt(E_N / E_r), a = alpha^2 kbar / (4 E_r):
/// T0 {1 - (1/8)(lambda/E_r)^2 (3(1-alpha)^2 + a^2) / [(1-alpha)^2 - a^2]^3},
/// T0 = 16 E_r^2 / (pi kbar).
RevivalPrediction revival_time_bouncer(double E_r, double E_N, double lambda, double kbar = 1.0,
                                       double tolerance = 1e-12);

/// Large-E_r limit of the bouncer form: T0 [1 - (3/8)(lambda/E_r)^2 / (1-alpha)^4].
RevivalPrediction revival_time_bouncer_simple(double E_r, double E_N, double lambda, double kbar = 1.0,
                                              double tolerance = 1e-12);

}  // namespace revival::resonance
