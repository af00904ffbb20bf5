#pragma once

// Unperturbed spectrum E(n) of the bouncer as a smooth function of a real
// level number n >= 1, from the semiclassical quantization rule
//
//   I(E) = (1/pi) * integral sqrt(2 (E - V(x))) dx = kbar * (n + maslov_shift)
//
// TriangularWell uses V = x for x > 0 with a hard wall at 0 and has closed
// forms. NumericAction integrates V = x + V0 exp(-kappa x) numerically
// (V0 = 0 is treated as a hard wall at the origin).

namespace revival::spectrum {

enum class SpectrumKind { kTriangularWell, kNumericAction };

struct Derivatives {
  double first = 0.0;   // dE/dn
  double second = 0.0;  // d^2E/dn^2
};

class SpectrumModel {
 public:
  static constexpr double kTriangularMaslov = -0.25;
  // Levels are counted from 1 in both models, so the smooth-smooth rule
  // n_0 + 1/2 with n_0 = n - 1 becomes n - 1/2.
  static constexpr double kSmoothMaslov = -0.5;

  static SpectrumModel triangular_well(double kbar);
  static SpectrumModel numeric_action(double kbar, double V0, double kappa, double maslov_shift = kSmoothMaslov);

  SpectrumKind kind() const { return kind_; }
  double kbar() const { return kbar_; }
  double V0() const { return V0_; }
  double kappa() const { return kappa_; }
  double maslov_shift() const { return maslov_shift_; }

  double potential(double x) const;
  double potential_minimum() const;

  /// Action I(E) in units where the quantization rule reads I = kbar (n + shift).
  double action(double E) const;
  /// Classical angular frequency Omega(E) = 2 pi / T(E); dE/dn = kbar Omega.
  double angular_frequency(double E) const;
  /// Classical period 2 pi / Omega(E).
  double period(double E) const;

  double energy(double n) const;
  double level_from_energy(double E) const;
  Derivatives derivatives(double n) const;
  /// derivatives() evaluated at the real level of energy E.
  Derivatives derivatives_at_energy(double E) const;

 private:
  SpectrumModel(SpectrumKind kind, double kbar, double V0, double kappa, double maslov);

  struct TurningPoints {
    double left;
    double right;
    bool hard_wall;
  };
  TurningPoints turning_points(double E) const;
  double numeric_period(double E) const;
  double gap_from_turning_point(const TurningPoints& tp, double E, double t) const;
  double numeric_action(double E) const;

  SpectrumKind kind_;
  double kbar_;
  double V0_;
  double kappa_;
  double maslov_shift_;
};

}  // namespace revival::spectrum
