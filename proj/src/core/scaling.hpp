#pragma once

// Laboratory <-> dimensionless units for an atom in gravity driven at angular
// frequency omega: lengths in g/omega^2, times in 1/omega, energies in
// M g^2 / omega^2. The effective Planck constant is kbar = hbar omega^3 / (M g^2).

namespace revival::scaling {

inline constexpr double kHbar = 1.054571817e-34;  // J s
inline constexpr double kDefaultGravity = 9.8;     // m / s^2

struct ScaledUnits {
  double length_scale = 1.0;  // m
  double time_scale = 1.0;    // s
  double energy_scale = 1.0;  // J
  double kbar = 1.0;
};

/// Throws kDomain for non-positive inputs.
ScaledUnits derive_units(double mass, double gravity, double drive_frequency, double hbar = kHbar);

double to_dimensionless_position(double z_lab, const ScaledUnits& units);
double to_lab_position(double z, const ScaledUnits& units);
double to_dimensionless_time(double t_lab, const ScaledUnits& units);
double to_lab_time(double t, const ScaledUnits& units);
double to_dimensionless_energy(double e_lab, const ScaledUnits& units);

}  // namespace revival::scaling
