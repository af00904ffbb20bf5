#include "core/scaling.hpp"

#include <cmath>

#include "core/error.hpp"

namespace revival::scaling {

ScaledUnits derive_units(double mass, double gravity, double drive_frequency, double hbar) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(positive(mass), ErrorCode::kDomain, "derive_units: mass must be > 0");
  require(positive(gravity), ErrorCode::kDomain, "derive_units: gravity must be > 0");
  require(positive(drive_frequency), ErrorCode::kDomain, "derive_units: drive frequency must be > 0");
  require(positive(hbar), ErrorCode::kDomain, "derive_units: hbar must be > 0");

  const double w2 = drive_frequency * drive_frequency;
  ScaledUnits u;
  u.length_scale = gravity / w2;
  u.time_scale = 1.0 / drive_frequency;
  u.energy_scale = mass * gravity * gravity / w2;
  u.kbar = hbar * w2 * drive_frequency / (mass * gravity * gravity);
  return u;
}

double to_dimensionless_position(double z_lab, const ScaledUnits& units) { return z_lab / units.length_scale; }
double to_lab_position(double z, const ScaledUnits& units) { return z * units.length_scale; }
double to_dimensionless_time(double t_lab, const ScaledUnits& units) { return t_lab / units.time_scale; }
double to_lab_time(double t, const ScaledUnits& units) { return t * units.time_scale; }
double to_dimensionless_energy(double e_lab, const ScaledUnits& units) { return e_lab / units.energy_scale; }

}  // namespace revival::scaling
