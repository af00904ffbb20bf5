#pragma once

// Flat `key = value` run configuration shared by the CLI subcommands.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/analysis.hpp"
#include "core/scaling.hpp"
#include "core/spectrum.hpp"

namespace revival::config {

struct RunConfig {
  std::string spectrum = "triangular";  // triangular | numeric
  double kbar = 1.0;
  double V0 = 1.0;
  double kappa = 1.0;

  // Initial energy. `z0` (dimensionless) and `z0_lab` (meters) are accepted as
  // input and resolved into E_r = z0 + V0 e^{-kappa z0}.
  double E_r = 104.1;
  double sigma = 0.0;
  double p0 = 0.0;

  std::vector<double> lambdas{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};

  double x_min = -10.0;
  double x_max = 0.0;
  std::int64_t n_points = 4096;
  double dt = 0.0;
  double dt_divisions = 2000.0;
  double sample_interval = 0.0;
  double sample_divisions = 50.0;
  double t_end = 0.0;
  double t_end_factor = 1.45;
  double smoothing_width = 0.0;

  // Laboratory parameters, used by `units` and by z0_lab.
  double mass = 2.2e-25;
  double gravity = scaling::kDefaultGravity;
  double drive_frequency_hz = 930.0;
  double hbar = scaling::kHbar;

  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::int64_t spectrum_levels = 5;

  bool operator==(const RunConfig&) const = default;
};

/// Throws kConfiguration naming the offending line on unknown or repeated
/// keys, unparseable values and violated invariants.
RunConfig parse_config(std::string_view text);
RunConfig parse_config_file(const std::string& path);

/// Sets one key as if it had appeared in the file, then re-validates.
void apply_override(RunConfig& cfg, std::string_view key, std::string_view value);

/// Throws kConfiguration on the first violated invariant.
void validate(const RunConfig& cfg);

/// Resolved configuration in the input format; parse_config(echo(c)) == c.
std::string echo(const RunConfig& cfg);

std::vector<std::string> known_keys();

spectrum::SpectrumModel make_model(const RunConfig& cfg);
analysis::SimConfig make_sim_config(const RunConfig& cfg);
scaling::ScaledUnits make_units(const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace revival::config
