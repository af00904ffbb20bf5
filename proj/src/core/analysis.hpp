#pragma once

// Revival and classical-period extraction from autocorrelation series, the
// lambda sweep that drives the solver, and the CSV surfaces built on them.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "core/resonance.hpp"
#include "core/spectrum.hpp"
#include "core/tdse.hpp"

namespace revival::analysis {

struct RevivalEstimate {
  double T_rev = 0.0;
  double peak_value = 0.0;  // largest |A|^2 within one smoothing width of T_rev
  double t_lo = 0.0;
  double t_hi = 0.0;
  double smoothing_width = 0.0;
};

struct ExtractOptions {
  double smoothing_width = 0.0;  // <= 0: one classical period measured from the series
  double window_lo = 0.7;        // search window, fractions of T_guess
  double window_hi = 1.3;
  double coverage_lo = 0.6;      // required series coverage, fractions of T_guess
  double coverage_hi = 1.4;
  double noise_factor = 2.0;     // envelope maximum must exceed this multiple of the window median
};

/// Time of the maximum of the envelope (|A|^4 smoothed by a triangular
/// window of half-width one classical period) within the search window,
/// refined by a parabola through the three samples around the discrete maximum.
/// Throws kDetection if the series does not cover the window or no peak
/// stands above the noise floor.
RevivalEstimate extract_revival(const tdse::AutocorrelationSeries& series, double T_guess,
                                const ExtractOptions& options = {});

/// Dominant period of |A(t)|^2 over the first `window` time units (<= 0: the
/// first 8192 samples), from a Hann-windowed, zero-padded power spectrum with
/// parabolic peak refinement. Throws kDetection without a dominant peak or
/// when the window holds fewer than five periods.
double extract_classical_period(const tdse::AutocorrelationSeries& series, double window = 0.0);

/// ⟨H0⟩ averaged over consecutive windows of one classical period; returns
/// the largest deviation of any window mean from the first, relative to the
/// first. Requires series.energies.
double windowed_energy_drift(const tdse::AutocorrelationSeries& series, double classical_period);

struct SimConfig {
  double V0 = 1.0;
  double kappa = 1.0;
  double kbar = 1.0;
  double x_min = -10.0;
  double x_max = 0.0;            // <= 0: 4 E_r
  std::size_t n_points = 4096;
  double dt = 0.0;               // <= 0: T_cl / dt_divisions
  double dt_divisions = 2000.0;
  double sample_interval = 0.0;  // <= 0: T_cl / sample_divisions
  double sample_divisions = 50.0;
  double sigma = 0.0;            // <= 0: sqrt(kbar T_cl / (4 pi))
  double p0 = 0.0;
  double t_end = 0.0;            // <= 0: t_end_factor * T_guess
  double t_end_factor = 1.45;
};

// Everything needed to run one driven evolution, resolved from a SimConfig.
struct PreparedRun {
  resonance::ResonanceContext ctx;
  tdse::DriveSpec drive;
  tdse::WavePacket psi0;
  double x0 = 0.0;
  double sigma = 0.0;
  double T_cl = 0.0;
  double T_guess = 0.0;  // general formula at this lambda
  double dt = 0.0;
  double sample_interval = 0.0;
  double t_end = 0.0;
};

/// Initial position on the right branch of x + V0 e^{-kappa x} = E_r.
double release_height(double E_r, double V0, double kappa);

PreparedRun prepare_run(const spectrum::SpectrumModel& model, double E_r, double lambda, const SimConfig& config);

struct SweepRow {
  double lambda = 0.0;
  double T_numeric = 0.0;
  double T_analytic_general = 0.0;
  double T_analytic_simple = 0.0;
  double ratio_numeric = 0.0;
  double ratio_analytic_general = 0.0;
  double ratio_analytic_simple = 0.0;
  std::string status = "ok";  // "ok" or "error:<kind>"
  std::string message;        // failure detail, not written to the CSV
  double max_norm_drift = 0.0;
};

struct SweepOptions {
  int workers = 1;
  tdse::EvolveOptions evolve;
  ExtractOptions extract;
  // Invoked from worker threads when a row finishes; may be empty.
  std::function<void(const SweepRow&)> on_row;
};

/// One evolution per lambda, rows sorted by lambda. ratio_numeric is taken
/// against the numeric lambda = 0 row when the sweep contains one that
/// succeeded, otherwise against the analytic T0. Per-row failures are recorded
/// in the row and do not abort the sweep.
std::vector<SweepRow> sweep(const spectrum::SpectrumModel& model, double E_r, std::span<const double> lambdas,
                            const SimConfig& config, const SweepOptions& options = {});

struct QuadraticFit {
  double coefficient = 0.0;  // slope of (1 - ratio_numeric) against lambda^2
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t rows_used = 0;
};

/// Least squares of (1 - ratio_numeric) on lambda^2 over rows with status "ok".
/// Throws kFit with fewer than three distinct lambdas.
QuadraticFit quadratic_fit(std::span<const SweepRow> rows);

inline constexpr const char* kSweepCsvHeader =
    "lambda,T_numeric,T_analytic_general,T_analytic_simple,ratio_numeric,ratio_analytic_general,"
    "ratio_analytic_simple,status";

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);
/// Columns t, re_A, im_A, abs_A2.
void write_series_csv(std::ostream& out, const tdse::AutocorrelationSeries& series);

}  // namespace revival::analysis
