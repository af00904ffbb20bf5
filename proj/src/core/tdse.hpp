#pragma once

// Split-operator integration of the driven bouncer
//
//   i kbar dpsi/dt = [ -(kbar^2/2) d^2/dx^2 + x + V0 exp(-kappa x) + lambda x sin t ] psi
//
// on a uniform periodic grid. The drive is a uniform force, so the coupling
// operator is lambda * x * sin(t).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace revival::tdse {

using cplx = std::complex<double>;

struct Grid {
  double x_min = -10.0;
  double x_max = 400.0;
  std::size_t n_points = 4096;

  // Throws kConfiguration unless x_min < x_max and n_points is a power of two >= 256.
  void validate() const;
  double dx() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx(); }
  // Spectral wavenumber of FFT bin j (standard FFT ordering).
  double wavenumber(std::size_t j) const;

  bool operator==(const Grid&) const = default;
};

struct DriveSpec {
  double lambda = 0.0;
  double V0 = 1.0;
  double kappa = 1.0;
  double kbar = 1.0;

  void validate() const;
};

struct WavePacket {
  Grid grid;
  std::vector<cplx> amplitudes;
  double time = 0.0;

  // sum |psi_j|^2 dx
  double norm() const;
  double mean_position() const;
};

/// Full potential x + V0 e^{-kappa x} + lambda x sin(t).
double potential(double x, double t, const DriveSpec& drive);
/// Time-independent part x + V0 e^{-kappa x}.
double static_potential(double x, const DriveSpec& drive);

/// Normalized Gaussian exp(-(x-x0)^2/(4 sigma^2) + i p0 x / kbar).
/// Rejects packets closer than 5 sigma to either grid edge and sigma <= 2 dx.
WavePacket init_gaussian(const Grid& grid, double x0, double sigma, double p0, double kbar);

/// Expectation value of H0 = p^2/2 + x + V0 e^{-kappa x} (drive excluded).
double mean_energy(const WavePacket& psi, const DriveSpec& drive);

/// Overlap <a|b> = sum conj(a_j) b_j dx.
cplx overlap(const WavePacket& a, const WavePacket& b);

// Owns FFT plans, a work buffer and precomputed phase tables for one
// (grid, dt, drive) triple. Not shareable between threads; create one per
// evolution.
class Propagator {
 public:
  Propagator(const Grid& grid, double dt, const DriveSpec& drive);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  /// Advances psi by n_steps Strang steps of size dt starting at psi.time.
  /// Interior half-kinetic factors of consecutive steps are fused, so the
  /// cost is two FFTs per step.
  void advance(WavePacket& psi, std::size_t n_steps);

  /// <H0> using this propagator's FFT plans.
  double mean_energy(const WavePacket& psi);

  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }

 private:
  void forward();
  void backward();
  void apply_potential(double t_mid);

  Grid grid_;
  double dt_;
  DriveSpec drive_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
  cplx* work_ = nullptr;
  std::vector<cplx> static_phase_;    // exp(-i V_s(x) dt / kbar)
  std::vector<cplx> kinetic_full_;    // exp(-i kbar k^2 dt / 2) / n
  std::vector<cplx> kinetic_half_;    // exp(-i kbar k^2 dt / 4) / n
  std::vector<double> kinetic_energy_;
};

/// One Strang step: half kinetic, full potential at the midpoint time, half kinetic.
/// Throws kInstability when the norm changes by more than 1e-6.
WavePacket step(const WavePacket& psi, double dt, const DriveSpec& drive);

struct AutocorrelationSeries {
  std::vector<double> times;
  std::vector<cplx> values;
  double sample_interval = 0.0;
  double dt = 0.0;  // step actually used (sample_interval / integer)
  bool complete = true;
  std::string failure;
  double max_norm_drift = 0.0;
  // <H0> at each sample when requested, empty otherwise.
  std::vector<double> energies;
};

struct EvolveOptions {
  std::size_t norm_check_every = 1000;
  double max_norm_drift = 1e-6;
  bool record_energy = false;
  // Called after every sample with the current time; may be empty.
  std::function<void(double)> progress;
};

/// Propagates `start` to t_end and samples A(t) = <reference|psi(t)> every
/// sample_interval. dt is reduced so that sample_interval is an integer
/// number of steps. On instability the partial series is returned with
/// complete = false.
AutocorrelationSeries evolve_and_record(const WavePacket& reference, const WavePacket& start,
                                        double t_end, double dt, double sample_interval,
                                        const DriveSpec& drive, const EvolveOptions& options = {},
                                        WavePacket* final_state = nullptr);

inline AutocorrelationSeries evolve_and_record(const WavePacket& psi0, double t_end, double dt,
                                               double sample_interval, const DriveSpec& drive,
                                               const EvolveOptions& options = {}) {
  return evolve_and_record(psi0, psi0, t_end, dt, sample_interval, drive, options);
}

// Binary checkpoint, little-endian:
//   magic "RVCKPT01" (8 bytes), u64 version, u64 n_points, f64 x_min, f64 x_max, f64 time,
//   then n_points interleaved (re, im) f64 pairs.
inline constexpr std::uint64_t kCheckpointVersion = 1;
void save_checkpoint(const std::filesystem::path& path, const WavePacket& psi);
WavePacket load_checkpoint(const std::filesystem::path& path);

}  // namespace revival::tdse
