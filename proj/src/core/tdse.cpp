#include "core/tdse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "core/error.hpp"

namespace revival::tdse {

namespace {

// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void Grid::validate() const {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max, ErrorCode::kConfiguration,
          "grid: x_min must be below x_max");
  require(n_points >= 256 && is_power_of_two(n_points), ErrorCode::kConfiguration,
          "grid: n_points must be a power of two >= 256");
}

double Grid::wavenumber(std::size_t j) const {
  const double length = x_max - x_min;
  const auto n = static_cast<std::ptrdiff_t>(n_points);
  auto m = static_cast<std::ptrdiff_t>(j);
  if (m >= n / 2) m -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(m) / length;
}

void DriveSpec::validate() const {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::kConfiguration, "drive: lambda must be >= 0");
  require(V0 >= 0.0 && std::isfinite(V0), ErrorCode::kConfiguration, "drive: V0 must be >= 0");
  require(kappa > 0.0 && std::isfinite(kappa), ErrorCode::kConfiguration, "drive: kappa must be > 0");
  require(kbar > 0.0 && std::isfinite(kbar), ErrorCode::kConfiguration, "drive: kbar must be > 0");
}

double WavePacket::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return s * grid.dx();
}

double WavePacket::mean_position() const {
  double s = 0.0;
  for (std::size_t j = 0; j < amplitudes.size(); ++j) s += grid.x(j) * std::norm(amplitudes[j]);
  return s * grid.dx() / norm();
}

double static_potential(double x, const DriveSpec& drive) {
  return x + drive.V0 * std::exp(-drive.kappa * x);
}

double potential(double x, double t, const DriveSpec& drive) {
  return static_potential(x, drive) + drive.lambda * x * std::sin(t);
}

WavePacket init_gaussian(const Grid& grid, double x0, double sigma, double p0, double kbar) {
  grid.validate();
  require(kbar > 0.0, ErrorCode::kConfiguration, "init_gaussian: kbar must be > 0");
  require(sigma > 2.0 * grid.dx(), ErrorCode::kConfiguration,
          "init_gaussian: sigma must exceed two grid spacings");
  require(x0 >= grid.x_min + 5.0 * sigma && x0 <= grid.x_max - 5.0 * sigma, ErrorCode::kConfiguration,
          "init_gaussian: packet centre must be at least 5 sigma inside the grid");

  WavePacket psi{grid, std::vector<cplx>(grid.n_points), 0.0};
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    const double u = (x - x0) / sigma;
    // Phase measured from x0 keeps the argument small for large x.
    psi.amplitudes[j] = std::polar(std::exp(-0.25 * u * u), p0 * (x - x0) / kbar);
  }
  const double scale = 1.0 / std::sqrt(psi.norm());
  for (auto& a : psi.amplitudes) a *= scale;
  return psi;
}

cplx overlap(const WavePacket& a, const WavePacket& b) {
  require(a.grid == b.grid, ErrorCode::kInvalidArgument, "overlap: grids differ");
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < a.amplitudes.size(); ++j) s += std::conj(a.amplitudes[j]) * b.amplitudes[j];
  return s * a.grid.dx();
}

struct Propagator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

Propagator::Propagator(const Grid& grid, double dt, const DriveSpec& drive)
    : grid_(grid), dt_(dt), drive_(drive), plans_(std::make_unique<Plans>()) {
  grid_.validate();
  drive_.validate();
  require(dt > 0.0 && std::isfinite(dt), ErrorCode::kConfiguration, "propagator: dt must be > 0");

  const std::size_t n = grid_.n_points;
  work_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
  require(work_ != nullptr, ErrorCode::kNumeric, "propagator: allocation failed");
  {
    // FFTW_ESTIMATE keeps plans (and therefore rounding) reproducible run to run.
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(work_), as_fftw(work_), FFTW_FORWARD,
                                       FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(work_), as_fftw(work_), FFTW_BACKWARD,
                                        FFTW_ESTIMATE);
  }

  const double kbar = drive_.kbar;
  const double inv_n = 1.0 / static_cast<double>(n);
  static_phase_.resize(n);
  kinetic_full_.resize(n);
  kinetic_half_.resize(n);
  kinetic_energy_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    static_phase_[j] = std::polar(1.0, -static_potential(grid_.x(j), drive_) * dt_ / kbar);
    const double k = grid_.wavenumber(j);
    kinetic_energy_[j] = 0.5 * kbar * kbar * k * k;
    kinetic_full_[j] = std::polar(inv_n, -0.5 * kbar * k * k * dt_);
    kinetic_half_[j] = std::polar(inv_n, -0.25 * kbar * k * k * dt_);
  }
}

Propagator::~Propagator() {
  {
    std::lock_guard lock(planner_mutex());
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
  }
  fftw_free(work_);
}

void Propagator::forward() { fftw_execute(plans_->forward); }
void Propagator::backward() { fftw_execute(plans_->backward); }

void Propagator::apply_potential(double t_mid) {
  const std::size_t n = grid_.n_points;
  const double theta = drive_.lambda * std::sin(t_mid) * dt_ / drive_.kbar;
  if (theta == 0.0) {
    for (std::size_t j = 0; j < n; ++j) work_[j] *= static_phase_[j];
    return;
  }
  // exp(-i theta x_j) by recurrence, re-anchored every block to bound rounding growth.
  constexpr std::size_t kBlock = 64;
  const cplx ratio = std::polar(1.0, -theta * grid_.dx());
  for (std::size_t start = 0; start < n; start += kBlock) {
    cplx drive_phase = std::polar(1.0, -theta * grid_.x(start));
    const std::size_t stop = std::min(n, start + kBlock);
    for (std::size_t j = start; j < stop; ++j) {
      work_[j] *= static_phase_[j] * drive_phase;
      drive_phase *= ratio;
    }
  }
}

void Propagator::advance(WavePacket& psi, std::size_t n_steps) {
  require(psi.grid == grid_, ErrorCode::kInvalidArgument, "propagator: grid mismatch");
  if (n_steps == 0) return;
  const std::size_t n = grid_.n_points;
  std::copy(psi.amplitudes.begin(), psi.amplitudes.end(), work_);

  forward();
  for (std::size_t j = 0; j < n; ++j) work_[j] *= kinetic_half_[j];
  backward();
  for (std::size_t s = 0; s < n_steps; ++s) {
    apply_potential(psi.time + (static_cast<double>(s) + 0.5) * dt_);
    forward();
    const auto& kin = (s + 1 == n_steps) ? kinetic_half_ : kinetic_full_;
    for (std::size_t j = 0; j < n; ++j) work_[j] *= kin[j];
    backward();
  }

  std::copy(work_, work_ + n, psi.amplitudes.begin());
  psi.time += static_cast<double>(n_steps) * dt_;
}

double Propagator::mean_energy(const WavePacket& psi) {
  require(psi.grid == grid_, ErrorCode::kInvalidArgument, "propagator: grid mismatch");
  const std::size_t n = grid_.n_points;
  double norm = 0.0;
  double pot = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = std::norm(psi.amplitudes[j]);
    norm += p;
    pot += p * static_potential(grid_.x(j), drive_);
  }
  std::copy(psi.amplitudes.begin(), psi.amplitudes.end(), work_);
  forward();
  // Parseval: sum |psi_k|^2 = n sum |psi_j|^2
  double kin = 0.0;
  for (std::size_t j = 0; j < n; ++j) kin += std::norm(work_[j]) * kinetic_energy_[j];
  kin /= static_cast<double>(n);
  return (kin + pot) / norm;
}

double mean_energy(const WavePacket& psi, const DriveSpec& drive) {
  Propagator prop(psi.grid, 1.0, drive);
  return prop.mean_energy(psi);
}

WavePacket step(const WavePacket& psi, double dt, const DriveSpec& drive) {
  Propagator prop(psi.grid, dt, drive);
  WavePacket out = psi;
  const double before = psi.norm();
  prop.advance(out, 1);
  const double drift = std::abs(out.norm() - before);
  require(drift <= 1e-6 * before, ErrorCode::kInstability, "step: norm drift exceeds 1e-6");
  return out;
}

AutocorrelationSeries evolve_and_record(const WavePacket& reference, const WavePacket& start, double t_end,
                                        double dt, double sample_interval, const DriveSpec& drive,
                                        const EvolveOptions& options, WavePacket* final_state) {
  require(reference.grid == start.grid, ErrorCode::kInvalidArgument, "evolve: reference/start grid mismatch");
  require(t_end > 0.0, ErrorCode::kConfiguration, "evolve: t_end must be > 0");
  require(dt > 0.0, ErrorCode::kConfiguration, "evolve: dt must be > 0");
  require(sample_interval >= dt, ErrorCode::kConfiguration, "evolve: sample_interval must be >= dt");

  const auto steps_per_sample = static_cast<std::size_t>(std::ceil(sample_interval / dt - 1e-9));
  const double dt_used = sample_interval / static_cast<double>(steps_per_sample);
  const auto n_samples = static_cast<std::size_t>(std::floor((t_end - start.time) / sample_interval + 1e-9));

  Propagator prop(start.grid, dt_used, drive);
  WavePacket psi = start;
  const double norm0 = reference.norm();

  AutocorrelationSeries series;
  series.sample_interval = sample_interval;
  series.dt = dt_used;
  series.times.reserve(n_samples + 1);
  series.values.reserve(n_samples + 1);

  auto record = [&] {
    series.times.push_back(psi.time);
    series.values.push_back(overlap(reference, psi));
    if (options.record_energy) series.energies.push_back(prop.mean_energy(psi));
    if (options.progress) options.progress(psi.time);
  };
  record();

  // Steps are grouped so that the norm is checked at least every norm_check_every steps.
  const std::size_t check_every = std::max<std::size_t>(1, options.norm_check_every);
  std::size_t since_check = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::size_t remaining = steps_per_sample;
    while (remaining > 0) {
      const std::size_t chunk = std::min(remaining, check_every - since_check);
      prop.advance(psi, chunk);
      remaining -= chunk;
      since_check += chunk;
      if (since_check >= check_every) {
        since_check = 0;
        const double drift = std::abs(psi.norm() - norm0) / norm0;
        series.max_norm_drift = std::max(series.max_norm_drift, drift);
        if (!(drift <= options.max_norm_drift)) {
          series.complete = false;
          std::ostringstream msg;
          msg << "evolve: norm drift " << drift << " at t=" << psi.time;
          series.failure = msg.str();
          if (final_state) *final_state = psi;
          return series;
        }
      }
    }
    record();
  }
  series.max_norm_drift = std::max(series.max_norm_drift, std::abs(psi.norm() - norm0) / norm0);
  if (final_state) *final_state = std::move(psi);
  return series;
}

namespace {

constexpr std::array<char, 8> kMagic{'R', 'V', 'C', 'K', 'P', 'T', '0', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  require(static_cast<bool>(in), ErrorCode::kIo, "checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const WavePacket& psi) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "checkpoint: cannot open " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, kCheckpointVersion);
  put_u64(out, psi.grid.n_points);
  put_f64(out, psi.grid.x_min);
  put_f64(out, psi.grid.x_max);
  put_f64(out, psi.time);
  for (const auto& a : psi.amplitudes) {
    put_f64(out, a.real());
    put_f64(out, a.imag());
  }
  require(static_cast<bool>(out), ErrorCode::kIo, "checkpoint: write failed for " + path.string());
}

WavePacket load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "checkpoint: cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  require(static_cast<bool>(in) && magic == kMagic, ErrorCode::kIo, "checkpoint: bad magic");
  require(get_u64(in) == kCheckpointVersion, ErrorCode::kIo, "checkpoint: unsupported version");
  WavePacket psi;
  psi.grid.n_points = get_u64(in);
  psi.grid.x_min = get_f64(in);
  psi.grid.x_max = get_f64(in);
  psi.time = get_f64(in);
  try {
    psi.grid.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kIo, std::string("checkpoint: ") + e.what());
  }
  psi.amplitudes.resize(psi.grid.n_points);
  for (auto& a : psi.amplitudes) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    a = cplx(re, im);
  }
  return psi;
}

}  // namespace revival::tdse
