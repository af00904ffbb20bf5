#include "core/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "core/error.hpp"

namespace revival::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  std::ostringstream msg;
  msg << key << ": cannot parse '" << value << "' as " << expected;
  throw std::invalid_argument(msg.str());
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    bad_value(key, text, "a finite number");
  }
  return v;
}

template <class Int>
Int to_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) bad_value(key, text, "an integer");
  return v;
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(to_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string to_string(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
  if (text.empty()) bad_value(key, text, "a non-empty string");
  return std::string(text);
}

struct Field {
  const char* name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REVIVAL_DOUBLE_FIELD(member)                                                             \
  Field {                                                                                        \
    #member, [](RunConfig& c, std::string_view v) { c.member = to_double(#member, v); },         \
        [](const RunConfig& c) { return format_double(c.member); }                               \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"spectrum", [](RunConfig& c, std::string_view v) { c.spectrum = to_string("spectrum", v); },
       [](const RunConfig& c) { return c.spectrum; }},
      REVIVAL_DOUBLE_FIELD(kbar),
      REVIVAL_DOUBLE_FIELD(V0),
      REVIVAL_DOUBLE_FIELD(kappa),
      REVIVAL_DOUBLE_FIELD(E_r),
      REVIVAL_DOUBLE_FIELD(sigma),
      REVIVAL_DOUBLE_FIELD(p0),
      {"lambda", [](RunConfig& c, std::string_view v) { c.lambdas = to_list("lambda", v); },
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
           if (i) s += ',';
           s += format_double(c.lambdas[i]);
         }
         return s;
       }},
      REVIVAL_DOUBLE_FIELD(x_min),
      REVIVAL_DOUBLE_FIELD(x_max),
      {"n_points", [](RunConfig& c, std::string_view v) { c.n_points = to_integer<std::int64_t>("n_points", v); },
       [](const RunConfig& c) { return std::to_string(c.n_points); }},
      REVIVAL_DOUBLE_FIELD(dt),
      REVIVAL_DOUBLE_FIELD(dt_divisions),
      REVIVAL_DOUBLE_FIELD(sample_interval),
      REVIVAL_DOUBLE_FIELD(sample_divisions),
      REVIVAL_DOUBLE_FIELD(t_end),
      REVIVAL_DOUBLE_FIELD(t_end_factor),
      REVIVAL_DOUBLE_FIELD(smoothing_width),
      REVIVAL_DOUBLE_FIELD(mass),
      REVIVAL_DOUBLE_FIELD(gravity),
      REVIVAL_DOUBLE_FIELD(drive_frequency_hz),
      REVIVAL_DOUBLE_FIELD(hbar),
      {"output_dir", [](RunConfig& c, std::string_view v) { c.output_dir = to_string("output_dir", v); },
       [](const RunConfig& c) { return c.output_dir; }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = to_integer<std::uint64_t>("seed", v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"spectrum_levels",
       [](RunConfig& c, std::string_view v) { c.spectrum_levels = to_integer<std::int64_t>("spectrum_levels", v); },
       [](const RunConfig& c) { return std::to_string(c.spectrum_levels); }},
  };
  return table;
}

#undef REVIVAL_DOUBLE_FIELD

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (key == f.name) return &f;
  }
  return nullptr;
}

[[noreturn]] void config_error(int line, std::string_view what) {
  std::ostringstream msg;
  msg << "config";
  if (line > 0) msg << " line " << line;
  msg << ": " << what;
  fail(ErrorCode::kConfiguration, msg.str());
}

// A violated invariant, attributed to the key that should change.
struct Invalid {
  std::string key;
  std::string what;
};

void check(bool ok, const char* key, std::string_view what) {
  if (!ok) throw Invalid{key, std::string(what)};
}

bool power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

double energy_at_height(const RunConfig& c, double z0) { return z0 + c.V0 * std::exp(-c.kappa * z0); }

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.name);
  keys.emplace_back("z0");
  keys.emplace_back("z0_lab");
  return keys;
}

namespace {

void validate_fields(const RunConfig& c) {
  check(c.spectrum == "triangular" || c.spectrum == "numeric", "spectrum", "spectrum must be 'triangular' or 'numeric'");
  check(c.kbar > 0.0, "kbar", "kbar must be > 0");
  check(c.V0 >= 0.0, "V0", "V0 must be >= 0");
  check(c.kappa > 0.0, "kappa", "kappa must be > 0");
  check(c.sigma >= 0.0, "sigma", "sigma must be >= 0 (0 selects the default width)");
  for (double l : c.lambdas) check(std::isfinite(l) && l >= 0.0, "lambda", "lambda values must be >= 0");
  check(c.x_max == 0.0 || c.x_max > c.x_min, "x_max", "x_max must exceed x_min (or be 0 for 4 E_r)");
  check(c.n_points >= 256 && power_of_two(c.n_points), "n_points", "n_points must be a power of two >= 256");
  check(c.dt >= 0.0, "dt", "dt must be >= 0");
  check(c.dt_divisions > 0.0, "dt_divisions", "dt_divisions must be > 0");
  check(c.sample_interval >= 0.0, "sample_interval", "sample_interval must be >= 0");
  check(c.sample_divisions > 0.0, "sample_divisions", "sample_divisions must be > 0");
  check(c.t_end >= 0.0, "t_end", "t_end must be >= 0");
  check(c.t_end_factor > 0.0, "t_end_factor", "t_end_factor must be > 0");
  check(c.smoothing_width >= 0.0, "smoothing_width", "smoothing_width must be >= 0");
  check(c.mass > 0.0 && c.gravity > 0.0 && c.drive_frequency_hz > 0.0 && c.hbar > 0.0,
        "mass", "mass, gravity, drive_frequency_hz and hbar must be > 0");
  check(c.spectrum_levels >= 0, "spectrum_levels", "spectrum_levels must be >= 0");
  check(!c.output_dir.empty(), "output_dir", "output_dir must not be empty");
  const double floor = c.spectrum == "triangular" ? 0.0 : make_model(c).potential_minimum();
  check(std::isfinite(c.E_r) && c.E_r > floor, "E_r", "E_r must lie above the potential minimum");
}

}  // namespace

void validate(const RunConfig& c) {
  try {
    validate_fields(c);
  } catch (const Invalid& e) {
    config_error(0, e.what);
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::optional<std::pair<double, int>> z0;
  std::optional<std::pair<double, int>> z0_lab;
  int e_r_line = 0;

  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(line_no, "missing key");
    if (const auto it = seen.find(key); it != seen.end()) {
      config_error(line_no, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    }
    seen.emplace(key, line_no);

    try {
      if (key == "z0") {
        z0.emplace(to_double(key, value), line_no);
      } else if (key == "z0_lab") {
        z0_lab.emplace(to_double(key, value), line_no);
      } else if (const Field* f = find_field(key)) {
        f->set(cfg, value);
        if (key == "E_r") e_r_line = line_no;
      } else {
        config_error(line_no, "unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      config_error(line_no, e.what());
    }
  }

  const int given = (e_r_line > 0) + z0.has_value() + z0_lab.has_value();
  if (given > 1) {
    const int line = std::max({e_r_line, z0 ? z0->second : 0, z0_lab ? z0_lab->second : 0});
    config_error(line, "E_r, z0 and z0_lab are mutually exclusive");
  }
  if (z0) {
    cfg.E_r = energy_at_height(cfg, z0->first);
  } else if (z0_lab) {
    try {
      const auto units = make_units(cfg);
      cfg.E_r = energy_at_height(cfg, scaling::to_dimensionless_position(z0_lab->first, units));
    } catch (const Error& e) {
      config_error(z0_lab->second, e.what());
    }
  }
  try {
    validate_fields(cfg);
  } catch (const Invalid& e) {
    int line = 0;
    if (const auto it = seen.find(e.key); it != seen.end()) line = it->second;
    if (e.key == "E_r" && line == 0) line = z0 ? z0->second : z0_lab ? z0_lab->second : 0;
    config_error(line, e.what);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kConfiguration, "config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(RunConfig& cfg, std::string_view key, std::string_view value) {
  RunConfig next = cfg;
  try {
    if (key == "z0" || key == "z0_lab") {
      double z = to_double(key, value);
      if (key == "z0_lab") z = scaling::to_dimensionless_position(z, make_units(next));
      next.E_r = energy_at_height(next, z);
    } else if (const Field* f = find_field(key)) {
      f->set(next, value);
    } else {
      fail(ErrorCode::kConfiguration, "config: unknown key '" + std::string(key) + "'");
    }
  } catch (const std::invalid_argument& e) {
    fail(ErrorCode::kConfiguration, std::string("config: ") + e.what());
  }
  validate(next);
  cfg = std::move(next);
}

std::string echo(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.name;
    out += " = ";
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

spectrum::SpectrumModel make_model(const RunConfig& cfg) {
  if (cfg.spectrum == "triangular") return spectrum::SpectrumModel::triangular_well(cfg.kbar);
  return spectrum::SpectrumModel::numeric_action(cfg.kbar, cfg.V0, cfg.kappa);
}

analysis::SimConfig make_sim_config(const RunConfig& cfg) {
  analysis::SimConfig s;
  s.V0 = cfg.V0;
  s.kappa = cfg.kappa;
  s.kbar = cfg.kbar;
  s.x_min = cfg.x_min;
  s.x_max = cfg.x_max;
  s.n_points = static_cast<std::size_t>(cfg.n_points);
  s.dt = cfg.dt;
  s.dt_divisions = cfg.dt_divisions;
  s.sample_interval = cfg.sample_interval;
  s.sample_divisions = cfg.sample_divisions;
  s.sigma = cfg.sigma;
  s.p0 = cfg.p0;
  s.t_end = cfg.t_end;
  s.t_end_factor = cfg.t_end_factor;
  return s;
}

scaling::ScaledUnits make_units(const RunConfig& cfg) {
  return scaling::derive_units(cfg.mass, cfg.gravity, 2.0 * std::numbers::pi * cfg.drive_frequency_hz, cfg.hbar);
}

}  // namespace revival::config
