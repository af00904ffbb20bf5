#include <doctest.h>

#include <cmath>
#include <string>

#include "core/config.hpp"
#include "helpers.hpp"

using namespace revival;
using namespace revival::config;

namespace {

std::string message_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("a typical run file") {
  const auto cfg = parse_config(
      "# sweep at the N = 4 resonance\n"
      "kbar = 1.0\n"
      "V0 = 1\n"
      "kappa = 1\n"
      "E_r = 70.28   # release energy\n"
      "lambda = 0, 0.05, 0.1\n"
      "n_points = 2048\n"
      "output_dir = runs/n4\n");
  CHECK(cfg.E_r == 70.28);
  CHECK(cfg.lambdas == std::vector<double>{0.0, 0.05, 0.1});
  CHECK(cfg.n_points == 2048);
  CHECK(cfg.output_dir == "runs/n4");
  CHECK(cfg.spectrum == "triangular");
}

TEST_CASE("empty input gives the defaults") {
  CHECK(parse_config("") == RunConfig{});
  CHECK(parse_config("\n  # nothing\n\n") == RunConfig{});
}

TEST_CASE("errors name the line") {
  CHECK(test::error_code([] { parse_config("kbar = -1\n"); }) == ErrorCode::kConfiguration);
  CHECK(message_of("E_r = 70\nkbar = -1\n").find("line 2") != std::string::npos);
  CHECK(message_of("\nfoo = 1\n").find("line 2") != std::string::npos);
  CHECK(message_of("kbar = 1\nkbar = 2\n").find("line 2") != std::string::npos);
  CHECK(test::error_code([] { parse_config("kbar 1\n"); }) == ErrorCode::kConfiguration);
  CHECK(test::error_code([] { parse_config("kbar = abc\n"); }) == ErrorCode::kConfiguration);
  CHECK(test::error_code([] { parse_config("n_points = 1000\n"); }) == ErrorCode::kConfiguration);
  CHECK(test::error_code([] { parse_config("spectrum = exact\n"); }) == ErrorCode::kConfiguration);
  CHECK(test::error_code([] { parse_config("E_r = 0\n"); }) == ErrorCode::kConfiguration);
  CHECK(message_of("spectrum = numeric\nE_r = 0.9\n").find("line 2") != std::string::npos);
  CHECK(test::error_code([] { parse_config("lambda = 0, x\n"); }) == ErrorCode::kConfiguration);
}

TEST_CASE("echo reads back to the same configuration") {
  RunConfig cfg;
  cfg.E_r = 70.28;
  cfg.kbar = 0.1 + 0.2;
  cfg.lambdas = {0.0, 1.0 / 3.0};
  cfg.spectrum = "numeric";
  cfg.seed = 12345678901234ull;
  CHECK(parse_config(echo(cfg)) == cfg);
  CHECK(parse_config(echo(RunConfig{})) == RunConfig{});
  cfg.lambdas.clear();
  CHECK(parse_config(echo(cfg)) == cfg);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(104.1) == "104.1");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("release height resolves into the energy") {
  const auto cfg = parse_config("z0 = 103.9\n");
  CHECK(cfg.E_r == doctest::Approx(103.9 + std::exp(-103.9)).epsilon(1e-15));
  const auto soft = parse_config("z0 = 2\n");
  CHECK(soft.E_r == doctest::Approx(2.0 + std::exp(-2.0)).epsilon(1e-15));

  const auto lab = parse_config("z0_lab = 1e-3\n");
  const auto units = make_units(lab);
  const double z = 1e-3 / units.length_scale;
  CHECK(lab.E_r == doctest::Approx(z + std::exp(-z)).epsilon(1e-12));

  CHECK(test::error_code([] { parse_config("z0 = 2\nE_r = 3\n"); }) == ErrorCode::kConfiguration);
  CHECK(test::error_code([] { parse_config("z0 = 2\nz0_lab = 1e-3\n"); }) == ErrorCode::kConfiguration);
}

TEST_CASE("overrides re-validate") {
  RunConfig cfg;
  apply_override(cfg, "E_r", "70.28");
  CHECK(cfg.E_r == 70.28);
  apply_override(cfg, "lambda", "0.1");
  CHECK(cfg.lambdas == std::vector<double>{0.1});
  apply_override(cfg, "lambda", "");
  CHECK(cfg.lambdas.empty());
  CHECK(test::error_code([&] { apply_override(cfg, "kbar", "0"); }) == ErrorCode::kConfiguration);
  CHECK(test::error_code([&] { apply_override(cfg, "nope", "1"); }) == ErrorCode::kConfiguration);
}

TEST_CASE("derived objects follow the configuration") {
  auto cfg = parse_config("kbar = 0.5\nspectrum = numeric\nn_points = 1024\nx_max = 300\n");
  const auto model = make_model(cfg);
  CHECK(model.kbar() == 0.5);
  const auto sim = make_sim_config(cfg);
  CHECK(sim.n_points == 1024);
  CHECK(sim.x_max == 300.0);
  CHECK(sim.kbar == 0.5);
  const auto units = make_units(RunConfig{});
  CHECK(units.kbar == doctest::Approx(0.99584).epsilon(1e-3));
  CHECK(!known_keys().empty());
}
