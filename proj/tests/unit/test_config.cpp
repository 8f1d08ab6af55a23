#include <doctest.h>

#include <filesystem>
#include <string>

#include "lowrank/config.hpp"
#include "lowrank/errors.hpp"

using namespace lowrank;

namespace {

const char* kMinimal = R"(
layout: {n_lower: 6, n_upper: 2, n_transmon: 3}
solver: {kind: lra, rank: 4}
pulse: {shape: stepwise, heights_mhz: [[200, 10], 120, [0, -40]]}
workflow:
  tau_ns: [20, 30]
)";

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("units are converted on input") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.device.layout == SubsystemLayout{6, 2, 3});
  CHECK(c.solver.rank == 4);
  REQUIRE(c.pulse.heights.size() == 3);
  CHECK(c.pulse.heights[0].real() == doctest::Approx(kTwoPi * 200e6));
  CHECK(c.pulse.heights[0].imag() == doctest::Approx(kTwoPi * 10e6));
  CHECK(c.pulse.heights[1].imag() == 0.0);
  CHECK(c.taus.size() == 2);
  CHECK(c.taus[1] == doctest::Approx(30e-9));

  const RunConfig d = parse_config("device: {ec_mhz: 300, ej_over_ec: 40}\n");
  CHECK(d.device.e_j == doctest::Approx(40 * kTwoPi * 300e6));
}

TEST_CASE("malformed input is rejected") {
  CHECK(message_of("device: {ec_mhz: 300, colour: red}\n").find("device.colour") != std::string::npos);
  CHECK(message_of("bogus: 1\n").find("bogus") != std::string::npos);
  CHECK_FALSE(message_of("device: {ej_mhz: 16000, ej_over_ec: 51}\n").empty());
  CHECK_FALSE(message_of("solver: {kind: quantum}\n").empty());
  CHECK_FALSE(message_of("solver: {rank: fast}\n").empty());
  CHECK_FALSE(message_of("layout: {n_lower: 2, n_upper: 2, n_transmon: 2}\nsolver: {rank: 9}\n").empty());
  CHECK_FALSE(message_of("[1, 2\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("property: the resolved text round-trips") {
  const std::string once = resolved_config_text(parse_config(kMinimal));
  CHECK(resolved_config_text(parse_config(once)) == once);
  const std::string defaults = resolved_config_text(parse_config("{}"));
  CHECK(resolved_config_text(parse_config(defaults)) == defaults);
}

TEST_CASE("shipped configs load") {
  const std::filesystem::path dir = LOWRANK_CONFIG_DIR;
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".yaml") continue;
    INFO(entry.path());
    const RunConfig c = load_config(entry.path());
    CHECK_NOTHROW(c.validate());
    ++seen;
  }
  CHECK(seen >= 4);
}
