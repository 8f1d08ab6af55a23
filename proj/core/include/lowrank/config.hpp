#pragma once

// Run configuration. The on-disk format is YAML; frequencies are entered as
// f = omega / 2 pi in MHz and times in ns, and converted to rad/s and s here.
// Unknown keys are rejected with the offending key path.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lowrank/device.hpp"
#include "lowrank/experiment.hpp"
#include "lowrank/spsa.hpp"

namespace lowrank {

struct PulseConfig {
  enum class Shape { square, stepwise, zero };
  Shape shape = Shape::square;
  double amplitude = kTwoPi * 150e6;    // square pulses, rad/s
  std::vector<Complex> heights;         // stepwise pulses, rad/s
  std::optional<double> sigma;          // s; default 0.5 ns
  std::optional<double> t0;             // s; default 3 ns (square), 2.5 ns (stepwise)
  double max_amplitude = kTwoPi * 400e6;

  /// Builds the envelope for readout time tau.
  PulseEnvelope build(double tau) const;
};

struct BenchmarkCase {
  SolverKind solver = SolverKind::lra;
  int rank = 20;
};

struct BenchmarkConfig {
  std::vector<BenchmarkCase> cases;
  double tau = 40e-9;
  int repeats = 1;
  /// Each case first runs untimed over [0, warmup_span].
  double warmup_span = 1e-9;
};

struct ValidationConfig {
  bool enabled = true;
  SubsystemLayout layout{100, 6, 6};
  int rank = 80;
};

struct OptimizeConfig {
  double tau = 40e-9;
  int n_steps = 5;
  double initial_amplitude = kTwoPi * 150e6;
  SpsaConfig spsa;
  ValidationConfig validation;
};

struct RunConfig {
  DeviceSpec device;
  PulseConfig pulse;
  RunSettings solver;
  std::vector<double> taus{40e-9};
  std::vector<SolverKind> simulate_solvers;  // empty: solver.solver only
  BenchmarkConfig benchmark;
  OptimizeConfig optimize;
  std::string output_dir = "out";

  /// Cross-field checks (device invariants, rank <= N, sane tolerances).
  void validate() const;
};

/// Throws ConfigError on malformed input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// The fully resolved configuration in the input schema, defaults included,
/// so that it can be fed back to parse_config().
std::string resolved_config_text(const RunConfig& config);

}  // namespace lowrank
