#pragma once

// One readout experiment: a device, a pulse and a solver choice, evolved
// from |g> and |e> and reduced to readout metrics.

#include <cstdint>

#include "lowrank/device.hpp"
#include "lowrank/dynamics.hpp"
#include "lowrank/readout.hpp"

namespace lowrank {

struct RunSettings {
  SolverKind solver = SolverKind::lra;
  int rank = 20;
  double eps_init = 1e-5;
  std::uint64_t seed = 7;
  double rtol = 1e-6;
  double atol = 1e-8;
  double max_step = 0.0;     // 0: tau / 200
  double save_dt = 0.2e-9;   // s
  int diagnostic_rank = 0;   // full solver p_M/p_1; 0 disables
  int jobs = 1;              // > 1 evolves g and e concurrently
};

struct PairResult {
  Trajectory g;
  Trajectory e;
  ReadoutMetrics metrics;
};

class ReadoutExperiment {
 public:
  explicit ReadoutExperiment(DeviceSpec spec);

  const DeviceSpec& spec() const noexcept { return spec_; }
  const TransmonEigensystem& transmon() const noexcept { return transmon_; }
  const NormalModes& modes() const noexcept { return modes_; }
  const std::vector<SparseOperator>& collapse_ops() const noexcept { return collapse_; }
  const Observables& observables() const noexcept { return observables_; }

  TimeDependentOperator hamiltonian(const PulseEnvelope& pulse, bool rwa) const;

  /// Evolves one initial state over [0, tau] on the settings' save grid.
  Trajectory evolve(TransmonState which, const PulseEnvelope& pulse, const RunSettings& run,
                    double tau) const;

  PairResult run_pair(const PulseEnvelope& pulse, const RunSettings& run, double tau) const;

 private:
  DeviceSpec spec_;
  TransmonEigensystem transmon_;
  NormalModes modes_;
  std::vector<SparseOperator> collapse_;
  Observables observables_;
};

}  // namespace lowrank
