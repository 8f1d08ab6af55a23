#include "lowrank/experiment.hpp"

#include <future>

namespace lowrank {

ReadoutExperiment::ReadoutExperiment(DeviceSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  transmon_ = converged_transmon_eigensystem(spec_.e_c, spec_.e_j, spec_.layout.n_transmon,
                                             spec_.n_cut);
  modes_ = normal_modes(spec_.omega_r, spec_.omega_f, spec_.j_coupling);
  collapse_ = build_collapse_ops(spec_, transmon_, modes_);
  observables_.field = filter_field_operator(spec_, modes_);
  observables_.transmon_projectors = build_device_operators(spec_, transmon_).transmon_projectors;
}

TimeDependentOperator ReadoutExperiment::hamiltonian(const PulseEnvelope& pulse, bool rwa) const {
  return rwa ? build_rwa_hamiltonian(spec_, transmon_, modes_, pulse)
             : build_rotated_hamiltonian(spec_, transmon_, modes_, pulse);
}

Trajectory ReadoutExperiment::evolve(TransmonState which, const PulseEnvelope& pulse,
                                     const RunSettings& run, double tau) const {
  const TimeDependentOperator h = hamiltonian(pulse, uses_rwa(run.solver));
  SolverOptions opts;
  opts.rtol = run.rtol;
  opts.atol = run.atol;
  opts.max_step = run.max_step;
  opts.save_times = uniform_grid(0.0, tau, run.save_dt);
  opts.diagnostic_rank = run.diagnostic_rank;

  const StateVector psi0 = initial_state(which, spec_.layout);
  Trajectory traj;
  if (is_low_rank(run.solver)) {
    const LowRankState s0 = lra_init(psi0, run.rank, run.eps_init, run.seed);
    traj = lra_evolve(s0, h, collapse_, observables_, opts);
  } else {
    const DenseMatrix rho0 = psi0 * psi0.adjoint();
    opts.diagnostic_rank = run.diagnostic_rank;
    traj = mesolve_full(h, collapse_, rho0, observables_, opts);
  }
  traj.tag = to_string(run.solver);
  return traj;
}

PairResult ReadoutExperiment::run_pair(const PulseEnvelope& pulse, const RunSettings& run,
                                       double tau) const {
  PairResult out;
  if (run.jobs > 1) {
    auto fut = std::async(std::launch::async,
                          [&] { return evolve(TransmonState::e, pulse, run, tau); });
    out.g = evolve(TransmonState::g, pulse, run, tau);
    out.e = fut.get();
  } else {
    out.g = evolve(TransmonState::g, pulse, run, tau);
    out.e = evolve(TransmonState::e, pulse, run, tau);
  }
  out.metrics = readout_metrics(out.g, out.e, spec_.eta, spec_.kappa, spec_.gamma, tau);
  return out;
}

}  // namespace lowrank
