#pragma once

// Readout figures of merit computed from a (g, e) pair of trajectories.

#include <string>

#include "lowrank/dynamics.hpp"

namespace lowrank {

struct AssignmentError {
  double eps_sep = 0.0;
  double eps_decay = 0.0;
  double eps_a = 0.0;
};

struct ReadoutMetrics {
  double tau = 0.0;  // s
  double snr = 0.0;
  double eps_sep = 0.0;
  double eps_decay = 0.0;
  double eps_a = 0.0;
  double ionization = 0.0;
  double loss = 0.0;
  std::string solver;
  int rank = 0;

  double fidelity() const { return 1.0 - eps_a; }
};

/// sqrt(2 eta kappa int_0^tau |beta_e - beta_g|^2 dt), trapezoidal on the
/// shared save grid restricted to [t_0, tau]. Throws GridMismatch when the
/// grids differ or do not reach tau.
double snr(const Trajectory& g, const Trajectory& e, double eta, double kappa, double tau);

/// eps_sep = erfc(SNR/2)/2, eps_decay = tau gamma / 2.
AssignmentError assignment_error(double snr_value, double tau, double gamma);

/// (1/tau) sum_{g,e} int_0^tau sum_{k>=2} P_k dt, trapezoidal.
double ionization(const Trajectory& g, const Trajectory& e, double tau);

/// log10(eps_a + T). Throws NonPositiveArgument when the sum is not positive.
double loss(double eps_a, double ionization_penalty);

/// Full metric set; solver and rank copied from the trajectories.
ReadoutMetrics readout_metrics(const Trajectory& g, const Trajectory& e, double eta, double kappa,
                               double gamma, double tau);

}  // namespace lowrank
