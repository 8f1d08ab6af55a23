#pragma once

// Output artifacts. Every writer goes through write_atomic (temp file +
// rename), so readers never observe a partially written file.
//
// Trajectory CSV:  t_ns, re_beta, im_beta, n_photon, purity, pm_over_p1,
//                  pop_t0..pop_t{Nt-1}, trace
// Metrics JSON:    {tau_ns, snr, eps_sep, eps_decay, eps_a, ionization, loss,
//                   solver, rank}
// Sweep CSV:       tau_ns, snr, eps_a, ionization
// SPSA log CSV:    epoch, loss_plus, loss_minus, loss_best, theta_1..theta_2n

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "lowrank/dynamics.hpp"
#include "lowrank/readout.hpp"
#include "lowrank/spsa.hpp"

namespace lowrank {

void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string trajectory_csv(const Trajectory& traj);
std::string metrics_json(const ReadoutMetrics& m);

struct SweepRow {
  double tau = 0.0;  // s
  bool ok = false;
  ReadoutMetrics metrics;
  std::string error;
};
/// Failed rows are written with NaN metrics.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Epoch 0 is the starting point (both loss columns hold the baseline).
std::string optimization_log_csv(const OptimizationRecord& record);

struct BenchmarkEntry {
  std::string solver;
  int rank = 0;
  std::vector<double> wall_seconds;  // one per repeat
  std::size_t steps = 0;
  std::size_t rhs_evals = 0;
  double best_seconds() const;
};
std::string benchmark_json(const std::vector<BenchmarkEntry>& entries, double tau,
                           const SubsystemLayout& layout);

std::string optimization_result_json(const PulseOptimizationResult& result,
                                     const PulseOptimizationSetup& setup);

/// {"error": kind, "message": what, ...}; `time_s` is included when finite.
std::string error_json(const std::string& kind, const std::string& message,
                       double time_s = std::numeric_limits<double>::quiet_NaN());

}  // namespace lowrank
