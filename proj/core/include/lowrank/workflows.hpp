#pragma once

// The four command-line workflows. Each writes into `out` (created if
// missing), starting with a config.resolved echo of the effective config.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "lowrank/config.hpp"
#include "lowrank/io.hpp"

namespace lowrank {

struct WorkflowOptions {
  int jobs = 1;
  std::ostream* log = nullptr;  // progress lines; null for silence
};

/// Runs fn(0..n-1) on up to `jobs` threads. The first exception is rethrown
/// after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

void write_config_echo(const RunConfig& config, const std::filesystem::path& out);

/// traj_{g,e}_<solver>.csv and metrics_<solver>.json at the first tau.
std::vector<ReadoutMetrics> run_simulate(const RunConfig& config, const std::filesystem::path& out,
                                         const WorkflowOptions& opts = {});

/// metrics_tau<tau>.json per readout time plus sweep.csv; failures are
/// collected in sweep_failures.json and do not stop the sweep.
std::vector<SweepRow> run_sweep_tau(const RunConfig& config, const std::filesystem::path& out,
                                    const WorkflowOptions& opts = {});

/// benchmark.json. Cases run one after another so timings do not compete.
std::vector<BenchmarkEntry> run_benchmark(const RunConfig& config,
                                          const std::filesystem::path& out,
                                          const WorkflowOptions& opts = {});

PulseOptimizationSetup optimization_setup(const RunConfig& config, int jobs = 1);

/// optimization_log.csv (rewritten every epoch), optimized_pulse.json and,
/// when enabled, validation_metrics.json for the best pulse at the
/// validation layout and rank.
PulseOptimizationResult run_optimize(const RunConfig& config, const std::filesystem::path& out,
                                     const WorkflowOptions& opts = {});

}  // namespace lowrank
