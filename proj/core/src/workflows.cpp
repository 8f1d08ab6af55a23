#include "lowrank/workflows.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace fs = std::filesystem;

namespace {

std::mutex log_mutex;

template <class... Args>
void note(const WorkflowOptions& opts, const Args&... args) {
  if (!opts.log) return;
  std::ostringstream line;
  (line << ... << args);
  std::lock_guard lock(log_mutex);
  *opts.log << line.str() << '\n' << std::flush;
}

std::string tau_label(double tau) {
  std::ostringstream s;
  s << std::defaultfloat << std::setprecision(6) << tau * 1e9;
  return s.str();
}

RunSettings settings_for(const RunConfig& config, int jobs) {
  RunSettings run = config.solver;
  run.jobs = jobs > 1 ? 2 : 1;
  return run;
}

}  // namespace

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

void write_config_echo(const RunConfig& config, const fs::path& out) {
  write_atomic(out / "config.resolved", resolved_config_text(config));
}

std::vector<ReadoutMetrics> run_simulate(const RunConfig& config, const fs::path& out,
                                         const WorkflowOptions& opts) {
  write_config_echo(config, out);
  const ReadoutExperiment experiment(config.device);
  const double tau = config.taus.front();
  const PulseEnvelope pulse = config.pulse.build(tau);

  std::vector<SolverKind> solvers = config.simulate_solvers;
  if (solvers.empty()) solvers.push_back(config.solver.solver);
  const RunSettings base = settings_for(config, 1);

  std::vector<Trajectory> trajs(2 * solvers.size());
  parallel_for(trajs.size(), opts.jobs, [&](std::size_t i) {
    RunSettings run = base;
    run.solver = solvers[i / 2];
    const TransmonState which = i % 2 == 0 ? TransmonState::g : TransmonState::e;
    note(opts, "simulate: ", to_string(run.solver), which == TransmonState::g ? " g" : " e",
         " (N = ", config.device.layout.dim(), ")");
    trajs[i] = experiment.evolve(which, pulse, run, tau);
    note(opts, "simulate: ", to_string(run.solver), which == TransmonState::g ? " g" : " e",
         " done in ", trajs[i].wall_seconds, " s");
    for (const auto& w : trajs[i].warnings) note(opts, "warning: ", w);
  });

  std::vector<ReadoutMetrics> metrics;
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    const std::string name = to_string(solvers[s]);
    const Trajectory& g = trajs[2 * s];
    const Trajectory& e = trajs[2 * s + 1];
    write_atomic(out / ("traj_g_" + name + ".csv"), trajectory_csv(g));
    write_atomic(out / ("traj_e_" + name + ".csv"), trajectory_csv(e));
    const DeviceSpec& d = config.device;
    ReadoutMetrics m = readout_metrics(g, e, d.eta, d.kappa, d.gamma, tau);
    write_atomic(out / ("metrics_" + name + ".json"), metrics_json(m));
    metrics.push_back(std::move(m));
  }
  return metrics;
}

std::vector<SweepRow> run_sweep_tau(const RunConfig& config, const fs::path& out,
                                    const WorkflowOptions& opts) {
  write_config_echo(config, out);
  const ReadoutExperiment experiment(config.device);
  const RunSettings run = settings_for(config, 1);

  std::vector<SweepRow> rows(config.taus.size());
  parallel_for(rows.size(), opts.jobs, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.tau = config.taus[i];
    try {
      const PulseEnvelope pulse = config.pulse.build(row.tau);
      row.metrics = experiment.run_pair(pulse, run, row.tau).metrics;
      row.ok = true;
      write_atomic(out / ("metrics_tau" + tau_label(row.tau) + ".json"), metrics_json(row.metrics));
      note(opts, "sweep: tau = ", tau_label(row.tau), " ns, eps_a = ", row.metrics.eps_a);
    } catch (const Error& e) {
      row.error = e.kind() + ": " + e.what();
      note(opts, "sweep: tau = ", tau_label(row.tau), " ns failed: ", row.error);
    }
  });

  write_atomic(out / "sweep.csv", sweep_csv(rows));
  std::ostringstream failures;
  failures << "[";
  bool first = true;
  for (const auto& r : rows) {
    if (r.ok) continue;
    std::string body = error_json("SweepPointFailed", r.error);
    // Embed the tau into the error object.
    body.insert(1, "\n  \"tau_ns\": " + tau_label(r.tau) + ",");
    failures << (first ? "\n" : ",\n") << body;
    first = false;
  }
  failures << "]\n";
  if (!first) write_atomic(out / "sweep_failures.json", failures.str());
  return rows;
}

std::vector<BenchmarkEntry> run_benchmark(const RunConfig& config, const fs::path& out,
                                          const WorkflowOptions& opts) {
  write_config_echo(config, out);
  const ReadoutExperiment experiment(config.device);
  const BenchmarkConfig& bc = config.benchmark;
  std::vector<BenchmarkCase> cases = bc.cases;
  if (cases.empty()) {
    cases = {{SolverKind::full, config.solver.rank},
             {SolverKind::rwa_full, config.solver.rank},
             {SolverKind::lra, config.solver.rank},
             {SolverKind::rwa_lra, config.solver.rank}};
  }
  const PulseEnvelope pulse = config.pulse.build(bc.tau);

  std::vector<BenchmarkEntry> entries;
  for (const auto& c : cases) {
    RunSettings run = settings_for(config, 1);
    run.solver = c.solver;
    run.rank = c.rank;
    BenchmarkEntry entry;
    entry.solver = to_string(c.solver);
    entry.rank = is_low_rank(c.solver) ? c.rank : static_cast<int>(config.device.layout.dim());
    if (bc.warmup_span > 0.0) {
      RunSettings warm = run;
      warm.save_dt = std::min(run.save_dt, bc.warmup_span);
      experiment.evolve(TransmonState::g, pulse, warm, bc.warmup_span);
    }
    for (int r = 0; r < bc.repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const Trajectory traj = experiment.evolve(TransmonState::g, pulse, run, bc.tau);
      entry.wall_seconds.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      entry.steps = traj.stats.accepted + traj.stats.rejected;
      entry.rhs_evals = traj.stats.rhs_evals;
    }
    note(opts, "benchmark: ", entry.solver, " rank ", entry.rank, ": ", entry.best_seconds(), " s");
    entries.push_back(std::move(entry));
    write_atomic(out / "benchmark.json", benchmark_json(entries, bc.tau, config.device.layout));
  }
  return entries;
}

PulseOptimizationSetup optimization_setup(const RunConfig& config, int jobs) {
  PulseOptimizationSetup setup;
  const OptimizeConfig& oc = config.optimize;
  setup.tau = oc.tau;
  setup.n_steps = oc.n_steps;
  setup.sigma = config.pulse.sigma.value_or(0.5e-9);
  setup.t0 = config.pulse.t0.value_or(2.5e-9);
  setup.initial_amplitude = oc.initial_amplitude;
  setup.run = settings_for(config, jobs);
  setup.spsa = oc.spsa;
  return setup;
}

PulseOptimizationResult run_optimize(const RunConfig& config, const fs::path& out,
                                     const WorkflowOptions& opts) {
  write_config_echo(config, out);
  const ReadoutExperiment experiment(config.device);
  const PulseOptimizationSetup setup = optimization_setup(config, opts.jobs);
  const fs::path log_path = out / "optimization_log.csv";

  const PulseOptimizationResult result =
      optimize_pulse(experiment, setup, [&](const OptimizationRecord& rec) {
        write_atomic(log_path, optimization_log_csv(rec));
        const double last = rec.epochs.empty() ? rec.baseline_loss
                                               : std::min(rec.epochs.back().loss_plus,
                                                          rec.epochs.back().loss_minus);
        note(opts, "optimize: epoch ", rec.epochs.size(), " loss ", last, " best ", rec.best_loss);
      });
  write_atomic(out / "optimized_pulse.json", optimization_result_json(result, setup));

  if (config.optimize.validation.enabled) {
    DeviceSpec spec = config.device;
    spec.layout = config.optimize.validation.layout;
    const ReadoutExperiment big(spec);
    RunSettings run = setup.run;
    if (!is_low_rank(run.solver)) run.solver = SolverKind::lra;
    run.rank = config.optimize.validation.rank;
    note(opts, "optimize: validation run at N = ", spec.layout.dim(), ", rank ", run.rank);
    const ReadoutMetrics m = big.run_pair(result.best_pulse, run, setup.tau).metrics;
    write_atomic(out / "validation_metrics.json", metrics_json(m));
  }
  return result;
}

}  // namespace lowrank
