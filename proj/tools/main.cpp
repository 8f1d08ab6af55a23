#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lowrank/config.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/io.hpp"
#include "lowrank/workflows.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

struct Overrides {
  std::string config;
  std::string out;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::optional<int> rank;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "YAML run configuration")->required();
  cmd->add_option("--out", o.out, "output directory (overrides output.dir)");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "solver and SPSA seed");
  cmd->add_option("--solver", o.solver, "full | lra | rwa-full | rwa-lra");
  cmd->add_option("--rank", o.rank, "low-rank M")->check(CLI::PositiveNumber);
}

lowrank::RunConfig resolve(const Overrides& o) {
  lowrank::RunConfig cfg = lowrank::load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) {
    cfg.solver.seed = *o.seed;
    cfg.optimize.spsa.seed = *o.seed;
  }
  if (o.solver) {
    try {
      cfg.solver.solver = lowrank::parse_solver_kind(*o.solver);
    } catch (const lowrank::Error& e) {
      throw lowrank::ConfigError(std::string("--solver: ") + e.what());
    }
    cfg.simulate_solvers.clear();
  }
  if (o.rank) cfg.solver.rank = *o.rank;
  cfg.validate();
  return cfg;
}

void write_error(const std::filesystem::path& out, const std::string& kind, const std::string& what,
                 double time_s) {
  try {
    lowrank::write_atomic(out / "error.json", lowrank::error_json(kind, what, time_s));
  } catch (const std::exception&) {
    // Reported on stderr already.
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank Lindblad solver and readout pulse optimizer"};
  app.require_subcommand(1);
  Overrides o;
  CLI::App* simulate = app.add_subcommand("simulate", "evolve |g> and |e>, write trajectories and metrics");
  CLI::App* sweep = app.add_subcommand("sweep-tau", "readout metrics over the workflow.tau_ns list");
  CLI::App* bench = app.add_subcommand("benchmark", "wall-clock comparison of solver variants");
  CLI::App* optimize = app.add_subcommand("optimize", "SPSA optimization of a stepwise pulse");
  for (CLI::App* cmd : {simulate, sweep, bench, optimize}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  lowrank::RunConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const lowrank::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const std::filesystem::path out = cfg.output_dir;
  lowrank::WorkflowOptions opts;
  opts.jobs = o.jobs;
  opts.log = &std::cerr;
  try {
    if (simulate->parsed()) {
      for (const auto& m : lowrank::run_simulate(cfg, out, opts)) {
        std::cout << m.solver << ": snr " << m.snr << ", eps_a " << m.eps_a << ", ionization "
                  << m.ionization << ", loss " << m.loss << '\n';
      }
    } else if (sweep->parsed()) {
      const auto rows = lowrank::run_sweep_tau(cfg, out, opts);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.ok ? 0 : 1;
      std::cout << rows.size() - failed << " of " << rows.size() << " readout times succeeded\n";
      if (failed == rows.size()) return kSolverError;
    } else if (bench->parsed()) {
      for (const auto& e : lowrank::run_benchmark(cfg, out, opts)) {
        std::cout << e.solver << " (rank " << e.rank << "): " << e.best_seconds() << " s\n";
      }
    } else if (optimize->parsed()) {
      const auto r = lowrank::run_optimize(cfg, out, opts);
      std::cout << "baseline loss " << r.record.baseline_loss << ", best loss "
                << r.record.best_loss << ", eps_a " << r.best.eps_a << '\n';
    }
  } catch (const lowrank::RankDeficientAt& e) {
    std::cerr << e.kind() << " at t = " << e.time() * 1e9 << " ns: " << e.what() << '\n';
    write_error(out, e.kind(), e.what(), e.time());
    return kSolverError;
  } catch (const lowrank::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const lowrank::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << '\n';
    write_error(out, e.kind(), e.what(), std::numeric_limits<double>::quiet_NaN());
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    write_error(out, "InternalError", e.what(), std::numeric_limits<double>::quiet_NaN());
    return kSolverError;
  }
  return 0;
}
