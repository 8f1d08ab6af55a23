#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lowrank/config.hpp"
#include "lowrank/workflows.hpp"

using namespace lowrank;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "lowrank_workflow_test" / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("sweep without decay: eps_a falls with tau, and bad points are recorded") {
  RunConfig c = parse_config(R"(
device: {gamma_mhz: 0}
layout: {n_lower: 6, n_upper: 2, n_transmon: 3}
solver: {kind: lra, rank: 4, save_dt_ns: 0.5}
pulse: {shape: stepwise, heights_mhz: [150, 150, 150, 150, 150]}
workflow: {tau_ns: [10, 20, 30, 40]}
)");
  const fs::path out = fresh_dir("sweep");
  const std::vector<SweepRow> rows = run_sweep_tau(c, out, {2, nullptr});
  REQUIRE(rows.size() == 4);
  // Five steps need tau / 5 >= 6 sigma = 3 ns: the 10 ns point is rejected.
  CHECK_FALSE(rows[0].ok);
  CHECK(rows[0].error.find("StepTooNarrow") != std::string::npos);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    REQUIRE(rows[i].ok);
    CHECK(rows[i].metrics.eps_a < rows[i - 1].metrics.eps_a);
    CHECK(rows[i].metrics.eps_decay == 0.0);
  }
  CHECK(fs::exists(out / "sweep.csv"));
  CHECK(fs::exists(out / "sweep_failures.json"));
  CHECK(fs::exists(out / "metrics_tau20.json"));
  CHECK(fs::exists(out / "config.resolved"));
  CHECK_NOTHROW(parse_config(slurp(out / "config.resolved")));
}

TEST_CASE("simulate writes one trajectory per state and solver") {
  RunConfig c = parse_config(R"(
layout: {n_lower: 4, n_upper: 2, n_transmon: 2}
solver: {rank: 3, save_dt_ns: 0.5}
workflow:
  tau_ns: [6]
  simulate: {solvers: [full, rwa-lra]}
)");
  const fs::path out = fresh_dir("simulate");
  const auto metrics = run_simulate(c, out);
  REQUIRE(metrics.size() == 2);
  CHECK(metrics[0].solver == "full");
  CHECK(metrics[1].solver == "rwa-lra");
  for (const char* f : {"traj_g_full.csv", "traj_e_full.csv", "traj_g_rwa-lra.csv",
                        "traj_e_rwa-lra.csv", "metrics_full.json", "metrics_rwa-lra.json"})
    CHECK(fs::exists(out / f));
  const std::string csv = slurp(out / "traj_g_full.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 13);
  const auto j = nlohmann::json::parse(slurp(out / "metrics_rwa-lra.json"));
  CHECK(j["rank"] == 3);
}
