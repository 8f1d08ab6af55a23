#include "lowrank/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

using nlohmann::json;

json number(double x) {
  return std::isfinite(x) ? json(x) : json(nullptr);
}

json metrics_object(const ReadoutMetrics& m) {
  return json{{"tau_ns", m.tau * 1e9},     {"snr", number(m.snr)},
              {"eps_sep", number(m.eps_sep)}, {"eps_decay", number(m.eps_decay)},
              {"eps_a", number(m.eps_a)},     {"ionization", number(m.ionization)},
              {"loss", number(m.loss)},       {"solver", m.solver},
              {"rank", m.rank}};
}

std::ostringstream csv_stream() {
  std::ostringstream out;
  out << std::setprecision(12);
  return out;
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  thread_local std::mt19937_64 rng{std::random_device{}()};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rng() % 1000000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("IoError", "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t levels = traj.populations.empty() ? 0 : traj.populations.front().size();
  auto out = csv_stream();
  out << "t_ns,re_beta,im_beta,n_photon,purity,pm_over_p1";
  for (std::size_t k = 0; k < levels; ++k) out << ",pop_t" << k;
  out << ",trace\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << traj.times[i] * 1e9 << ',' << traj.beta[i].real() << ',' << traj.beta[i].imag() << ','
        << traj.photons[i] << ',' << traj.purity[i] << ',';
    if (std::isfinite(traj.pm_over_p1[i])) out << traj.pm_over_p1[i];
    else out << "nan";
    for (double p : traj.populations[i]) out << ',' << p;
    out << ',' << traj.trace[i] << '\n';
  }
  return out.str();
}

std::string metrics_json(const ReadoutMetrics& m) { return metrics_object(m).dump(2) + "\n"; }

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  auto out = csv_stream();
  out << "tau_ns,snr,eps_a,ionization\n";
  for (const auto& r : rows) {
    out << r.tau * 1e9 << ',';
    if (r.ok) out << r.metrics.snr << ',' << r.metrics.eps_a << ',' << r.metrics.ionization << '\n';
    else out << "nan,nan,nan\n";
  }
  return out.str();
}

std::string optimization_log_csv(const OptimizationRecord& rec) {
  const Eigen::Index p = rec.theta0.size();
  auto out = csv_stream();
  out << "epoch,loss_plus,loss_minus,loss_best";
  for (Eigen::Index i = 1; i <= p; ++i) out << ",theta_" << i;
  out << '\n';
  out << 0 << ',' << rec.baseline_loss << ',' << rec.baseline_loss << ',' << rec.baseline_loss;
  for (Eigen::Index i = 0; i < p; ++i) out << ',' << rec.theta0(i);
  out << '\n';
  for (const auto& e : rec.epochs) {
    out << e.k << ',' << e.loss_plus << ',' << e.loss_minus << ',' << e.loss_best;
    for (Eigen::Index i = 0; i < e.theta.size(); ++i) out << ',' << e.theta(i);
    out << '\n';
  }
  return out.str();
}

double BenchmarkEntry::best_seconds() const {
  if (wall_seconds.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(wall_seconds.begin(), wall_seconds.end());
}

std::string benchmark_json(const std::vector<BenchmarkEntry>& entries, double tau,
                           const SubsystemLayout& layout) {
  double full = std::numeric_limits<double>::quiet_NaN();
  double rwa_full = std::numeric_limits<double>::quiet_NaN();
  for (const auto& e : entries) {
    if (e.solver == "full") full = e.best_seconds();
    if (e.solver == "rwa-full") rwa_full = e.best_seconds();
  }
  json cases = json::array();
  for (const auto& e : entries) {
    const double t = e.best_seconds();
    cases.push_back({{"solver", e.solver},
                     {"rank", e.rank},
                     {"wall_seconds", t},
                     {"repeats", e.wall_seconds},
                     {"steps", e.steps},
                     {"rhs_evals", e.rhs_evals},
                     {"speedup_vs_full", number(full / t)},
                     {"speedup_vs_rwa_full", number(rwa_full / t)}});
  }
  json doc{{"tau_ns", tau * 1e9},
           {"layout", {{"n_lower", layout.n_lower}, {"n_upper", layout.n_upper},
                       {"n_transmon", layout.n_transmon}}},
           {"dim", layout.dim()},
           {"timed_state", "g"},
           {"cases", cases}};
  return doc.dump(2) + "\n";
}

std::string optimization_result_json(const PulseOptimizationResult& r,
                                     const PulseOptimizationSetup& setup) {
  json heights = json::array();
  for (const auto& h : r.best_pulse.heights()) {
    heights.push_back({h.real() / (kTwoPi * 1e6), h.imag() / (kTwoPi * 1e6)});
  }
  std::vector<double> theta(r.record.best_theta.data(),
                            r.record.best_theta.data() + r.record.best_theta.size());
  json doc{{"tau_ns", setup.tau * 1e9},
           {"n_steps", setup.n_steps},
           {"sigma_ns", setup.sigma * 1e9},
           {"t0_ns", setup.t0 * 1e9},
           {"heights_mhz", heights},
           {"theta_best", theta},
           {"loss_best", r.record.best_loss},
           {"best", metrics_object(r.best)},
           {"baseline", metrics_object(r.baseline)},
           {"iterations", static_cast<int>(r.record.epochs.size())},
           {"loss_evaluations", r.record.total_evaluations},
           {"spsa_seed", setup.spsa.seed},
           {"solver_seed", setup.run.seed},
           {"solver", to_string(setup.run.solver)},
           {"rank", setup.run.rank}};
  return doc.dump(2) + "\n";
}

std::string error_json(const std::string& kind, const std::string& message, double time_s) {
  json doc{{"error", kind}, {"message", message}};
  if (std::isfinite(time_s)) doc["time_ns"] = time_s * 1e9;
  return doc.dump(2) + "\n";
}

}  // namespace lowrank
