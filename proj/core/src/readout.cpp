#include "lowrank/readout.hpp"

#include <cmath>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

// Number of leading save points covering [t_0, tau].
std::size_t points_through(const Trajectory& g, const Trajectory& e, double tau) {
  if (g.times.size() != e.times.size()) throw GridMismatch("trajectories have different lengths");
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    if (std::abs(g.times[i] - e.times[i]) > 1e-9 * std::max(1e-12, std::abs(g.times[i]))) {
      throw GridMismatch("trajectories are sampled on different time grids");
    }
  }
  if (g.times.empty()) throw GridMismatch("empty trajectory");
  const double tol = 1e-6 * (g.times.back() - g.times.front() + 1e-15);
  std::size_t n = 0;
  while (n < g.times.size() && g.times[n] <= tau + tol) ++n;
  if (n == 0 || std::abs(g.times[n - 1] - tau) > tol) {
    std::ostringstream msg;
    msg << "save grid does not contain tau = " << tau * 1e9 << " ns";
    throw GridMismatch(msg.str());
  }
  return n;
}

template <class F>
double trapezoid(const std::vector<double>& t, std::size_t n, F&& f) {
  double s = 0.0;
  for (std::size_t i = 1; i < n; ++i) s += 0.5 * (t[i] - t[i - 1]) * (f(i) + f(i - 1));
  return s;
}

}  // namespace

double snr(const Trajectory& g, const Trajectory& e, double eta, double kappa, double tau) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  const std::size_t n = points_through(g, e, tau);
  const double integral =
      trapezoid(g.times, n, [&](std::size_t i) { return std::norm(e.beta[i] - g.beta[i]); });
  return std::sqrt(2.0 * eta * kappa * integral);
}

AssignmentError assignment_error(double snr_value, double tau, double gamma) {
  if (!(snr_value >= 0.0)) throw InvalidArgument("SNR must be non-negative");
  AssignmentError out;
  out.eps_sep = 0.5 * std::erfc(0.5 * snr_value);
  out.eps_decay = 0.5 * tau * gamma;
  out.eps_a = out.eps_sep + out.eps_decay;
  return out;
}

double ionization(const Trajectory& g, const Trajectory& e, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  const std::size_t n = points_through(g, e, tau);
  const double ig = trapezoid(g.times, n, [&](std::size_t i) { return g.leaked_population(i); });
  const double ie = trapezoid(e.times, n, [&](std::size_t i) { return e.leaked_population(i); });
  return (ig + ie) / tau;
}

double loss(double eps_a, double ionization_penalty) {
  const double arg = eps_a + ionization_penalty;
  if (!(arg > 0.0)) throw NonPositiveArgument("loss needs eps_a + T > 0");
  return std::log10(arg);
}

ReadoutMetrics readout_metrics(const Trajectory& g, const Trajectory& e, double eta, double kappa,
                               double gamma, double tau) {
  ReadoutMetrics m;
  m.tau = tau;
  m.snr = snr(g, e, eta, kappa, tau);
  const AssignmentError ae = assignment_error(m.snr, tau, gamma);
  m.eps_sep = ae.eps_sep;
  m.eps_decay = ae.eps_decay;
  m.eps_a = ae.eps_a;
  m.ionization = ionization(g, e, tau);
  m.loss = loss(m.eps_a, m.ionization);
  m.solver = g.tag;
  m.rank = g.rank;
  return m;
}

}  // namespace lowrank
