#pragma once

// Adaptive Dormand-Prince 5(4) integrator shared by the full and low-rank
// solvers. The state is any Eigen dense matrix; the error norm is the
// RMS of |err| / (atol + rtol * max(|y_old|, |y_new|)) taken entrywise on
// complex moduli. Steps are clamped to land exactly on every save time.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank {

struct IntegratorOptions {
  double rtol = 1e-6;
  double atol = 1e-8;
  double max_step = 0.0;      // 0: unbounded
  double initial_step = 0.0;  // 0: automatic
  double min_step_rel = 1e-13; // minimum step relative to the span
  std::size_t max_steps = 50'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  const auto scale = atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
  const double sum = (err.cwiseAbs().array() / scale).square().sum();
  return std::sqrt(sum / static_cast<double>(err.size()));
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y, dydt) from save_times.front() through every
/// save time, calling observe(t, y) at each one (including the first).
/// Throws ToleranceFailure if the step controller underflows.
template <class State, class Rhs, class Observer>
IntegratorStats integrate_dopri5(Rhs&& rhs, State y, std::span<const double> save_times,
                                 const IntegratorOptions& opts, Observer&& observe) {
  // Dormand-Prince tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegratorStats stats;
  if (save_times.empty()) return stats;
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0)) {
    throw InvalidArgument("integrator tolerances must be positive");
  }

  double t = save_times.front();
  const double t_end = save_times.back();
  observe(t, static_cast<const State&>(y));
  if (save_times.size() == 1) return stats;

  const double span = t_end - t;
  const double h_min = opts.min_step_rel * std::abs(span);
  const double h_max = opts.max_step > 0.0 ? opts.max_step : std::abs(span);

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y, y_new = y;
  rhs(t, y, k1);
  ++stats.rhs_evals;

  double h = opts.initial_step;
  if (!(h > 0.0)) {
    // Hairer-Norsett-Wanner starting step from ||y|| and ||f||.
    const double d0 = detail::error_norm(y, y, y, opts.atol, opts.rtol);
    const double d1 = detail::error_norm(k1, y, y, opts.atol, opts.rtol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * std::abs(span) : 0.01 * d0 / d1;
    h0 = std::min(h0, h_max);
    tmp = y + h0 * k1;
    rhs(t + h0, tmp, k2);
    ++stats.rhs_evals;
    const double d2 = detail::error_norm(State(k2 - k1), y, y, opts.atol, opts.rtol) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 0.2);
    h = std::min({100.0 * h0, h1, h_max});
  }

  bool last_rejected = false;
  for (std::size_t next = 1; next < save_times.size(); ++next) {
    const double target = save_times[next];
    while (t < target) {
      if (stats.accepted + stats.rejected >= opts.max_steps) {
        throw ToleranceFailure("integrator exceeded the maximum number of steps");
      }
      bool hits_target = false;
      double step = std::min(h, h_max);
      if (t + step >= target || target - (t + step) < 1e-9 * step) {
        step = target - t;
        hits_target = true;
      }

      tmp = y + step * (a21 * k1);
      rhs(t + c2 * step, tmp, k2);
      tmp = y + step * (a31 * k1 + a32 * k2);
      rhs(t + c3 * step, tmp, k3);
      tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs(t + c4 * step, tmp, k4);
      tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs(t + c5 * step, tmp, k5);
      tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs(t + step, tmp, k6);
      y_new = y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const double t_new = hits_target ? target : t + step;
      rhs(t_new, y_new, k7);
      stats.rhs_evals += 6;

      tmp = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double err = detail::error_norm(tmp, y, y_new, opts.atol, opts.rtol);

      if (err <= 1.0 && std::isfinite(err)) {
        ++stats.accepted;
        t = t_new;
        std::swap(y, y_new);
        std::swap(k1, k7);
        double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
        fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
        // A step shortened to hit a save time says little about the next one.
        if (!(hits_target && step < h)) h = step * fac;
        last_rejected = false;
      } else {
        ++stats.rejected;
        const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h = step * fac;
        last_rejected = true;
      }
      if (h < h_min) {
        std::ostringstream msg;
        msg << "step size underflow at t = " << t << " (h = " << h << ")";
        throw ToleranceFailure(msg.str());
      }
    }
    observe(t, static_cast<const State&>(y));
  }
  return stats;
}

}  // namespace lowrank
