#include "lowrank/spsa.hpp"

#include <cmath>
#include <future>
#include <sstream>

namespace lowrank {

void SpsaConfig::validate() const {
  if (!(a > 0.0) || !(c > 0.0)) throw InvalidArgument("SPSA gains a and c must be positive");
  if (!(stability_constant() >= 0.0)) throw InvalidArgument("SPSA stability constant A must be >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("SPSA alpha must lie in (0, 1]");
  if (!(gamma > 0.0 && gamma < alpha)) throw InvalidArgument("SPSA gamma must lie in (0, alpha)");
  if (iterations < 0) throw InvalidArgument("SPSA iteration count must be >= 0");
  if (!(reference > 0.0)) throw InvalidArgument("SPSA normalization scale must be positive");
  if (clip_amplitude && !(max_amplitude > 0.0)) throw InvalidArgument("amplitude bound must be positive");
}

Gains gains(int k, const SpsaConfig& config) {
  if (k < 1) throw InvalidArgument("SPSA gains are defined for k >= 1");
  const double kd = static_cast<double>(k);
  return {config.a / std::pow(config.stability_constant() + kd, config.alpha),
          config.c / std::pow(kd, config.gamma)};
}

Parameters project(const Parameters& theta, const SpsaConfig& config) {
  if (theta.size() % 2 != 0) throw DimensionMismatch("parameter vector must have even length");
  Parameters out = theta;
  if (!config.clip_amplitude) return out;
  const double bound = config.max_amplitude / config.reference;
  for (Eigen::Index j = 0; j < theta.size(); j += 2) {
    const double mag = std::hypot(theta(j), theta(j + 1));
    if (mag > bound) {
      out(j) *= bound / mag;
      out(j + 1) *= bound / mag;
    }
  }
  return out;
}

std::vector<Complex> heights_from_parameters(const Parameters& theta, double reference) {
  if (theta.size() % 2 != 0) throw DimensionMismatch("parameter vector must have even length");
  std::vector<Complex> h;
  for (Eigen::Index j = 0; j < theta.size(); j += 2) {
    h.emplace_back(reference * theta(j), reference * theta(j + 1));
  }
  return h;
}

Parameters parameters_from_heights(const std::vector<Complex>& heights, double reference) {
  Parameters theta(2 * static_cast<Eigen::Index>(heights.size()));
  for (std::size_t j = 0; j < heights.size(); ++j) {
    theta(2 * static_cast<Eigen::Index>(j)) = heights[j].real() / reference;
    theta(2 * static_cast<Eigen::Index>(j) + 1) = heights[j].imag() / reference;
  }
  return theta;
}

namespace {

double evaluate(const LossFunction& loss_fn, const Parameters& probe) {
  try {
    return loss_fn(probe);
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "loss evaluation failed at probe [";
    for (Eigen::Index i = 0; i < probe.size(); ++i) msg << (i ? ", " : "") << probe(i);
    msg << "]: " << e.what();
    throw ProbeFailure(probe, msg.str());
  }
}

}  // namespace

Parameters spsa_step(const Parameters& theta, int k, const LossFunction& loss_fn,
                     const SpsaConfig& config, std::mt19937_64& rng, EpochRecord& entry) {
  const Gains gk = gains(k, config);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd delta(theta.size());
  for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) = coin(rng) ? 1.0 : -1.0;

  const Parameters plus = project(theta + gk.c_k * delta, config);
  const Parameters minus = project(theta - gk.c_k * delta, config);
  double lp = 0.0;
  double lm = 0.0;
  if (config.parallel_probes) {
    auto fut = std::async(std::launch::async, [&] { return evaluate(loss_fn, minus); });
    lp = evaluate(loss_fn, plus);
    lm = fut.get();
  } else {
    lp = evaluate(loss_fn, plus);
    lm = evaluate(loss_fn, minus);
  }

  const Eigen::VectorXd grad = ((lp - lm) / (2.0 * gk.c_k)) * delta;
  entry.k = k;
  entry.loss_plus = lp;
  entry.loss_minus = lm;
  entry.delta = delta;
  entry.evaluations = 2;
  entry.gains = gk;
  entry.theta = project(theta - gk.a_k * grad, config);
  return entry.theta;
}

OptimizationRecord spsa_minimize(const Parameters& theta0, const LossFunction& loss_fn,
                                 const SpsaConfig& config,
                                 const std::function<void(const OptimizationRecord&)>& on_epoch) {
  config.validate();
  OptimizationRecord rec;
  rec.theta0 = project(theta0, config);
  rec.baseline_loss = evaluate(loss_fn, rec.theta0);
  rec.best_loss = rec.baseline_loss;
  rec.best_theta = rec.theta0;
  rec.total_evaluations = 1;
  if (on_epoch) on_epoch(rec);

  std::mt19937_64 rng(config.seed);
  Parameters theta = rec.theta0;
  for (int k = 1; k <= config.iterations; ++k) {
    EpochRecord entry;
    const Gains gk = gains(k, config);
    const Parameters prev = theta;
    theta = spsa_step(theta, k, loss_fn, config, rng, entry);
    rec.total_evaluations += entry.evaluations;
    // Probes are the only points evaluated inside the loop.
    Eigen::VectorXd delta = entry.delta;
    if (entry.loss_plus < rec.best_loss) {
      rec.best_loss = entry.loss_plus;
      rec.best_theta = project(prev + gk.c_k * delta, config);
    }
    if (entry.loss_minus < rec.best_loss) {
      rec.best_loss = entry.loss_minus;
      rec.best_theta = project(prev - gk.c_k * delta, config);
    }
    entry.loss_best = rec.best_loss;
    rec.epochs.push_back(std::move(entry));
    if (on_epoch) on_epoch(rec);
  }

  if (config.iterations > 0) {
    const double final_loss = evaluate(loss_fn, theta);
    ++rec.total_evaluations;
    if (final_loss < rec.best_loss) {
      rec.best_loss = final_loss;
      rec.best_theta = theta;
      rec.epochs.back().loss_best = final_loss;
    }
  }
  return rec;
}

PulseEnvelope stepwise_from_parameters(const Parameters& theta,
                                       const PulseOptimizationSetup& setup) {
  return PulseEnvelope::stepwise(heights_from_parameters(theta, setup.spsa.reference), setup.tau,
                                 setup.sigma, setup.t0,
                                 setup.spsa.clip_amplitude ? setup.spsa.max_amplitude
                                                           : std::numeric_limits<double>::infinity());
}

PulseOptimizationResult optimize_pulse(
    const ReadoutExperiment& experiment, const PulseOptimizationSetup& setup,
    const std::function<void(const OptimizationRecord&)>& on_epoch) {
  if (setup.n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
  if (!(setup.tau > 0.0)) throw InvalidArgument("tau must be positive");
  setup.spsa.validate();

  std::vector<Complex> start(static_cast<std::size_t>(setup.n_steps),
                             Complex{setup.initial_amplitude, 0.0});
  const Parameters theta0 = parameters_from_heights(start, setup.spsa.reference);

  std::mutex mu;
  std::vector<std::pair<Parameters, ReadoutMetrics>> seen;
  const LossFunction fn = [&](const Parameters& theta) {
    const PulseEnvelope pulse = stepwise_from_parameters(theta, setup);
    const PairResult pr = experiment.run_pair(pulse, setup.run, setup.tau);
    std::lock_guard lock(mu);
    seen.emplace_back(theta, pr.metrics);
    return pr.metrics.loss;
  };

  PulseOptimizationResult out;
  out.record = spsa_minimize(theta0, fn, setup.spsa, on_epoch);
  auto metrics_of = [&](const Parameters& theta) {
    for (const auto& [p, m] : seen) {
      if (p.size() == theta.size() && (p - theta).cwiseAbs().maxCoeff() == 0.0) return m;
    }
    return experiment.run_pair(stepwise_from_parameters(theta, setup), setup.run, setup.tau).metrics;
  };
  out.baseline = metrics_of(out.record.theta0);
  out.best = metrics_of(out.record.best_theta);
  out.best_pulse = stepwise_from_parameters(out.record.best_theta, setup);
  return out;
}

}  // namespace lowrank
