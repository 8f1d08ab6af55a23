#pragma once

// Simultaneous Perturbation Stochastic Approximation over normalized pulse
// heights. Parameters are interleaved (Re h_1, Im h_1, Re h_2, ...) / ref.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lowrank/errors.hpp"
#include "lowrank/experiment.hpp"

namespace lowrank {

using Parameters = Eigen::VectorXd;
using LossFunction = std::function<double(const Parameters&)>;

struct SpsaConfig {
  double a = 1.0;
  double c = 0.1;
  double stability = -1.0;  // "A"; negative means iterations / 10
  double alpha = 0.602;
  double gamma = 0.101;
  int iterations = 300;
  std::uint64_t seed = 1;
  double max_amplitude = kTwoPi * 400e6;  // rad/s
  double reference = kTwoPi * 150e6;      // rad/s per unit parameter
  bool clip_amplitude = true;
  bool parallel_probes = false;

  double stability_constant() const {
    return stability >= 0.0 ? stability : static_cast<double>(iterations) / 10.0;
  }
  void validate() const;
};

struct Gains {
  double a_k = 0.0;
  double c_k = 0.0;
};

/// a_k = a / (A + k)^alpha, c_k = c / k^gamma, for k >= 1.
Gains gains(int k, const SpsaConfig& config);

/// Radially clips every complex height to |h| <= max_amplitude.
Parameters project(const Parameters& theta, const SpsaConfig& config);

std::vector<Complex> heights_from_parameters(const Parameters& theta, double reference);
Parameters parameters_from_heights(const std::vector<Complex>& heights, double reference);

struct EpochRecord {
  int k = 0;
  double loss_plus = 0.0;
  double loss_minus = 0.0;
  double loss_best = 0.0;
  Parameters theta;  // iterate after this epoch's update
  Eigen::VectorXd delta;
  int evaluations = 0;
  Gains gains;
};

struct OptimizationRecord {
  Parameters theta0;
  double baseline_loss = 0.0;
  std::vector<EpochRecord> epochs;
  Parameters best_theta;
  double best_loss = 0.0;
  int total_evaluations = 0;
};

/// A loss evaluation failed; carries the probe point.
class ProbeFailure : public Error {
 public:
  ProbeFailure(Parameters probe, const std::string& what)
      : Error("ProbeFailure", what), probe_(std::move(probe)) {}
  const Parameters& probe() const noexcept { return probe_; }

 private:
  Parameters probe_;
};

/// One SPSA iteration. Draws Delta in {-1, +1}^p, evaluates the loss at the
/// projected probes theta +- c_k Delta (exactly two calls), and returns
/// project(theta - a_k g) with g = (L+ - L-) / (2 c_k) Delta.
Parameters spsa_step(const Parameters& theta, int k, const LossFunction& loss_fn,
                     const SpsaConfig& config, std::mt19937_64& rng, EpochRecord& entry);

/// Runs config.iterations steps from theta0, tracking the best evaluated
/// point (the start, every probe, and the final iterate). `on_epoch` is
/// called after every epoch, e.g. to flush logs.
OptimizationRecord spsa_minimize(const Parameters& theta0, const LossFunction& loss_fn,
                                 const SpsaConfig& config,
                                 const std::function<void(const OptimizationRecord&)>& on_epoch = {});

struct PulseOptimizationSetup {
  double tau = 40e-9;
  int n_steps = 5;
  double sigma = 0.5e-9;
  double t0 = 2.5e-9;
  double initial_amplitude = kTwoPi * 150e6;  // real square-pulse start
  RunSettings run;
  SpsaConfig spsa;
};

struct PulseOptimizationResult {
  OptimizationRecord record;
  ReadoutMetrics baseline;
  ReadoutMetrics best;
  PulseEnvelope best_pulse;
};

PulseEnvelope stepwise_from_parameters(const Parameters& theta, const PulseOptimizationSetup& setup);

/// Optimizes the stepwise heights for one readout time. Each loss
/// evaluation runs the g and e evolutions with setup.run.
PulseOptimizationResult optimize_pulse(
    const ReadoutExperiment& experiment, const PulseOptimizationSetup& setup,
    const std::function<void(const OptimizationRecord&)>& on_epoch = {});

}  // namespace lowrank
