#pragma once

// Logistic-smoothed drive envelopes. Times in seconds, amplitudes in rad/s.

#include <span>
#include <vector>

#include "lowrank/algebra.hpp"

namespace lowrank {

/// 1 / (1 + exp(-(t - t0) / sigma)), evaluated without overflow.
double logistic(double t, double t0, double sigma);

/// |Omega| f(t, t0, sigma) [1 - f(t, t0 + T, sigma)].
double square_envelope(double t, double amplitude, double t0, double sigma, double plateau);

/// h_1 f(t, t0, sigma) + sum_{j=1}^{n} (h_{j+1} - h_j) f(t, j tau / n, sigma),
/// with h_{n+1} = 0: ramps up around t0, switches height at every step
/// boundary and ramps back to zero around tau.
Complex stepwise_envelope(double t, std::span<const Complex> heights, double tau, double sigma,
                          double t0);

class PulseEnvelope {
 public:
  enum class Kind { square, stepwise };

  static PulseEnvelope square(double amplitude, double tau, double t0 = 3e-9, double sigma = 0.5e-9,
                              double max_amplitude = kTwoPi * 400e6);
  /// Throws StepTooNarrow when tau / n_steps < 6 sigma and InvalidArgument
  /// when a height exceeds max_amplitude.
  static PulseEnvelope stepwise(std::vector<Complex> heights, double tau, double sigma = 0.5e-9,
                                double t0 = 2.5e-9, double max_amplitude = kTwoPi * 400e6);
  static PulseEnvelope zero(double tau);

  Complex operator()(double t) const;

  Kind kind() const noexcept { return kind_; }
  double tau() const noexcept { return tau_; }
  double sigma() const noexcept { return sigma_; }
  double t0() const noexcept { return t0_; }
  double max_amplitude() const noexcept { return max_amplitude_; }
  /// Square pulses report their amplitude as a single height.
  std::span<const Complex> heights() const noexcept { return heights_; }
  double plateau() const noexcept { return plateau_; }
  double peak_height() const;

 private:
  Kind kind_ = Kind::square;
  std::vector<Complex> heights_;
  double tau_ = 0.0;
  double sigma_ = 0.5e-9;
  double t0_ = 3e-9;
  double plateau_ = 0.0;
  double max_amplitude_ = kTwoPi * 400e6;
};

}  // namespace lowrank
