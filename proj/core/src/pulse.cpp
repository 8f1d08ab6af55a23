#include "lowrank/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank {

double logistic(double t, double t0, double sigma) {
  const double x = (t - t0) / sigma;
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double square_envelope(double t, double amplitude, double t0, double sigma, double plateau) {
  return amplitude * logistic(t, t0, sigma) * (1.0 - logistic(t, t0 + plateau, sigma));
}

Complex stepwise_envelope(double t, std::span<const Complex> heights, double tau, double sigma,
                          double t0) {
  const std::size_t n = heights.size();
  if (n == 0) return {};
  Complex out = heights[0] * logistic(t, t0, sigma);
  const double width = tau / static_cast<double>(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const Complex next = j < n ? heights[j] : Complex{};
    out += (next - heights[j - 1]) * logistic(t, static_cast<double>(j) * width, sigma);
  }
  return out;
}

PulseEnvelope PulseEnvelope::square(double amplitude, double tau, double t0, double sigma,
                                    double max_amplitude) {
  if (!(sigma > 0.0)) throw InvalidArgument("pulse smoothing width must be positive");
  if (!(tau > t0)) throw InvalidArgument("square pulse needs tau > t0");
  if (std::abs(amplitude) > max_amplitude) {
    throw InvalidArgument("square pulse amplitude exceeds the amplitude bound");
  }
  PulseEnvelope p;
  p.kind_ = Kind::square;
  p.heights_ = {Complex{amplitude, 0.0}};
  p.tau_ = tau;
  p.t0_ = t0;
  p.sigma_ = sigma;
  // Ramp-down centred at tau, the same endpoint convention as stepwise pulses.
  p.plateau_ = tau - t0;
  p.max_amplitude_ = max_amplitude;
  return p;
}

PulseEnvelope PulseEnvelope::stepwise(std::vector<Complex> heights, double tau, double sigma,
                                      double t0, double max_amplitude) {
  if (heights.empty()) throw InvalidArgument("stepwise pulse needs at least one step");
  if (!(sigma > 0.0)) throw InvalidArgument("pulse smoothing width must be positive");
  if (!(tau > 0.0)) throw InvalidArgument("pulse duration must be positive");
  const double width = tau / static_cast<double>(heights.size());
  if (width < 6.0 * sigma) {
    std::ostringstream msg;
    msg << "step width " << width * 1e9 << " ns is below 6 sigma (" << 6e9 * sigma << " ns)";
    throw StepTooNarrow(msg.str());
  }
  for (const auto& h : heights) {
    if (std::abs(h) > max_amplitude * (1.0 + 1e-12)) {
      throw InvalidArgument("stepwise pulse height exceeds the amplitude bound");
    }
  }
  PulseEnvelope p;
  p.kind_ = Kind::stepwise;
  p.heights_ = std::move(heights);
  p.tau_ = tau;
  p.t0_ = t0;
  p.sigma_ = sigma;
  p.max_amplitude_ = max_amplitude;
  return p;
}

PulseEnvelope PulseEnvelope::zero(double tau) {
  PulseEnvelope p;
  p.kind_ = Kind::square;
  p.heights_ = {Complex{}};
  p.tau_ = tau;
  p.t0_ = std::min(3e-9, 0.5 * tau);
  p.plateau_ = tau - p.t0_;
  return p;
}

Complex PulseEnvelope::operator()(double t) const {
  if (kind_ == Kind::square) {
    return {square_envelope(t, heights_[0].real(), t0_, sigma_, plateau_), 0.0};
  }
  return stepwise_envelope(t, heights_, tau_, sigma_, t0_);
}

double PulseEnvelope::peak_height() const {
  double best = 0.0;
  for (const auto& h : heights_) best = std::max(best, std::abs(h));
  return best;
}

}  // namespace lowrank
