#include <doctest.h>

#include <cmath>

#include "lowrank/errors.hpp"
#include "lowrank/pulse.hpp"
#include "support.hpp"

using namespace lowrank;

namespace {
const double kMHz = kTwoPi * 1e6;
const double ns = 1e-9;
}  // namespace

TEST_CASE("logistic") {
  CHECK(logistic(3 * ns, 3 * ns, 0.5 * ns) == doctest::Approx(0.5));
  CHECK(logistic(1.0, 3 * ns, 0.5 * ns) == 1.0);
  CHECK(logistic(-1.0, 3 * ns, 0.5 * ns) == 0.0);
  CHECK(logistic(5.5 * ns, 3 * ns, 0.5 * ns) == doctest::Approx(0.99331).epsilon(1e-5));
}

TEST_CASE("square envelope") {
  const double amp = kMHz * 150;
  CHECK(square_envelope(3 * ns, amp, 3 * ns, 0.5 * ns, 37 * ns) ==
        doctest::Approx(0.5 * amp).epsilon(1e-9));
  for (double t = 3 * ns + 2.5 * ns; t < 40 * ns - 2.5 * ns; t += 0.7 * ns)
    CHECK(std::abs(square_envelope(t, amp, 3 * ns, 0.5 * ns, 37 * ns) / amp - 1.0) < 0.01);
  CHECK(square_envelope(0.0, amp, 3 * ns, 0.5 * ns, 37 * ns) <= 0.0025 * amp);

  const PulseEnvelope p = PulseEnvelope::square(amp, 40 * ns);
  CHECK(p.plateau() == doctest::Approx(37 * ns));
  CHECK(std::abs(p(40 * ns)) == doctest::Approx(0.5 * amp).epsilon(1e-6));
}

TEST_CASE("stepwise envelope") {
  const double h = kMHz * 150;
  const std::vector<Complex> equal(5, Complex(h, 0));
  const PulseEnvelope step = PulseEnvelope::stepwise(equal, 40 * ns, 0.5 * ns, 3 * ns);
  const PulseEnvelope square = PulseEnvelope::square(h, 40 * ns, 3 * ns, 0.5 * ns);
  for (double t = 0; t <= 40 * ns; t += 0.25 * ns)
    CHECK(std::abs(step(t) - square(t)) <= 0.01 * h);

  const std::vector<Complex> heights{{kMHz * 300, 0}, {kMHz * 100, kMHz * 50}, {kMHz * 80, 0},
                                     {0, kMHz * 40}, {kMHz * 120, 0}};
  const PulseEnvelope p = PulseEnvelope::stepwise(heights, 40 * ns);
  CHECK(std::abs(p(12 * ns) - heights[1]) <= 0.01 * std::abs(heights[1]));
  CHECK(std::abs(p(40 * ns) - 0.5 * heights[4]) <= 1e-6 * std::abs(heights[4]));
  CHECK(std::abs(p(0.0)) < 0.01 * kMHz * 300);
  CHECK(p.heights().size() == 5);
}

TEST_CASE("stepwise rejects narrow steps and large heights") {
  const std::vector<Complex> five(5, Complex(kMHz * 100, 0));
  CHECK_THROWS_AS(PulseEnvelope::stepwise(five, 10 * ns), StepTooNarrow);
  const std::vector<Complex> big{{kMHz * 500, 0}};
  CHECK_THROWS_AS(PulseEnvelope::stepwise(big, 40 * ns), InvalidArgument);
}

TEST_CASE("property: stepwise envelope is bounded by its largest height") {
  testing::Gen gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 6);
    std::vector<Complex> hs;
    double biggest = 0;
    for (int j = 0; j < n; ++j) {
      const double r = kMHz * gen.uniform(0, 400), phi = gen.uniform(0, kTwoPi);
      hs.push_back(std::polar(r, phi));
      biggest = std::max(biggest, r);
    }
    const PulseEnvelope p = PulseEnvelope::stepwise(hs, 40 * ns);
    double peak = 0;
    for (double t = 0; t <= 42 * ns; t += 0.05 * ns) peak = std::max(peak, std::abs(p(t)));
    CHECK(peak <= biggest * 1.01 + 1e-9);
  }
}

TEST_CASE("zero envelope") {
  const PulseEnvelope z = PulseEnvelope::zero(40 * ns);
  for (double t : {0.0, 10 * ns, 40 * ns}) CHECK(z(t) == Complex(0));
}
