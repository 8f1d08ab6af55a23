#include <doctest.h>

#include <cmath>

#include "lowrank/errors.hpp"
#include "lowrank/readout.hpp"
#include "support.hpp"

using namespace lowrank;

namespace {

const double ns = 1e-9;
const double kappa = kTwoPi * 30e6;

Trajectory synthetic(double tau, double dt, Complex beta, double p2 = 0.0) {
  Trajectory t;
  t.times = uniform_grid(0.0, tau, dt);
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    t.beta.push_back(beta);
    t.populations.push_back({1.0 - p2, 0.0, p2});
  }
  return t;
}

}  // namespace

TEST_CASE("SNR closed forms") {
  const Trajectory g = synthetic(40 * ns, 0.2 * ns, 0.0);
  CHECK(snr(g, g, 0.6, kappa, 40 * ns) == 0.0);

  const Trajectory e = synthetic(40 * ns, 0.2 * ns, 1.0);
  const double closed = std::sqrt(2.0 * 0.6 * kappa * 40 * ns);
  CHECK(closed == doctest::Approx(3.008).epsilon(1e-3 / 3.008));
  CHECK(std::abs(snr(g, e, 0.6, kappa, 40 * ns) - 3.008) < 1e-3);
  // Restricting to a shorter tau integrates only the leading part.
  CHECK(snr(g, e, 0.6, kappa, 10 * ns) == doctest::Approx(closed / 2.0));
}

TEST_CASE("property: SNR is invariant under a common rotating phase") {
  testing::Gen gen(21);
  for (int trial = 0; trial < 10; ++trial) {
    Trajectory g = synthetic(20 * ns, 0.2 * ns, 0.0);
    Trajectory e = g;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.beta[i] = gen.complex();
      e.beta[i] = gen.complex();
    }
    const double w = kTwoPi * gen.uniform(1e9, 8e9);
    Trajectory gr = g, er = e;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Complex ph = std::exp(Complex(0, -w * g.times[i]));
      gr.beta[i] *= ph;
      er.beta[i] *= ph;
    }
    CHECK(snr(gr, er, 0.6, kappa, 20 * ns) == doctest::Approx(snr(g, e, 0.6, kappa, 20 * ns)));
  }
}

TEST_CASE("SNR rejects mismatched grids") {
  const Trajectory a = synthetic(40 * ns, 0.2 * ns, 0.0);
  const Trajectory b = synthetic(40 * ns, 0.4 * ns, 1.0);
  CHECK_THROWS_AS(snr(a, b, 0.6, kappa, 40 * ns), GridMismatch);
  CHECK_THROWS_AS(snr(a, a, 0.6, kappa, 50 * ns), GridMismatch);
}

TEST_CASE("assignment error") {
  CHECK(assignment_error(0.0, 40 * ns, 0.0).eps_a == doctest::Approx(0.5));
  const AssignmentError big = assignment_error(1e3, 60 * ns, kTwoPi * 8e3);
  CHECK(std::abs(big.eps_a / 1.51e-3 - 1.0) < 0.01);
  CHECK(big.eps_sep == 0.0);
  double last = 1.0;
  for (double s = 0.0; s < 10.0; s += 0.25) {
    const double e = assignment_error(s, 40 * ns, 0.0).eps_sep;
    CHECK(e < last);
    last = e;
  }
}

TEST_CASE("ionization") {
  const Trajectory clean = synthetic(40 * ns, 0.2 * ns, 0.0);
  CHECK(ionization(clean, clean, 40 * ns) == 0.0);
  const Trajectory leaky = synthetic(40 * ns, 0.2 * ns, 0.0, 0.03);
  CHECK(ionization(leaky, leaky, 40 * ns) == doctest::Approx(0.06));
  CHECK(ionization(leaky, clean, 40 * ns) == doctest::Approx(0.03));
}

TEST_CASE("loss") {
  CHECK(loss(1e-3, 0.0) == doctest::Approx(-3.0));
  CHECK(std::abs(loss(1.2e-3, 0.0) + 2.92) < 0.01);
  CHECK_THROWS_AS(loss(0.0, 0.0), NonPositiveArgument);
  CHECK_THROWS_AS(loss(-1e-3, 5e-4), NonPositiveArgument);
}

TEST_CASE("readout_metrics combines the pieces") {
  Trajectory g = synthetic(40 * ns, 0.2 * ns, 0.0);
  Trajectory e = synthetic(40 * ns, 0.2 * ns, 1.0, 0.01);
  g.tag = e.tag = "lra";
  g.rank = e.rank = 20;
  const ReadoutMetrics m = readout_metrics(g, e, 0.6, kappa, kTwoPi * 8e3, 40 * ns);
  CHECK(m.snr == doctest::Approx(snr(g, e, 0.6, kappa, 40 * ns)));
  CHECK(m.eps_a == doctest::Approx(m.eps_sep + m.eps_decay));
  CHECK(m.ionization == doctest::Approx(0.01));
  CHECK(m.loss == doctest::Approx(std::log10(m.eps_a + m.ionization)));
  CHECK(m.solver == "lra");
  CHECK(m.rank == 20);
}
