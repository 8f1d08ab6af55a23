#include <doctest.h>

#include <cmath>

#include "lowrank/dynamics.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/experiment.hpp"
#include "support.hpp"

using namespace lowrank;

namespace {

const double kMHz = kTwoPi * 1e6;
const double ns = 1e-9;

TimeDependentOperator constant_operator(const SparseOperator& h) { return {h, {}}; }

SolverOptions grid(double t_end, double dt, double rtol = 1e-8, double atol = 1e-10) {
  SolverOptions o;
  o.save_times = uniform_grid(0.0, t_end, dt);
  o.rtol = rtol;
  o.atol = atol;
  return o;
}

// One decaying mode, ten levels: the canonical amplitude-damping problem.
struct Damping {
  double kappa = 1.0;
  SparseOperator a = destroy(2);
  std::vector<SparseOperator> ls;
  Observables obs;
  explicit Damping(int dim) : a(destroy(dim)) {
    ls.push_back(std::sqrt(kappa) * a);
    obs.field = a;
  }
};

struct Mini {
  ReadoutExperiment exp;
  PulseEnvelope pulse;
  explicit Mini(SubsystemLayout l, double tau = 10 * ns)
      : exp([&] {
          DeviceSpec s;
          s.layout = l;
          return s;
        }()),
        pulse(PulseEnvelope::square(kMHz * 150, tau)) {}
};

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

double rel_err(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / std::max(den, 1e-300);
}

}  // namespace

TEST_CASE("uniform grid") {
  const auto g = uniform_grid(0.0, 1.0, 0.3);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g.size() == 5);
  CHECK(uniform_grid(0.0, 40 * ns, 0.2 * ns).size() == 201);
}

TEST_CASE("no Hamiltonian, no dissipation: the state is frozen") {
  testing::Gen gen(1);
  const DenseMatrix psi = gen.dense(5, 1).normalized();
  const DenseMatrix rho0 = psi * psi.adjoint();
  Observables obs;
  obs.field = destroy(5);
  const Trajectory full = mesolve_full(constant_operator(SparseOperator(5, 5)), {}, rho0, obs,
                                       grid(1.0, 0.25));
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(std::abs(full.beta[i] - full.beta[0]) < 1e-14);
    CHECK(full.purity[i] == doctest::Approx(1.0));
  }
  const LowRankState s = lra_init(psi.col(0), 3, 1e-5, 4);
  const Trajectory lra =
      lra_evolve(s, constant_operator(SparseOperator(5, 5)), {}, obs, grid(1.0, 0.25));
  for (std::size_t i = 0; i < lra.size(); ++i) CHECK(std::abs(lra.beta[i] - lra.beta[0]) < 1e-14);
}

TEST_CASE("amplitude damping: <n>(kappa t = 1) = 1/e") {
  const Damping d(2);
  StateVector one = StateVector::Zero(2);
  one(1) = 1.0;
  const SolverOptions o = grid(1.0, 0.1);

  const Trajectory full =
      mesolve_full(constant_operator(SparseOperator(2, 2)), d.ls, one * one.adjoint(), d.obs, o);
  CHECK(std::abs(full.photons.back() - 0.3679) < 1e-4);
  CHECK(std::abs(full.photons.back() - std::exp(-1.0)) < 1e-6);

  const LowRankState s = lra_init(one, 2, 1e-9, 3);
  const Trajectory lra = lra_evolve(s, constant_operator(SparseOperator(2, 2)), d.ls, d.obs, o);
  CHECK(std::abs(lra.photons.back() - 0.3679) < 1e-4);

  // Same initial mixture in both representations: agreement to 1e-6.
  const Trajectory ref =
      mesolve_full(constant_operator(SparseOperator(2, 2)), d.ls, s.m * s.m.adjoint(), d.obs, o);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(lra.photons[i] - ref.photons[i]) < 1e-6);
}

TEST_CASE("lra_init") {
  testing::Gen gen(6);
  const StateVector psi = gen.dense(30, 1).col(0).normalized();
  const LowRankState one = lra_init(psi, 1, 1e-5, 1);
  CHECK(testing::max_abs(one.m - psi) == 0.0);

  const LowRankState s = lra_init(psi, 8, 1e-5, 1);
  const DenseMatrix g = s.m.adjoint() * s.m;
  CHECK(std::abs(g.trace().real() - 1.0) < 1e-12);
  DenseMatrix off = g;
  off.diagonal().setZero();
  CHECK(testing::max_abs(off) < 1e-12);
  CHECK(testing::max_abs(s.m.col(0) - std::sqrt(1.0 - 7e-5) * psi) < 1e-15);
  for (int j = 1; j < 8; ++j) CHECK(s.m.col(j).squaredNorm() == doctest::Approx(1e-5).epsilon(1e-10));

  CHECK(testing::max_abs(lra_init(psi, 8, 1e-5, 1).m - s.m) == 0.0);
  CHECK(testing::max_abs(lra_init(psi, 8, 1e-5, 2).m - s.m) > 0.0);
  CHECK_THROWS_AS(lra_init(psi, 31, 1e-5, 1), RankExceedsDim);
}

TEST_CASE("nosse_rhs without dissipation is Schroedinger propagation") {
  testing::Gen gen(9);
  const SparseOperator h = gen.sparse(8, 3);
  const SparseOperator herm = 0.5 * (h + SparseOperator(h.adjoint()));
  const DenseMatrix m = gen.dense(8, 3);
  CHECK(testing::max_abs(nosse_rhs(m, herm, {}) - (-kI) * (herm * m)) < 1e-12);
}

TEST_CASE("property: NOSSE closure identity at full rank") {
  testing::Gen gen(77);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 6;
    std::vector<SparseOperator> ls{gen.sparse(n, 2), gen.sparse(n, 3)};
    const DenseMatrix m = gen.dense(n, n);
    const DenseMatrix o = nosse_dissipator(m, ls);
    const DenseMatrix lhs = o * m.adjoint() + m * o.adjoint();
    const DenseMatrix rhs = lindblad_dissipator(m * m.adjoint(), ls);
    CHECK(testing::max_abs(lhs - rhs) < 1e-10 * (1.0 + testing::max_abs(rhs)));
  }
}

TEST_CASE("nosse_rhs propagates rank deficiency") {
  DenseMatrix m = DenseMatrix::Zero(4, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 1.0;
  std::vector<SparseOperator> ls{destroy(4)};
  CHECK_THROWS_AS(nosse_rhs(m, SparseOperator(4, 4), ls), RankDeficient);
}

TEST_CASE("purity") {
  StateVector psi = StateVector::Zero(4);
  psi(2) = 1.0;
  CHECK(purity_full(psi * psi.adjoint()) == doctest::Approx(1.0));
  CHECK(purity_low_rank(psi) == doctest::Approx(1.0));
  CHECK(purity_full(DenseMatrix::Identity(4, 4) * 0.25) == doctest::Approx(0.25));
  CHECK(purity_low_rank(DenseMatrix::Identity(4, 4) * 0.5) == doctest::Approx(0.25));
  const RealVector p = ensemble_probabilities(DenseMatrix::Identity(3, 3));
  CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("full solver invariants on the miniature device") {
  const Mini mini({3, 2, 2});
  const auto h = mini.exp.hamiltonian(mini.pulse, false);
  const StateVector psi = initial_state(TransmonState::e, mini.exp.spec().layout);
  SolverOptions o = grid(10 * ns, 0.5 * ns);
  o.diagnostic_rank = 4;
  const Trajectory t =
      mesolve_full(h, mini.exp.collapse_ops(), psi * psi.adjoint(), mini.exp.observables(), o);
  for (double tr : t.trace) CHECK(std::abs(tr - 1.0) < 1e-8);
  CHECK(t.photons.back() > 0.1);
  for (double p : t.pm_over_p1) CHECK(p >= -1e-8);
}

TEST_CASE("miniature device: LRA at M = N matches the full solver") {
  const Mini mini({3, 2, 2});
  const auto h = mini.exp.hamiltonian(mini.pulse, false);
  const auto& ls = mini.exp.collapse_ops();
  const auto& obs = mini.exp.observables();
  const StateVector psi = initial_state(TransmonState::e, mini.exp.spec().layout);
  const SolverOptions o = grid(10 * ns, 0.5 * ns);
  const LowRankState s = lra_init(psi, 12, 1e-5, 5);
  const Trajectory lra = lra_evolve(s, h, ls, obs, o);
  const Trajectory full = mesolve_full(h, ls, s.m * s.m.adjoint(), obs, o);
  CHECK(rel_err(lra.beta, full.beta) < 1e-6);
  CHECK(rel_err(lra.photons, full.photons) < 1e-6);
  CHECK(rel_err(lra.purity, full.purity) < 1e-6);
  CHECK(rel_err(lra.trace, full.trace) < 1e-6);
  for (std::size_t i = 0; i < lra.size(); ++i)
    for (std::size_t k = 0; k < lra.populations[i].size(); ++k)
      CHECK(std::abs(lra.populations[i][k] - full.populations[i][k]) < 1e-6);
}

namespace {

struct RankStudy {
  Trajectory full;
  std::vector<std::pair<int, Trajectory>> lra;
};

const RankStudy& rank_study() {
  static const RankStudy study = [] {
    const Mini mini({4, 3, 3}, 20 * ns);
    const auto h = mini.exp.hamiltonian(mini.pulse, false);
    const auto& ls = mini.exp.collapse_ops();
    const auto& obs = mini.exp.observables();
    const StateVector psi = initial_state(TransmonState::g, mini.exp.spec().layout);
    const SolverOptions o = grid(20 * ns, 0.5 * ns, 1e-7, 1e-9);
    RankStudy s;
    s.full = mesolve_full(h, ls, psi * psi.adjoint(), obs, o);
    for (int m : {4, 8, 16, 32}) s.lra.emplace_back(m, lra_evolve(lra_init(psi, m, 1e-5, 8), h, ls, obs, o));
    return s;
  }();
  return study;
}

}  // namespace

TEST_CASE("miniature device: LRA error shrinks with rank") {
  const RankStudy& s = rank_study();
  std::vector<double> n_err, p_err;
  for (const auto& [m, t] : s.lra) {
    n_err.push_back(std::abs(t.photons.back() - s.full.photons.back()) / s.full.photons.back());
    p_err.push_back(rel_err(t.purity, s.full.purity));
    INFO("M = " << m << ": photon error " << n_err.back() << ", purity error " << p_err.back());
    CHECK(true);
  }
  CHECK(n_err.back() < n_err.front());
  CHECK(p_err.back() < p_err.front());
}

// The eigenvalue-truncation argument suggests the LRA never reports a purer
// state than the full solver. On this device that only holds near full rank:
// at M = 4 the LRA purity is higher by up to 0.15.
TEST_CASE("LRA purity does not exceed the full purity" * doctest::may_fail()) {
  const RankStudy& s = rank_study();
  for (const auto& [m, t] : s.lra) {
    double excess = -1.0;
    for (std::size_t i = 0; i < t.size(); ++i) excess = std::max(excess, t.purity[i] - s.full.purity[i]);
    INFO("M = " << m << ": max(purity_lra - purity_full) = " << excess);
    CHECK(excess <= 1e-6);
  }
}

TEST_CASE("halving eps_init barely moves the final observables") {
  const Mini mini({3, 2, 3}, 5 * ns);
  const auto h = mini.exp.hamiltonian(mini.pulse, false);
  const SolverOptions o = grid(5 * ns, 0.5 * ns);
  for (TransmonState which : {TransmonState::g, TransmonState::e}) {
    const StateVector psi = initial_state(which, mini.exp.spec().layout);
    auto run = [&](double eps) {
      return lra_evolve(lra_init(psi, 6, eps, 2), h, mini.exp.collapse_ops(), mini.exp.observables(), o);
    };
    const Trajectory a = run(1e-5), b = run(0.5e-5);
    const double shift = std::abs(a.beta.back() - b.beta.back()) / std::abs(b.beta.back());
    CHECK(shift < 1e-4);
    CHECK(std::abs(a.photons.back() / b.photons.back() - 1.0) < 1e-4);
  }
}

TEST_CASE("halving the tolerance changes observables by less than ten tolerances") {
  const Mini mini({3, 2, 3});
  const auto h = mini.exp.hamiltonian(mini.pulse, false);
  const StateVector psi = initial_state(TransmonState::g, mini.exp.spec().layout);
  const DenseMatrix rho0 = psi * psi.adjoint();
  const double rtol = 1e-6;
  const Trajectory a = mesolve_full(h, mini.exp.collapse_ops(), rho0, mini.exp.observables(),
                                    grid(10 * ns, 0.5 * ns, rtol, 1e-8));
  const Trajectory b = mesolve_full(h, mini.exp.collapse_ops(), rho0, mini.exp.observables(),
                                    grid(10 * ns, 0.5 * ns, rtol / 2, 0.5e-8));
  CHECK(std::abs(a.photons.back() / b.photons.back() - 1.0) < 10 * rtol);
}

TEST_CASE("zero pulse under RWA leaves the |g> vacuum untouched") {
  const Mini mini({3, 2, 3});
  const PulseEnvelope zero = PulseEnvelope::zero(10 * ns);
  RunSettings run;
  for (SolverKind k : {SolverKind::rwa_full, SolverKind::full}) {
    run.solver = k;
    const Trajectory t = mini.exp.evolve(TransmonState::g, zero, run, 10 * ns);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(t.beta[i]) < 1e-8);
    if (k == SolverKind::rwa_full)
      for (double n : t.photons) CHECK(n <= 1e-6);
  }
}

TEST_CASE("solver kind names") {
  for (SolverKind k : {SolverKind::full, SolverKind::lra, SolverKind::rwa_full, SolverKind::rwa_lra})
    CHECK(parse_solver_kind(to_string(k)) == k);
  CHECK(parse_solver_kind("rwa_lra") == SolverKind::rwa_lra);
  CHECK_THROWS(parse_solver_kind("dense"));
}
