#include "lowrank/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank {

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::full: return "full";
    case SolverKind::lra: return "lra";
    case SolverKind::rwa_full: return "rwa-full";
    case SolverKind::rwa_lra: return "rwa-lra";
  }
  return "unknown";
}

SolverKind parse_solver_kind(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "full") return SolverKind::full;
  if (n == "lra") return SolverKind::lra;
  if (n == "rwa-full" || n == "rwa") return SolverKind::rwa_full;
  if (n == "rwa-lra") return SolverKind::rwa_lra;
  throw InvalidArgument("unknown solver kind '" + name + "'");
}

std::vector<double> uniform_grid(double t_start, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= t_start)) throw InvalidArgument("invalid time grid");
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(t_start + static_cast<double>(i) * dt);
  if (t_end - grid.back() > 1e-9 * dt) grid.push_back(t_end);
  else grid.back() = t_end;
  return grid;
}

double Trajectory::leaked_population(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = 2; k < populations[i].size(); ++k) s += populations[i][k];
  return s;
}

TimeDependentOperator effective_generator(const TimeDependentOperator& h,
                                          std::span<const SparseOperator> ls) {
  TimeDependentOperator k;
  k.constant = -kI * h.constant;
  for (const auto& l : ls) {
    const SparseOperator ldag = l.adjoint();
    k.constant -= 0.5 * SparseOperator(ldag * l);
  }
  k.constant.makeCompressed();
  for (const auto& term : h.terms) {
    TimeTerm scaled = term;
    scaled.op = -kI * term.op;
    k.terms.push_back(std::move(scaled));
  }
  return k;
}

DenseMatrix lindblad_dissipator(const DenseMatrix& rho, std::span<const SparseOperator> ls) {
  DenseMatrix out = DenseMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& l : ls) {
    const DenseMatrix ld = DenseMatrix(l);
    const DenseMatrix ldl = ld.adjoint() * ld;
    out += ld * rho * ld.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

DenseMatrix lindblad_rhs(const DenseMatrix& rho, const SparseOperator& h,
                         std::span<const SparseOperator> ls) {
  const DenseMatrix hd = DenseMatrix(h);
  return -kI * (hd * rho - rho * hd) + lindblad_dissipator(rho, ls);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

IntegratorOptions integrator_options(const SolverOptions& opts) {
  if (opts.save_times.size() < 1) throw InvalidArgument("solver needs at least one save time");
  IntegratorOptions io;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  const double span = opts.save_times.back() - opts.save_times.front();
  io.max_step = opts.max_step > 0.0 ? opts.max_step : span / 200.0;
  return io;
}

Complex trace_product(const SparseOperator& a, const DenseMatrix& rho) {
  Complex s{};
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseOperator::InnerIterator it(a, i); it; ++it) s += it.value() * rho(it.col(), it.row());
  }
  return s;
}

void note_trace_drift(Trajectory& traj, double t, double tr) {
  if (std::abs(tr - 1.0) > 1e-2 && traj.warnings.empty()) {
    std::ostringstream msg;
    msg << "trace drifted to " << tr << " at t = " << t * 1e9
        << " ns; observables are trace-normalized";
    traj.warnings.push_back(msg.str());
  }
}

class FullEvaluator {
 public:
  FullEvaluator(const TimeDependentOperator& generator, std::span<const SparseOperator> ls,
                Eigen::Index n)
      : gen_(generator), ls_(ls.begin(), ls.end()),
        kr_(n, n), tmp_(n, n), tmp_adj_(n, n) {}

  void operator()(double t, const DenseMatrix& rho, DenseMatrix& out) {
    // rho is Hermitian, so rho K^H = (K rho)^H and L rho L^H = L (L rho)^H.
    kr_.noalias() = gen_.at(t) * rho;
    out = kr_ + kr_.adjoint();
    for (const auto& l : ls_) {
      tmp_.noalias() = l * rho;
      tmp_adj_ = tmp_.adjoint();
      out.noalias() += l * tmp_adj_;
    }
  }

 private:
  CompiledOperator gen_;
  std::vector<SparseOperator> ls_;
  DenseMatrix kr_, tmp_, tmp_adj_;
};

class NosseEvaluator {
 public:
  NosseEvaluator(const TimeDependentOperator& generator, std::span<const SparseOperator> ls,
                 Eigen::Index n, Eigen::Index rank, double cond_cap)
      : gen_(generator), ls_(ls.begin(), ls.end()), rank_(rank), cond_cap_(cond_cap),
        jumps_(n, rank * static_cast<Eigen::Index>(ls.size())),
        gram_(rank, rank), overlaps_(rank, rank * static_cast<Eigen::Index>(ls.size())) {}

  void operator()(double t, const DenseMatrix& m, DenseMatrix& out) {
    rows_ = m;
    out.resize(m.rows(), m.cols());
    multiply_rows(gen_.at(t), rows_, out);
    if (ls_.empty()) return;
    const Eigen::Index r = rank_;
    for (std::size_t k = 0; k < ls_.size(); ++k) {
      multiply_rows(ls_[k], rows_, jumps_.middleCols(static_cast<Eigen::Index>(k) * r, r));
    }
    gram_.noalias() = m.adjoint() * m;
    overlaps_.noalias() = m.adjoint() * jumps_;
    try {
      const NormalEquations ne(gram_, cond_cap_);
      ne.solve_in_place(overlaps_);
    } catch (const RankDeficient& e) {
      throw RankDeficientAt(t, e.what());
    }
    for (std::size_t k = 0; k < ls_.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k) * r;
      out.noalias() += 0.5 * jumps_.middleCols(kk, r) * overlaps_.middleCols(kk, r).adjoint();
    }
  }

 private:
  CompiledOperator gen_;
  std::vector<SparseOperator> ls_;
  Eigen::Index rank_;
  double cond_cap_;
  DenseMatrix jumps_, gram_, overlaps_;
  RowMajorDense rows_;
};

}  // namespace

Trajectory mesolve_full(const TimeDependentOperator& h, std::span<const SparseOperator> ls,
                        const DenseMatrix& rho0, const Observables& obs,
                        const SolverOptions& opts) {
  const Eigen::Index n = h.dim();
  if (rho0.rows() != n || rho0.cols() != n) throw DimensionMismatch("rho0 does not match H");
  if (hermiticity_defect(rho0) > 1e-10) throw InvalidArgument("rho0 must be Hermitian");

  const auto start = Clock::now();
  FullEvaluator rhs(effective_generator(h, ls), ls, n);
  const SparseOperator number = SparseOperator(obs.field.adjoint()) * obs.field;

  Trajectory traj;
  traj.tag = "full";
  traj.rank = static_cast<int>(n);
  auto observe = [&](double t, const DenseMatrix& rho) {
    const double tr = rho.trace().real();
    traj.times.push_back(t);
    traj.trace.push_back(tr);
    note_trace_drift(traj, t, tr);
    traj.beta.push_back(trace_product(obs.field, rho) / tr);
    traj.photons.push_back(trace_product(number, rho).real() / tr);
    traj.purity.push_back(purity_full(rho));
    std::vector<double> pops;
    const RealVector diag = rho.diagonal().real();
    for (const auto& proj : obs.transmon_projectors) pops.push_back(proj.dot(diag) / tr);
    traj.populations.push_back(std::move(pops));
    if (opts.diagnostic_rank > 0 && opts.diagnostic_rank <= n) {
      Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
      const RealVector& ev = es.eigenvalues();  // ascending
      traj.pm_over_p1.push_back(ev(n - opts.diagnostic_rank) / ev(n - 1));
    } else {
      traj.pm_over_p1.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  };
  traj.stats = integrate_dopri5<DenseMatrix>(rhs, rho0, opts.save_times,
                                             integrator_options(opts), observe);
  traj.wall_seconds = seconds_since(start);
  return traj;
}

LowRankState lra_init(const StateVector& psi0, int rank, double eps_init, std::uint64_t seed) {
  const Eigen::Index n = psi0.size();
  if (rank < 1) throw InvalidArgument("rank must be at least 1");
  if (rank > n) {
    std::ostringstream msg;
    msg << "rank " << rank << " exceeds the Hilbert-space dimension " << n;
    throw RankExceedsDim(msg.str());
  }
  if (rank > 1 && !(eps_init > 0.0 && (rank - 1) * eps_init < 1.0)) {
    throw InvalidArgument("eps_init must satisfy 0 < (M-1) eps < 1");
  }
  const double norm = psi0.norm();
  if (!(norm > 0.0)) throw InvalidArgument("initial state has zero norm");

  DenseMatrix q(n, rank);  // orthonormal directions
  q.col(0) = psi0 / norm;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int j = 1; j < rank; ++j) {
    StateVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex{gauss(rng), gauss(rng)};
    for (int pass = 0; pass < 2; ++pass) {
      const StateVector proj = q.leftCols(j).adjoint() * v;
      v -= q.leftCols(j) * proj;
    }
    q.col(j) = v / v.norm();
  }

  LowRankState s;
  s.rank = rank;
  s.eps_init = eps_init;
  s.seed = seed;
  s.m = q;
  s.m.col(0) *= std::sqrt(1.0 - (rank - 1) * eps_init);
  if (rank > 1) s.m.rightCols(rank - 1) *= std::sqrt(eps_init);
  return s;
}

DenseMatrix nosse_rhs(const DenseMatrix& m, const SparseOperator& h,
                      std::span<const SparseOperator> ls, double cond_cap) {
  TimeDependentOperator op;
  op.constant = h;
  NosseEvaluator rhs(effective_generator(op, ls), ls, m.rows(), m.cols(), cond_cap);
  DenseMatrix out(m.rows(), m.cols());
  rhs(0.0, m, out);
  return out;
}

DenseMatrix nosse_dissipator(const DenseMatrix& m, std::span<const SparseOperator> ls,
                             double cond_cap) {
  SparseOperator zero(m.rows(), m.rows());
  return nosse_rhs(m, zero, ls, cond_cap);
}

Trajectory lra_evolve(const LowRankState& state0, const TimeDependentOperator& h,
                      std::span<const SparseOperator> ls, const Observables& obs,
                      const SolverOptions& opts) {
  const Eigen::Index n = h.dim();
  const Eigen::Index rank = state0.m.cols();
  if (state0.m.rows() != n) throw DimensionMismatch("low-rank factor does not match H");

  const auto start = Clock::now();
  NosseEvaluator rhs(effective_generator(h, ls), ls, n, rank, opts.cond_cap);

  Trajectory traj;
  traj.tag = "lra";
  traj.rank = static_cast<int>(rank);
  DenseMatrix fm(n, rank);
  auto observe = [&](double t, const DenseMatrix& m) {
    const DenseMatrix gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
    const RealVector lam = es.eigenvalues().cwiseMax(0.0);  // ascending
    const double tr = gram.trace().real();
    traj.times.push_back(t);
    traj.trace.push_back(tr);
    note_trace_drift(traj, t, tr);
    fm.noalias() = obs.field * m;
    traj.beta.push_back(m.conjugate().cwiseProduct(fm).sum() / tr);
    traj.photons.push_back(fm.squaredNorm() / tr);
    const double lsum = lam.sum();
    traj.purity.push_back(lam.squaredNorm() / (lsum * lsum));
    traj.pm_over_p1.push_back(lam(0) / lam(rank - 1));
    const RealVector weights = m.rowwise().squaredNorm();
    std::vector<double> pops;
    for (const auto& proj : obs.transmon_projectors) pops.push_back(proj.dot(weights) / tr);
    traj.populations.push_back(std::move(pops));
  };
  traj.stats = integrate_dopri5<DenseMatrix>(rhs, state0.m, opts.save_times,
                                             integrator_options(opts), observe);
  traj.wall_seconds = seconds_since(start);
  return traj;
}

double purity_low_rank(const DenseMatrix& m) {
  const DenseMatrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
  const RealVector lam = es.eigenvalues().cwiseMax(0.0);
  const double s = lam.sum();
  return lam.squaredNorm() / (s * s);
}

double purity_full(const DenseMatrix& rho) {
  const double tr = rho.trace().real();
  return rho.squaredNorm() / (tr * tr);
}

RealVector ensemble_probabilities(const DenseMatrix& m) {
  const DenseMatrix gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram, Eigen::EigenvaluesOnly);
  RealVector lam = es.eigenvalues().cwiseMax(0.0).reverse();
  return lam / lam.sum();
}

}  // namespace lowrank
