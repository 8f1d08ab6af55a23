#pragma once

// Evolution engines: the vectorized Lindblad solver used as the reference
// and the fixed-rank low-rank solver for rho = m m^H. Either runs under the
// drive-frame or the rotating-wave Hamiltonian; RWA is a Hamiltonian choice.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lowrank/algebra.hpp"
#include "lowrank/device.hpp"
#include "lowrank/integrator.hpp"

namespace lowrank {

enum class SolverKind { full, lra, rwa_full, rwa_lra };

std::string to_string(SolverKind kind);
/// Accepts full, lra, rwa-full, rwa-lra (underscores also accepted).
SolverKind parse_solver_kind(const std::string& name);
inline bool uses_rwa(SolverKind k) { return k == SolverKind::rwa_full || k == SolverKind::rwa_lra; }
inline bool is_low_rank(SolverKind k) { return k == SolverKind::lra || k == SolverKind::rwa_lra; }

struct SolverOptions {
  double rtol = 1e-6;
  double atol = 1e-8;
  double max_step = 0.0;  // 0: (t_end - t_start) / 200
  std::vector<double> save_times;
  double cond_cap = 1e12;
  /// Full solver only: compute p_M/p_1 from the M largest eigenvalues of rho
  /// at each save point (0 disables; costs O(N^3) per save).
  int diagnostic_rank = 0;
};

/// Uniform grid t_start, t_start + dt, ..., t_end (t_end always included).
std::vector<double> uniform_grid(double t_start, double t_end, double dt);

/// Operators sampled at every save point.
struct Observables {
  SparseOperator field;                         // beta = <field>
  std::vector<RealVector> transmon_projectors;  // diagonals of |k><k|
};

struct LowRankState {
  DenseMatrix m;
  int rank = 0;
  double eps_init = 0.0;
  std::uint64_t seed = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Complex> beta;
  std::vector<double> photons;
  std::vector<double> purity;
  std::vector<double> pm_over_p1;
  std::vector<std::vector<double>> populations;  // [save point][transmon level]
  std::vector<double> trace;
  std::string tag;
  int rank = 0;
  double wall_seconds = 0.0;
  IntegratorStats stats;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  /// Sum of populations of transmon levels >= 2 at save point i.
  double leaked_population(std::size_t i) const;
};

/// -i H(t) - (1/2) sum_k L_k^H L_k as a time-dependent operator: the
/// non-Hermitian generator shared by both solvers.
TimeDependentOperator effective_generator(const TimeDependentOperator& h,
                                          std::span<const SparseOperator> ls);

/// sum_k D[L_k] rho, formed densely (reference for tests).
DenseMatrix lindblad_dissipator(const DenseMatrix& rho, std::span<const SparseOperator> ls);

/// Full Lindblad right-hand side -i[H, rho] + sum_k D[L_k] rho (dense, for tests).
DenseMatrix lindblad_rhs(const DenseMatrix& rho, const SparseOperator& h,
                         std::span<const SparseOperator> ls);

Trajectory mesolve_full(const TimeDependentOperator& h, std::span<const SparseOperator> ls,
                        const DenseMatrix& rho0, const Observables& obs,
                        const SolverOptions& opts);

/// Column 1 = sqrt(1 - (M-1) eps) psi0; columns 2..M are sqrt(eps) times
/// random unit vectors orthogonalized against all previous columns.
/// Throws RankExceedsDim when M > N.
LowRankState lra_init(const StateVector& psi0, int rank, double eps_init, std::uint64_t seed);

/// dm/dt = -i H m + (1/2) sum_k [L_k m (pinv(m) L_k m)^H - L_k^H L_k m].
DenseMatrix nosse_rhs(const DenseMatrix& m, const SparseOperator& h,
                      std::span<const SparseOperator> ls, double cond_cap = 1e12);

/// The dissipative part O[m] alone (nosse_rhs with H = 0).
DenseMatrix nosse_dissipator(const DenseMatrix& m, std::span<const SparseOperator> ls,
                             double cond_cap = 1e12);

/// Throws RankDeficientAt with the failure time if the factor loses rank.
Trajectory lra_evolve(const LowRankState& state0, const TimeDependentOperator& h,
                      std::span<const SparseOperator> ls, const Observables& obs,
                      const SolverOptions& opts);

/// sum lambda^2 / (sum lambda)^2 over the eigenvalues of m^H m.
double purity_low_rank(const DenseMatrix& m);
/// tr(rho^2) / tr(rho)^2 for Hermitian rho.
double purity_full(const DenseMatrix& rho);

/// Normalized ensemble probabilities p_j of m m^H, descending.
RealVector ensemble_probabilities(const DenseMatrix& m);

}  // namespace lowrank
