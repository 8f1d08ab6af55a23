#include "lowrank/hilbert.hpp"

#include <cmath>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank {

SparseOperator destroy(Eigen::Index dim) {
  if (dim < 1) throw InvalidArgument("destroy() needs dim >= 1");
  std::vector<Triplet> t;
  for (Eigen::Index n = 1; n < dim; ++n) {
    t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  }
  return make_sparse(dim, t);
}

namespace {

struct ChargeBasisSolution {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;  // lowest n_levels eigenvectors in the charge basis
};

ChargeBasisSolution solve_charge_basis(double e_c, double e_j, int n_levels, int n_cut) {
  const int dim = 2 * n_cut + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double n = k - n_cut;
    h(k, k) = 4.0 * e_c * n * n;
    if (k + 1 < dim) {
      h(k, k + 1) = -0.5 * e_j;
      h(k + 1, k) = -0.5 * e_j;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NotHermitian("transmon diagonalization failed");
  return {solver.eigenvalues().head(n_levels), solver.eigenvectors().leftCols(n_levels)};
}

}  // namespace

TransmonEigensystem transmon_eigensystem(double e_c, double e_j, int n_levels, int n_cut) {
  if (!(e_c > 0.0) || !(e_j > 0.0)) throw InvalidArgument("E_c and E_j must be positive");
  if (n_levels < 2) throw InvalidArgument("transmon needs at least two levels");
  if (n_levels > 2 * n_cut + 1) {
    throw CutoffTooSmall("n_levels exceeds the charge-basis dimension 2*n_cut+1");
  }

  auto sol = solve_charge_basis(e_c, e_j, n_levels, n_cut);
  const auto ref = solve_charge_basis(e_c, e_j, n_levels, n_cut + 5);
  const double top = sol.energies(n_levels - 1) - sol.energies(0);
  const double top_ref = ref.energies(n_levels - 1) - ref.energies(0);
  if (std::abs(top - top_ref) > 1e-6 * std::abs(top_ref)) {
    std::ostringstream msg;
    msg << "transmon spectrum not converged at n_cut=" << n_cut;
    throw CutoffTooSmall(msg.str());
  }

  const int dim = 2 * n_cut + 1;
  Eigen::VectorXd charge_diag(dim);
  for (int k = 0; k < dim; ++k) charge_diag(k) = k - n_cut;

  Eigen::MatrixXd& v = sol.vectors;
  for (int j = 0; j + 1 < n_levels; ++j) {
    const double elem = v.col(j).dot(charge_diag.cwiseProduct(v.col(j + 1)));
    if (elem < 0.0) v.col(j + 1) *= -1.0;
  }
  const Eigen::MatrixXd charge = v.transpose() * charge_diag.asDiagonal() * v;

  TransmonEigensystem out;
  out.energies = sol.energies;
  out.charge = charge.cast<Complex>();
  // Parity makes the diagonal vanish analytically; clear rounding noise.
  for (int j = 0; j < n_levels; ++j) out.charge(j, j) = 0.0;
  out.n_cut = n_cut;
  return out;
}

TransmonEigensystem converged_transmon_eigensystem(double e_c, double e_j, int n_levels,
                                                   int n_cut, int max_n_cut) {
  for (int cut = std::max(n_cut, (n_levels + 1) / 2);; cut += 10) {
    try {
      return transmon_eigensystem(e_c, e_j, n_levels, cut);
    } catch (const CutoffTooSmall&) {
      if (cut + 10 > max_n_cut) throw;
    }
  }
}

std::pair<SparseOperator, SparseOperator> n_t_split(const TransmonEigensystem& eig) {
  const int n = eig.levels();
  std::vector<Triplet> t;
  for (int j = 0; j + 1 < n; ++j) t.emplace_back(j, j + 1, eig.charge(j, j + 1));
  SparseOperator plus = make_sparse(n, t);
  SparseOperator minus = plus.adjoint();
  minus.makeCompressed();
  return {std::move(plus), std::move(minus)};
}

int SubsystemLayout::slot_dim(Slot s) const {
  switch (s) {
    case Slot::lower: return n_lower;
    case Slot::upper: return n_upper;
    case Slot::transmon: return n_transmon;
  }
  return 0;
}

SparseOperator embed(const SparseOperator& op, Slot slot, const SubsystemLayout& layout) {
  const int d = layout.slot_dim(slot);
  if (op.rows() != d || op.cols() != d) {
    std::ostringstream msg;
    msg << "operator of size " << op.rows() << "x" << op.cols()
        << " does not match slot dimension " << d;
    throw DimensionMismatch(msg.str());
  }
  const SparseOperator il = identity(layout.n_lower);
  const SparseOperator iu = identity(layout.n_upper);
  const SparseOperator it = identity(layout.n_transmon);
  switch (slot) {
    case Slot::lower: return kron(kron(op, iu), it);
    case Slot::upper: return kron(kron(il, op), it);
    case Slot::transmon: return kron(kron(il, iu), op);
  }
  return {};
}

}  // namespace lowrank
