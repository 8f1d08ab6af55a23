#include "lowrank/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank {

SparseOperator make_sparse(Eigen::Index dim, std::span<const Triplet> entries) {
  SparseOperator op(dim, dim);
  op.setFromTriplets(entries.begin(), entries.end());
  op.makeCompressed();
  return op;
}

SparseOperator identity(Eigen::Index dim) {
  SparseOperator op(dim, dim);
  op.setIdentity();
  op.makeCompressed();
  return op;
}

SparseOperator diagonal(std::span<const Complex> values) {
  std::vector<Triplet> t;
  t.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    t.emplace_back(k, k, values[i]);
  }
  return make_sparse(static_cast<Eigen::Index>(values.size()), t);
}

NormalEquations::NormalEquations(DenseMatrix gram, double cond_cap)
    : gram_(std::move(gram)) {
  const Eigen::Index n = gram_.rows();
  if (n == 0 || gram_.cols() != n) {
    throw DimensionMismatch("normal equations need a nonempty square Gram matrix");
  }
  const double min_rcond = 1.0 / cond_cap;
  llt_.compute(gram_);
  if (llt_.info() == Eigen::Success) rcond_ = llt_.rcond();
  if (llt_.info() != Eigen::Success || !(rcond_ >= min_rcond)) {
    // One diagonal jitter attempt before giving up.
    const double jitter = 1e-14 * gram_.trace().real() / static_cast<double>(n);
    DenseMatrix shifted = gram_;
    shifted.diagonal().array() += jitter;
    llt_.compute(shifted);
    rcond_ = llt_.info() == Eigen::Success ? llt_.rcond() : 0.0;
    if (llt_.info() != Eigen::Success || !(rcond_ >= min_rcond)) {
      std::ostringstream msg;
      msg << "Gram matrix of the " << n << "-column factor is singular or too "
          << "ill-conditioned (rcond " << rcond_ << ", cap " << cond_cap
          << "); re-initialize with a larger epsilon or reduce the rank";
      throw RankDeficient(msg.str());
    }
  }
}

NormalEquations NormalEquations::of_factor(const DenseMatrix& m, double cond_cap) {
  DenseMatrix g = m.adjoint() * m;
  return NormalEquations(std::move(g), cond_cap);
}

DenseMatrix NormalEquations::solve(const DenseMatrix& rhs) const {
  return llt_.solve(rhs);
}

void NormalEquations::solve_in_place(DenseMatrix& rhs) const {
  llt_.solveInPlace(rhs);
}

DenseMatrix pseudoinverse(const DenseMatrix& m, double cond_cap) {
  if (m.cols() > m.rows()) {
    throw DimensionMismatch("pseudoinverse expects a tall matrix (cols <= rows)");
  }
  const auto ne = NormalEquations::of_factor(m, cond_cap);
  return ne.solve(m.adjoint());
}

double hermiticity_defect(const DenseMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("hermiticity check needs a square matrix");
  const double scale = h.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double hermiticity_defect(const SparseOperator& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("hermiticity check needs a square operator");
  SparseOperator diff = h - SparseOperator(h.adjoint());
  double scale = 0.0;
  for (Eigen::Index k = 0; k < h.nonZeros(); ++k) scale = std::max(scale, std::abs(h.valuePtr()[k]));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst / scale;
}

HermitianEigen hermitian_eig(const DenseMatrix& h, double tol) {
  if (h.rows() != h.cols()) throw DimensionMismatch("hermitian_eig needs a square matrix");
  const double defect = hermiticity_defect(h);
  if (defect > tol) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: relative asymmetry " << defect << " > " << tol;
    throw NotHermitian(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NotHermitian("eigendecomposition did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SparseOperator kron(const SparseOperator& a, const SparseOperator& b) {
  const Eigen::Index db = b.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseOperator::InnerIterator ia(a, i); ia; ++ia) {
      for (Eigen::Index k = 0; k < b.outerSize(); ++k) {
        for (SparseOperator::InnerIterator ib(b, k); ib; ++ib) {
          t.emplace_back(ia.row() * db + ib.row(), ia.col() * db + ib.col(),
                         ia.value() * ib.value());
        }
      }
    }
  }
  SparseOperator out(a.rows() * db, a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

void multiply_thin(const SparseOperator& a, const DenseMatrix& x, RowMajorDense& scratch,
                   Eigen::Ref<DenseMatrix> out) {
  scratch = x;
  multiply_rows(a, scratch, out);
}

void multiply_rows(const SparseOperator& a, const RowMajorDense& scratch,
                   Eigen::Ref<DenseMatrix> out) {
  if (a.cols() != scratch.rows() || out.rows() != a.rows() || out.cols() != scratch.cols()) {
    throw DimensionMismatch("sparse-dense product: shape mismatch");
  }
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const Complex* values = a.valuePtr();
  Eigen::Matrix<Complex, 1, Eigen::Dynamic> acc(scratch.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    acc.setZero();
    for (auto p = outer[i]; p < outer[i + 1]; ++p) acc.noalias() += values[p] * scratch.row(inner[p]);
    out.row(i) = acc;
  }
}

}  // namespace lowrank
