#pragma once

// Complex linear-algebra primitives shared by every solver.
//
// Dense matrices are Eigen column-major. Sparse operators are Eigen
// row-major compressed matrices; all builders go through make_sparse(), which
// sums duplicate coordinates so assembled operators never carry them.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lowrank {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Assembles a square dim x dim operator, summing duplicate coordinates.
SparseOperator make_sparse(Eigen::Index dim, std::span<const Triplet> entries);
SparseOperator identity(Eigen::Index dim);
SparseOperator diagonal(std::span<const Complex> values);

/// Moore-Penrose inverse of a tall full-column-rank matrix, computed from the
/// normal equations (m^H m)^{-1} m^H. Throws RankDeficient when the Gram
/// matrix cannot be factorized or its condition estimate exceeds `cond_cap`.
DenseMatrix pseudoinverse(const DenseMatrix& m, double cond_cap = 1e12);

/// Cholesky factorization of a Gram matrix G = m^H m, used to apply pinv(m)
/// to many right-hand sides without forming it: pinv(m) * Y = G^{-1} (m^H Y).
/// Same jitter-once-then-fail policy as pseudoinverse().
class NormalEquations {
 public:
  NormalEquations(DenseMatrix gram, double cond_cap = 1e12);
  static NormalEquations of_factor(const DenseMatrix& m, double cond_cap = 1e12);

  /// Returns G^{-1} * rhs.
  DenseMatrix solve(const DenseMatrix& rhs) const;
  void solve_in_place(DenseMatrix& rhs) const;
  const DenseMatrix& gram() const noexcept { return gram_; }
  double rcond() const noexcept { return rcond_; }

 private:
  DenseMatrix gram_;
  Eigen::LLT<DenseMatrix> llt_;
  double rcond_ = 0.0;
};

struct HermitianEigen {
  RealVector values;   // ascending
  DenseMatrix vectors; // columns are eigenvectors
};

/// Throws NotHermitian if max|h - h^H| exceeds tol * max|h|.
HermitianEigen hermitian_eig(const DenseMatrix& h, double tol = 1e-10);

SparseOperator kron(const SparseOperator& a, const SparseOperator& b);

using RowMajorDense = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// out = a * x for a tall thin x. Copies x into the row-major `scratch` so
/// each stored entry of `a` touches one contiguous row.
void multiply_thin(const SparseOperator& a, const DenseMatrix& x, RowMajorDense& scratch,
                   Eigen::Ref<DenseMatrix> out);
/// Same product with x already in row-major layout.
void multiply_rows(const SparseOperator& a, const RowMajorDense& x, Eigen::Ref<DenseMatrix> out);

/// Largest |h_ij - conj(h_ji)| relative to max|h_ij|; 0 for the zero operator.
double hermiticity_defect(const SparseOperator& h);
double hermiticity_defect(const DenseMatrix& h);

}  // namespace lowrank
