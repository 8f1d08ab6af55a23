#include <doctest.h>

#include "lowrank/algebra.hpp"
#include "lowrank/errors.hpp"
#include "support.hpp"

using namespace lowrank;

namespace {

DenseMatrix to_dense(const SparseOperator& s) { return DenseMatrix(s); }

DenseMatrix m3x2() {
  DenseMatrix m(3, 2);
  m << 1, 0, 1, 1, 0, 1;
  return m;
}

}  // namespace

TEST_CASE("pseudoinverse examples") {
  CHECK(testing::max_abs(pseudoinverse(DenseMatrix::Identity(2, 2)) - DenseMatrix::Identity(2, 2)) <
        1e-14);

  DenseMatrix col(2, 1);
  col << 1, 0;
  DenseMatrix row(1, 2);
  row << 1, 0;
  CHECK(testing::max_abs(pseudoinverse(col) - row) < 1e-14);

  DenseMatrix expected(2, 3);
  expected << 2, 1, -1, -1, 1, 2;
  expected /= 3.0;
  CHECK(testing::max_abs(pseudoinverse(m3x2()) - expected) < 1e-14);
}

TEST_CASE("pseudoinverse rejects a rank-deficient factor") {
  DenseMatrix m(3, 2);
  m << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(pseudoinverse(m), RankDeficient);
  CHECK_THROWS_AS(pseudoinverse(DenseMatrix::Zero(4, 2)), RankDeficient);
}

TEST_CASE("normal equations apply pinv without forming it") {
  testing::Gen gen(11);
  const DenseMatrix m = gen.dense(12, 4);
  const DenseMatrix y = gen.dense(12, 3);
  const NormalEquations ne = NormalEquations::of_factor(m);
  CHECK(testing::max_abs(ne.solve(m.adjoint() * y) - pseudoinverse(m) * y) < 1e-10);
}

TEST_CASE("property: pinv(m) m = I for random tall factors") {
  testing::Gen gen(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen.integer(4, 64);
    const int m = gen.integer(1, n);
    const DenseMatrix f = gen.dense(n, m);
    INFO("N = " << n << ", M = " << m);
    CHECK(testing::max_abs(pseudoinverse(f) * f - DenseMatrix::Identity(m, m)) < 1e-10);
  }
}

TEST_CASE("hermitian_eig examples") {
  CHECK(hermitian_eig(DenseMatrix::Identity(3, 3)).values.isApprox(Eigen::Vector3d(1, 1, 1)));

  DenseMatrix x(2, 2);
  x << 0, 1, 1, 0;
  CHECK(hermitian_eig(x).values.isApprox(Eigen::Vector2d(-1, 1)));

  const DenseMatrix g = m3x2().adjoint() * m3x2();
  const RealVector v = hermitian_eig(g).values;
  CHECK(v(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(3.0).epsilon(1e-12));

  DenseMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(hermitian_eig(bad), NotHermitian);
}

TEST_CASE("property: hermitian_eig reconstructs the input") {
  testing::Gen gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = gen.integer(1, 40);
    const DenseMatrix h = gen.hermitian(n);
    const HermitianEigen e = hermitian_eig(h);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) CHECK(e.values(i) >= e.values(i - 1));
    const DenseMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK((back - h).norm() <= 1e-9 * h.norm());
  }
}

TEST_CASE("kron examples") {
  CHECK(to_dense(kron(identity(2), identity(3))).isApprox(DenseMatrix::Identity(6, 6)));

  const std::vector<Complex> d{1.0, 2.0};
  DenseMatrix want = DenseMatrix::Zero(4, 4);
  want.diagonal() << 1, 1, 2, 2;
  CHECK(to_dense(kron(diagonal(d), identity(2))) == want);

  const std::vector<Triplet> t{{0, 1, 1.0}};
  const SparseOperator k = kron(make_sparse(2, t), identity(2));
  DenseMatrix ones = DenseMatrix::Zero(4, 4);
  ones(0, 2) = 1.0;
  ones(1, 3) = 1.0;
  CHECK(to_dense(k) == ones);
  CHECK(k.nonZeros() == 2);
}

TEST_CASE("make_sparse sums duplicate coordinates") {
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, Complex(0, 1)}};
  const SparseOperator s = make_sparse(2, t);
  CHECK(s.nonZeros() == 2);
  CHECK(to_dense(s)(0, 0) == Complex(3.0));
}

TEST_CASE("property: kron is associative on integer entries") {
  testing::Gen gen(99);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseOperator a = gen.integer_sparse(gen.integer(1, 4), 2);
    const SparseOperator b = gen.integer_sparse(gen.integer(1, 4), 2);
    const SparseOperator c = gen.integer_sparse(gen.integer(1, 4), 2);
    const SparseOperator left = kron(kron(a, b), c);
    const SparseOperator right = kron(a, kron(b, c));
    CHECK(to_dense(left) == to_dense(right));
  }
}

TEST_CASE("property: multiply_thin agrees with the sparse-dense product") {
  testing::Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.integer(2, 80);
    const int m = gen.integer(1, 12);
    const SparseOperator a = gen.sparse(n, 3);
    const DenseMatrix x = gen.dense(n, m);
    RowMajorDense scratch;
    DenseMatrix out(n, m);
    multiply_thin(a, x, scratch, out);
    CHECK(testing::max_abs(out - a * x) < 1e-12 * (1.0 + testing::max_abs(x)));
  }
  RowMajorDense wrong = RowMajorDense::Zero(3, 2);
  DenseMatrix out(4, 2);
  CHECK_THROWS_AS(multiply_rows(identity(4), wrong, out), DimensionMismatch);
}

TEST_CASE("hermiticity_defect") {
  testing::Gen gen(8);
  CHECK(hermiticity_defect(gen.hermitian(6)) < 1e-15);
  CHECK(hermiticity_defect(SparseOperator(3, 3)) == 0.0);
  const std::vector<Triplet> t{{0, 1, 1.0}};
  CHECK(hermiticity_defect(make_sparse(2, t)) == doctest::Approx(1.0));
}
