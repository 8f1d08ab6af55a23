#pragma once

// Small hand-rolled generators for property tests.

#include <cstdint>
#include <random>

#include "lowrank/algebra.hpp"

namespace testing {

using lowrank::Complex;
using lowrank::DenseMatrix;
using lowrank::SparseOperator;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  Complex complex() { return {normal(), normal()}; }

  DenseMatrix dense(Eigen::Index rows, Eigen::Index cols) {
    DenseMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex();
    return m;
  }

  DenseMatrix hermitian(Eigen::Index n) {
    const DenseMatrix a = dense(n, n);
    return 0.5 * (a + a.adjoint());
  }

  /// Roughly `per_row` random entries per row.
  SparseOperator sparse(Eigen::Index n, int per_row) {
    std::vector<lowrank::Triplet> t;
    for (Eigen::Index i = 0; i < n; ++i)
      for (int k = 0; k < per_row; ++k) t.emplace_back(i, integer(0, static_cast<int>(n) - 1), complex());
    return lowrank::make_sparse(n, t);
  }

  SparseOperator integer_sparse(Eigen::Index n, int per_row) {
    std::vector<lowrank::Triplet> t;
    for (Eigen::Index i = 0; i < n; ++i)
      for (int k = 0; k < per_row; ++k)
        t.emplace_back(i, integer(0, static_cast<int>(n) - 1), Complex(integer(-3, 3), integer(-3, 3)));
    return lowrank::make_sparse(n, t);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs(const DenseMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
