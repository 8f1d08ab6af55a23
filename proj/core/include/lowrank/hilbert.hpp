#pragma once

// Subsystem operators: bosonic ladders, the transmon eigensystem and the
// lower-mode (x) upper-mode (x) transmon product space.

#include <utility>

#include "lowrank/algebra.hpp"

namespace lowrank {

/// Truncated bosonic annihilation operator: <n-1|a|n> = sqrt(n).
SparseOperator destroy(Eigen::Index dim);

struct TransmonEigensystem {
  RealVector energies;  // rad/s, ascending, lowest n_levels
  DenseMatrix charge;   // <j|n|k> in the eigenbasis
  int n_cut = 0;        // charge cutoff the result was computed with

  int levels() const { return static_cast<int>(energies.size()); }
  double qubit_frequency() const { return energies(1) - energies(0); }
  double anharmonicity() const {
    return (energies(2) - energies(1)) - (energies(1) - energies(0));
  }
};

/// Diagonalizes 4 E_c n^2 - E_j cos(phi) in the charge basis |n|, n in
/// [-n_cut, n_cut]. Eigenvector phases are fixed so every n^{j,j+1} is
/// positive. Throws CutoffTooSmall when the top retained transition moves by
/// more than 1e-6 (relative) between n_cut and n_cut + 5.
TransmonEigensystem transmon_eigensystem(double e_c, double e_j, int n_levels, int n_cut = 30);

/// transmon_eigensystem() with the cutoff raised in steps of 10 until the
/// convergence check passes (at most `max_n_cut`).
TransmonEigensystem converged_transmon_eigensystem(double e_c, double e_j, int n_levels,
                                                   int n_cut = 30, int max_n_cut = 200);

/// Nearest-neighbour split of the charge operator: n_plus keeps only
/// n^{j,j+1}|j><j+1|, n_minus = n_plus^H.
std::pair<SparseOperator, SparseOperator> n_t_split(const TransmonEigensystem& eig);

enum class Slot { lower, upper, transmon };

struct SubsystemLayout {
  int n_lower = 1;
  int n_upper = 1;
  int n_transmon = 1;

  Eigen::Index dim() const {
    return static_cast<Eigen::Index>(n_lower) * n_upper * n_transmon;
  }
  int slot_dim(Slot s) const;
  /// Composite index; the transmon is the fastest-varying factor.
  Eigen::Index index(int i_lower, int i_upper, int i_transmon) const {
    return (static_cast<Eigen::Index>(i_lower) * n_upper + i_upper) * n_transmon + i_transmon;
  }
  bool operator==(const SubsystemLayout&) const = default;
};

/// Embeds a subsystem operator into the composite space with identities on
/// the other two factors. Throws DimensionMismatch on a size mismatch.
SparseOperator embed(const SparseOperator& op, Slot slot, const SubsystemLayout& layout);

}  // namespace lowrank
