#pragma once

// Transmon - readout resonator - Purcell filter device: normal modes of the
// resonator/filter pair, drive-frame Hamiltonians, collapse operators and
// initial states. All frequencies and rates are angular (rad/s).

#include <functional>
#include <string>
#include <vector>

#include "lowrank/algebra.hpp"
#include "lowrank/hilbert.hpp"
#include "lowrank/pulse.hpp"

namespace lowrank {

struct DeviceSpec {
  double e_c = kTwoPi * 315e6;
  double e_j = 51.0 * kTwoPi * 315e6;
  double omega_r = kTwoPi * 7.2e9;
  double omega_f = kTwoPi * 7.21e9;
  double g = kTwoPi * 150e6;
  double j_coupling = kTwoPi * 30e6;
  double kappa = kTwoPi * 30e6;
  double gamma = kTwoPi * 8e3;
  double omega_d = kTwoPi * 7.18e9;
  double eta = 0.6;
  int n_cut = 30;
  SubsystemLayout layout{100, 4, 5};

  /// Throws InvalidArgument on a violated field invariant.
  void validate() const;
};

struct NormalModes {
  double omega_l = 0.0;
  double omega_u = 0.0;
  /// Bare operators (a, f, a^H, f^H) = s * (c_u^H, c_l^H, c_l, c_u).
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  /// Columns: normalized eigenvectors of the dynamical matrix, ordered by
  /// eigenvalue -omega_u, -omega_l, omega_l, omega_u.
  Eigen::Matrix4d u = Eigen::Matrix4d::Zero();
  double mu_l = 0.0, mu_u = 0.0, nu_l = 0.0, nu_u = 0.0;

  /// s_ij with the 1-based indices used in the coupling formulas.
  double sij(int i, int j) const { return s(i - 1, j - 1); }
};

/// The 4x4 dynamical matrix acting on (alpha, beta, gamma, delta) for
/// c = alpha a + beta f + gamma a^H + delta f^H.
Eigen::Matrix4d dynamical_matrix(double omega_r, double omega_f, double j_coupling);
Eigen::Matrix4d sigma_a();
Eigen::Matrix4d sigma_c();

/// Symplectic (Bogoliubov) diagonalization of the resonator/filter pair.
/// Signs are fixed so nu_l >= 0 and mu_u >= 0 (falling back to mu_l, nu_u
/// when those vanish). Throws NonPositiveDefinite when the spectrum is complex.
NormalModes normal_modes(double omega_r, double omega_f, double j_coupling);

/// Qubit frequency and anharmonicity of the transmon dressed by the undriven
/// resonator and filter (lab frame, bare-mode Fock truncation `fock`). Levels
/// are identified by their largest overlap with |j, 0, 0>.
struct DressedSpectrum {
  double qubit_frequency = 0.0;
  double anharmonicity = 0.0;
};
DressedSpectrum dressed_transmon_spectrum(const DeviceSpec& spec, int transmon_levels = 6,
                                          int fock = 6);

struct TimeTerm {
  SparseOperator op;
  std::function<Complex(double)> coeff;
  /// Oscillates at +-2 omega_d (dropped by the rotating-wave approximation).
  bool fast = false;
  std::string label;
};

/// H(t) = constant + sum_k coeff_k(t) op_k.
struct TimeDependentOperator {
  SparseOperator constant;
  std::vector<TimeTerm> terms;

  Eigen::Index dim() const { return constant.rows(); }
  SparseOperator evaluate(double t) const;
  /// Copy with every fast term removed.
  TimeDependentOperator without_fast_terms() const;
};

/// Evaluates a TimeDependentOperator onto one fixed sparsity pattern (the
/// union of all terms) so H(t) is refreshed by a value update only.
class CompiledOperator {
 public:
  explicit CompiledOperator(const TimeDependentOperator& op);

  /// Writes H(t) into the internal pattern and returns it.
  const SparseOperator& at(double t);
  const SparseOperator& pattern() const { return work_; }

 private:
  SparseOperator work_;
  std::vector<Complex> constant_values_;
  std::vector<std::vector<Complex>> term_values_;  // dense over the pattern
  std::vector<std::vector<Eigen::Index>> term_slots_;
  std::vector<std::vector<Complex>> term_entries_;
  std::vector<std::function<Complex(double)>> coeffs_;
};

/// Subsystem operators embedded in the composite space, built once per device.
struct DeviceOperators {
  SubsystemLayout layout;
  SparseOperator c_l, c_u;        // normal-mode annihilators
  SparseOperator n_plus, n_minus; // nearest-neighbour charge split
  SparseOperator b;               // transmon harmonic-ladder lowering operator
  std::vector<RealVector> transmon_projectors;  // diagonals of |k><k|
};

DeviceOperators build_device_operators(const DeviceSpec& spec, const TransmonEigensystem& eig);

/// Drive-frame Hamiltonian keeping the terms rotating at +-2 omega_d.
TimeDependentOperator build_rotated_hamiltonian(const DeviceSpec& spec,
                                                const TransmonEigensystem& eig,
                                                const NormalModes& nm,
                                                const PulseEnvelope& envelope);

/// Rotating-wave Hamiltonian: only envelope-proportional time dependence.
TimeDependentOperator build_rwa_hamiltonian(const DeviceSpec& spec, const TransmonEigensystem& eig,
                                            const NormalModes& nm, const PulseEnvelope& envelope);

/// [sqrt(kappa) (s23 c_l + s24 c_u), sqrt(gamma) b]; the transmon operator
/// is omitted when gamma == 0.
std::vector<SparseOperator> build_collapse_ops(const DeviceSpec& spec,
                                               const TransmonEigensystem& eig,
                                               const NormalModes& nm);

/// Drive-frame filter field s23 c_l + s24 c_u, whose expectation is beta.
SparseOperator filter_field_operator(const DeviceSpec& spec, const NormalModes& nm);

enum class TransmonState { g, e };

/// |0_l> (x) |0_u> (x) |g or e>.
StateVector initial_state(TransmonState which, const SubsystemLayout& layout);

}  // namespace lowrank
