#include "lowrank/device.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank {

void DeviceSpec::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) + " must be positive and finite");
    }
  };
  positive(e_c, "E_c");
  positive(e_j, "E_j");
  positive(omega_r, "omega_r");
  positive(omega_f, "omega_f");
  positive(g, "g");
  positive(kappa, "kappa");
  positive(omega_d, "omega_d");
  if (!(j_coupling >= 0.0)) throw InvalidArgument("J must be non-negative");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be non-negative");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  if (layout.n_lower < 1 || layout.n_upper < 1 || layout.n_transmon < 2) {
    throw InvalidArgument("layout needs n_lower, n_upper >= 1 and n_transmon >= 2");
  }
}

Eigen::Matrix4d dynamical_matrix(double wr, double wf, double j) {
  Eigen::Matrix4d om;
  om << wr, j, 0, j,
        j, wf, j, 0,
        0, -j, -wr, -j,
        -j, 0, -j, -wf;
  return om;
}

Eigen::Matrix4d sigma_a() {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
  s.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return s;
}

Eigen::Matrix4d sigma_c() {
  Eigen::Matrix2d sx;
  sx << 0, 1, 1, 0;
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s.topRightCorner<2, 2>() = -sx;
  s.bottomLeftCorner<2, 2>() = sx;
  return s;
}

namespace {

// (alpha, beta, gamma, delta) of c  ->  coefficients of c^H.
Eigen::Vector4d conjugate_mode(const Eigen::Vector4d& v) {
  return {v(2), v(3), v(0), v(1)};
}

void assemble(NormalModes& nm, const Eigen::Vector4d& vl, const Eigen::Vector4d& vu) {
  nm.u.col(0) = conjugate_mode(vu);
  nm.u.col(1) = conjugate_mode(vl);
  nm.u.col(2) = vl;
  nm.u.col(3) = vu;
  nm.s = nm.u.transpose().inverse();
  nm.mu_u = nm.sij(1, 4) - nm.sij(1, 1);
  nm.mu_l = nm.sij(1, 3) - nm.sij(1, 2);
  nm.nu_u = nm.sij(2, 4) - nm.sij(2, 1);
  nm.nu_l = nm.sij(2, 3) - nm.sij(2, 2);
}

}  // namespace

NormalModes normal_modes(double wr, double wf, double j) {
  if (!(wr > 0.0) || !(wf > 0.0)) throw InvalidArgument("mode frequencies must be positive");
  if (!(j >= 0.0)) throw InvalidArgument("J must be non-negative");

  const Eigen::Matrix4d om = dynamical_matrix(wr, wf, j);
  Eigen::EigenSolver<Eigen::Matrix4d> es(om);
  if (es.info() != Eigen::Success) throw NonPositiveDefinite("normal-mode eigensolver failed");

  const double scale = std::max(wr, wf);
  std::vector<std::pair<double, Eigen::Vector4d>> positive;
  for (int k = 0; k < 4; ++k) {
    const Complex lam = es.eigenvalues()(k);
    if (std::abs(lam.imag()) > 1e-9 * scale) {
      throw NonPositiveDefinite("normal-mode frequencies are complex (coupling too strong)");
    }
    if (lam.real() <= 0.0) continue;
    Eigen::Vector4cd v = es.eigenvectors().col(k);
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v *= std::conj(v(big)) / std::abs(v(big));
    Eigen::Vector4d vr = v.real();
    const double norm = vr(0) * vr(0) + vr(1) * vr(1) - vr(2) * vr(2) - vr(3) * vr(3);
    if (!(norm > 0.0)) throw NonPositiveDefinite("normal mode has non-positive symplectic norm");
    positive.emplace_back(lam.real(), vr / std::sqrt(norm));
  }
  if (positive.size() != 2) throw NonPositiveDefinite("expected two positive normal-mode frequencies");
  std::sort(positive.begin(), positive.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  NormalModes nm;
  nm.omega_l = positive[0].first;
  nm.omega_u = positive[1].first;
  Eigen::Vector4d vl = positive[0].second;
  Eigen::Vector4d vu = positive[1].second;
  assemble(nm, vl, vu);

  constexpr double tiny = 1e-12;
  const bool flip_l = std::abs(nm.nu_l) > tiny ? nm.nu_l < 0.0 : nm.mu_l < 0.0;
  const bool flip_u = std::abs(nm.mu_u) > tiny ? nm.mu_u < 0.0 : nm.nu_u < 0.0;
  if (flip_l) vl = -vl;
  if (flip_u) vu = -vu;
  if (flip_l || flip_u) assemble(nm, vl, vu);
  return nm;
}

// ---------------------------------------------------------------------------

SparseOperator TimeDependentOperator::evaluate(double t) const {
  SparseOperator h = constant;
  for (const auto& term : terms) h += term.coeff(t) * term.op;
  h.makeCompressed();
  return h;
}

TimeDependentOperator TimeDependentOperator::without_fast_terms() const {
  TimeDependentOperator out;
  out.constant = constant;
  for (const auto& term : terms) {
    if (!term.fast) out.terms.push_back(term);
  }
  return out;
}

namespace {

Eigen::Index slot_of(const SparseOperator& pattern, Eigen::Index row, Eigen::Index col) {
  const auto* outer = pattern.outerIndexPtr();
  const auto* inner = pattern.innerIndexPtr();
  const auto* begin = inner + outer[row];
  const auto* end = inner + outer[row + 1];
  const auto* it = std::lower_bound(begin, end, static_cast<int>(col));
  return static_cast<Eigen::Index>(it - inner);
}

}  // namespace

CompiledOperator::CompiledOperator(const TimeDependentOperator& op) {
  const Eigen::Index n = op.dim();
  std::vector<Triplet> coords;
  auto collect = [&](const SparseOperator& m) {
    if (m.rows() != n || m.cols() != n) throw DimensionMismatch("term dimension mismatch");
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (SparseOperator::InnerIterator it(m, r); it; ++it) {
        coords.emplace_back(it.row(), it.col(), Complex{1.0, 0.0});
      }
    }
  };
  collect(op.constant);
  for (const auto& term : op.terms) collect(term.op);
  work_ = make_sparse(n, coords);

  constant_values_.assign(static_cast<std::size_t>(work_.nonZeros()), Complex{});
  for (Eigen::Index r = 0; r < op.constant.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(op.constant, r); it; ++it) {
      constant_values_[static_cast<std::size_t>(slot_of(work_, it.row(), it.col()))] += it.value();
    }
  }
  for (const auto& term : op.terms) {
    std::vector<Eigen::Index> slots;
    std::vector<Complex> entries;
    for (Eigen::Index r = 0; r < term.op.outerSize(); ++r) {
      for (SparseOperator::InnerIterator it(term.op, r); it; ++it) {
        slots.push_back(slot_of(work_, it.row(), it.col()));
        entries.push_back(it.value());
      }
    }
    term_slots_.push_back(std::move(slots));
    term_entries_.push_back(std::move(entries));
    coeffs_.push_back(term.coeff);
  }
}

const SparseOperator& CompiledOperator::at(double t) {
  Complex* values = work_.valuePtr();
  std::copy(constant_values_.begin(), constant_values_.end(), values);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const Complex c = coeffs_[k](t);
    const auto& slots = term_slots_[k];
    const auto& entries = term_entries_[k];
    for (std::size_t i = 0; i < slots.size(); ++i) values[slots[i]] += c * entries[i];
  }
  return work_;
}

// ---------------------------------------------------------------------------

DeviceOperators build_device_operators(const DeviceSpec& spec, const TransmonEigensystem& eig) {
  const auto& layout = spec.layout;
  if (eig.levels() != layout.n_transmon) {
    throw DimensionMismatch("transmon eigensystem levels do not match the layout");
  }
  DeviceOperators ops;
  ops.layout = layout;
  ops.c_l = embed(destroy(layout.n_lower), Slot::lower, layout);
  ops.c_u = embed(destroy(layout.n_upper), Slot::upper, layout);
  auto [plus, minus] = n_t_split(eig);
  ops.n_plus = embed(plus, Slot::transmon, layout);
  ops.n_minus = embed(minus, Slot::transmon, layout);
  ops.b = embed(destroy(layout.n_transmon), Slot::transmon, layout);

  const Eigen::Index n = layout.dim();
  for (int k = 0; k < layout.n_transmon; ++k) {
    RealVector d = RealVector::Zero(n);
    for (Eigen::Index idx = k; idx < n; idx += layout.n_transmon) d(idx) = 1.0;
    ops.transmon_projectors.push_back(std::move(d));
  }
  return ops;
}

namespace {

SparseOperator adjoint_of(const SparseOperator& a) {
  SparseOperator h = a.adjoint();
  h.makeCompressed();
  return h;
}

// H_t' + H_rf' + i g sum_m mu_m (n+ c_m^H - n- c_m).
SparseOperator static_part(const DeviceSpec& spec, const TransmonEigensystem& eig,
                           const NormalModes& nm, const DeviceOperators& ops) {
  const auto& layout = spec.layout;
  std::vector<Complex> level_shift;
  for (int k = 0; k < layout.n_transmon; ++k) {
    level_shift.emplace_back(eig.energies(k) - eig.energies(0) - spec.omega_d * k, 0.0);
  }
  SparseOperator ht = embed(diagonal(level_shift), Slot::transmon, layout);
  const SparseOperator nl = adjoint_of(ops.c_l) * ops.c_l;
  const SparseOperator nu = adjoint_of(ops.c_u) * ops.c_u;
  SparseOperator h = ht + (nm.omega_l - spec.omega_d) * nl + (nm.omega_u - spec.omega_d) * nu;

  const SparseOperator cl_dag = adjoint_of(ops.c_l);
  const SparseOperator cu_dag = adjoint_of(ops.c_u);
  const SparseOperator coupling_u = ops.n_plus * cu_dag - ops.n_minus * ops.c_u;
  const SparseOperator coupling_l = ops.n_plus * cl_dag - ops.n_minus * ops.c_l;
  h += (kI * spec.g * nm.mu_u) * coupling_u;
  h += (kI * spec.g * nm.mu_l) * coupling_l;
  h.makeCompressed();
  return h;
}

// (nu_l c_l + nu_u c_u) / 2, the drive-coupled combination.
SparseOperator drive_operator(const NormalModes& nm, const DeviceOperators& ops) {
  SparseOperator d = (0.5 * nm.nu_l) * ops.c_l + (0.5 * nm.nu_u) * ops.c_u;
  d.makeCompressed();
  return d;
}

void add_slow_drive(TimeDependentOperator& h, const SparseOperator& d,
                    const PulseEnvelope& envelope) {
  h.terms.push_back({-1.0 * d, [envelope](double t) { return envelope(t); }, false, "drive"});
  h.terms.push_back({-1.0 * adjoint_of(d), [envelope](double t) { return std::conj(envelope(t)); },
                     false, "drive_dag"});
}

}  // namespace

TimeDependentOperator build_rotated_hamiltonian(const DeviceSpec& spec,
                                                const TransmonEigensystem& eig,
                                                const NormalModes& nm,
                                                const PulseEnvelope& envelope) {
  const DeviceOperators ops = build_device_operators(spec, eig);
  TimeDependentOperator h;
  h.constant = static_part(spec, eig, nm, ops);

  const SparseOperator d = drive_operator(nm, ops);
  add_slow_drive(h, d, envelope);

  const double wd = spec.omega_d;
  h.terms.push_back({d, [envelope, wd](double t) {
                       return envelope(t) * std::exp(Complex{0.0, -2.0 * wd * t});
                     }, true, "drive_fast"});
  h.terms.push_back({adjoint_of(d), [envelope, wd](double t) {
                       return std::conj(envelope(t)) * std::exp(Complex{0.0, 2.0 * wd * t});
                     }, true, "drive_fast_dag"});

  // -i g mu (n+ c) e^{-2 i wd t} and its adjoint, for both modes.
  SparseOperator counter =
      (-kI * spec.g * nm.mu_u) * SparseOperator(ops.n_plus * ops.c_u) +
      (-kI * spec.g * nm.mu_l) * SparseOperator(ops.n_plus * ops.c_l);
  counter.makeCompressed();
  h.terms.push_back({counter, [wd](double t) { return std::exp(Complex{0.0, -2.0 * wd * t}); },
                     true, "coupling_fast"});
  h.terms.push_back({adjoint_of(counter),
                     [wd](double t) { return std::exp(Complex{0.0, 2.0 * wd * t}); }, true,
                     "coupling_fast_dag"});
  return h;
}

TimeDependentOperator build_rwa_hamiltonian(const DeviceSpec& spec, const TransmonEigensystem& eig,
                                            const NormalModes& nm, const PulseEnvelope& envelope) {
  const DeviceOperators ops = build_device_operators(spec, eig);
  TimeDependentOperator h;
  h.constant = static_part(spec, eig, nm, ops);
  add_slow_drive(h, drive_operator(nm, ops), envelope);
  return h;
}

SparseOperator filter_field_operator(const DeviceSpec& spec, const NormalModes& nm) {
  const auto& layout = spec.layout;
  SparseOperator f = nm.sij(2, 3) * embed(destroy(layout.n_lower), Slot::lower, layout) +
                     nm.sij(2, 4) * embed(destroy(layout.n_upper), Slot::upper, layout);
  f.makeCompressed();
  return f;
}

std::vector<SparseOperator> build_collapse_ops(const DeviceSpec& spec,
                                               const TransmonEigensystem& eig,
                                               const NormalModes& nm) {
  if (eig.levels() != spec.layout.n_transmon) {
    throw DimensionMismatch("transmon eigensystem levels do not match the layout");
  }
  std::vector<SparseOperator> out;
  out.push_back(std::sqrt(spec.kappa) * filter_field_operator(spec, nm));
  if (spec.gamma > 0.0) {
    SparseOperator b = std::sqrt(spec.gamma) *
                       embed(destroy(spec.layout.n_transmon), Slot::transmon, spec.layout);
    b.makeCompressed();
    out.push_back(std::move(b));
  }
  return out;
}

StateVector initial_state(TransmonState which, const SubsystemLayout& layout) {
  const int level = which == TransmonState::g ? 0 : 1;
  if (level >= layout.n_transmon) throw InvalidArgument("transmon truncation too small");
  StateVector psi = StateVector::Zero(layout.dim());
  psi(layout.index(0, 0, level)) = 1.0;
  return psi;
}

DressedSpectrum dressed_transmon_spectrum(const DeviceSpec& spec, int transmon_levels, int fock) {
  if (transmon_levels < 3) throw InvalidArgument("dressed spectrum needs at least 3 transmon levels");
  if (fock < 2) throw InvalidArgument("dressed spectrum needs at least 2 Fock levels");
  const TransmonEigensystem eig =
      converged_transmon_eigensystem(spec.e_c, spec.e_j, transmon_levels, spec.n_cut);
  std::vector<Triplet> et, nt;
  for (int j = 0; j < transmon_levels; ++j) {
    et.emplace_back(j, j, eig.energies(j) - eig.energies(0));
    for (int k = 0; k < transmon_levels; ++k) {
      if (std::abs(eig.charge(j, k)) > 0.0) nt.emplace_back(j, k, eig.charge(j, k));
    }
  }
  const SparseOperator ht = make_sparse(transmon_levels, et);
  const SparseOperator n = make_sparse(transmon_levels, nt);
  const SparseOperator ad = destroy(fock);
  const SparseOperator x = SparseOperator(ad.adjoint()) - ad;  // a^H - a
  const SparseOperator num = SparseOperator(ad.adjoint()) * ad;
  const SparseOperator it = identity(transmon_levels);
  const SparseOperator im = identity(fock);

  const SparseOperator h = kron(kron(ht, im), im) + spec.omega_r * kron(kron(it, num), im) +
                           spec.omega_f * kron(kron(it, im), num) -
                           spec.j_coupling * kron(kron(it, x), x) +
                           (kI * spec.g) * kron(kron(n, x), im);
  const HermitianEigen es = hermitian_eig(DenseMatrix(h));

  Eigen::Index idx[3];
  for (int j = 0; j < 3; ++j) {
    const Eigen::Index bare = static_cast<Eigen::Index>(j) * fock * fock;
    es.vectors.row(bare).cwiseAbs2().maxCoeff(&idx[j]);
  }
  const double e0 = es.values(idx[0]);
  const double e1 = es.values(idx[1]) - e0;
  const double e2 = es.values(idx[2]) - e0;
  return {e1, e2 - 2.0 * e1};
}

}  // namespace lowrank
