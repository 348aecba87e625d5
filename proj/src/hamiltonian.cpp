#include "ddemit/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace ddemit {

int product_dimension(int n_atoms) {
  if (n_atoms < 1 || n_atoms > kMaxAtoms) {
    throw UnsupportedError("n_atoms must lie in [1, " + std::to_string(kMaxAtoms) + "], got " +
                           std::to_string(n_atoms));
  }
  return 1 << n_atoms;
}

int excitation_count(int index) { return std::popcount(static_cast<unsigned>(index)); }

CMatrix lowering_operator(int n_atoms, int atom) {
  const int dim = product_dimension(n_atoms);
  if (atom < 0 || atom >= n_atoms) throw std::out_of_range("atom index out of range");
  CMatrix s = CMatrix::Zero(dim, dim);
  const int bit = 1 << atom;
  for (int k = 0; k < dim; ++k) {
    if (k & bit) s(k & ~bit, k) = 1.0;
  }
  return s;
}

// ---------------------------------------------------------------------------

EffectiveHamiltonian::EffectiveHamiltonian(int n_atoms, CMatrix system)
    : n_atoms_(n_atoms), system_(std::move(system)) {
  if (system_.rows() != product_dimension(n_atoms) || system_.cols() != system_.rows()) {
    throw std::invalid_argument("system matrix has the wrong dimension");
  }
  system_norm_ = system_.norm();
}

void EffectiveHamiltonian::add_term(CMatrix op, std::function<Complex(double)> coeff) {
  if (op.rows() != system_.rows() || op.cols() != system_.cols()) {
    throw std::invalid_argument("term operator has the wrong dimension");
  }
  term_norms_.push_back(op.norm());
  terms_.push_back({std::move(op), std::move(coeff)});
}

void EffectiveHamiltonian::add_hermitian_pair(const CMatrix& op,
                                              const std::function<Complex(double)>& coeff) {
  add_term(op, coeff);
  add_term(op.adjoint(), [coeff](double t) { return std::conj(coeff(t)); });
}

CMatrix EffectiveHamiltonian::matrix(double t) const {
  CMatrix h = system_;
  for (const auto& term : terms_) h += term.coeff(t) * term.op;
  return h;
}

void EffectiveHamiltonian::apply(double t, const CVector& psi, CVector& out) const {
  out.noalias() = system_ * psi;
  for (const auto& term : terms_) {
    const Complex c = term.coeff(t);
    if (c != Complex(0.0)) out.noalias() += c * (term.op * psi);
  }
}

double EffectiveHamiltonian::norm_bound(double t) const {
  double bound = system_norm_;
  for (std::size_t k = 0; k < terms_.size(); ++k) bound += std::abs(terms_[k].coeff(t)) * term_norms_[k];
  return bound;
}

namespace {

CMatrix system_matrix(const CouplingMatrix& couplings, const SystemOptions& options) {
  const int n = couplings.size();
  const int dim = product_dimension(n);
  CMatrix h = CMatrix::Zero(dim, dim);
  std::vector<CMatrix> s;
  s.reserve(n);
  for (int j = 0; j < n; ++j) s.push_back(lowering_operator(n, j));

  if (options.single_atom_decay) {
    for (int k = 0; k < dim; ++k) h(k, k) += Complex(0.0, -0.5 * couplings.gamma * excitation_count(k));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Complex c = 0.0;
      if (options.dipole_shifts) c += couplings.delta(i, j);
      if (options.cross_decay) c += Complex(0.0, -0.5 * couplings.gamma_ij(i, j));
      if (c != Complex(0.0)) h += c * (s[i].adjoint() * s[j]);
    }
  }
  return h;
}

}  // namespace

EffectiveHamiltonian system_hamiltonian(const AtomGeometry& geom, const CouplingMatrix& couplings,
                                        const SystemOptions& options) {
  geom.validate();
  if (couplings.size() != geom.n_atoms) {
    throw std::invalid_argument("coupling matrix does not match the geometry");
  }
  return EffectiveHamiltonian(geom.n_atoms, system_matrix(couplings, options));
}

// ---------------------------------------------------------------------------

std::vector<Complex> symmetric_weights(int n_atoms) { return std::vector<Complex>(n_atoms, 1.0); }

std::vector<Complex> antisymmetric_weights(int n_atoms) {
  std::vector<Complex> w(n_atoms);
  for (int j = 0; j < n_atoms; ++j) w[j] = (j % 2 == 0) ? 1.0 : -1.0;
  return w;
}

std::vector<Complex> plane_wave_weights(int n_atoms, double spacing, double beta) {
  std::vector<Complex> w(n_atoms);
  for (int j = 0; j < n_atoms; ++j) w[j] = std::exp(Complex(0.0, -2.0 * kPi * spacing * j * std::cos(beta)));
  return w;
}

namespace {

CMatrix weighted_lowering(const std::vector<Complex>& weights, int n_atoms) {
  if (static_cast<int>(weights.size()) != n_atoms) {
    throw std::invalid_argument("drive weight vector length differs from n_atoms");
  }
  const int dim = product_dimension(n_atoms);
  CMatrix l = CMatrix::Zero(dim, dim);
  for (int j = 0; j < n_atoms; ++j) {
    if (std::abs(weights[j]) > 1.0 + 1e-12) throw DomainError("drive weights must satisfy |w_i| <= 1");
    l += weights[j] * lowering_operator(n_atoms, j);
  }
  return l;
}

}  // namespace

CMatrix drive_hamiltonian(const DriveSpec& drive, int n_atoms, double t) {
  const int dim = product_dimension(n_atoms);
  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& f : drive.fields) {
    const double a = f.envelope ? f.envelope(t) : 0.0;
    if (a == 0.0) continue;
    const CMatrix l = weighted_lowering(f.weights, n_atoms);
    const Complex c = 0.5 * a * std::exp(Complex(0.0, f.detuning * t));
    h += c * l + std::conj(c) * l.adjoint();
  }
  return h;
}

void add_drive(EffectiveHamiltonian& h, const DriveSpec& drive) {
  for (const auto& f : drive.fields) {
    if (!f.envelope) continue;
    const CMatrix l = weighted_lowering(f.weights, h.n_atoms());
    const Envelope env = f.envelope;
    const double det = f.detuning;
    h.add_hermitian_pair(l, [env, det](double t) { return 0.5 * env(t) * std::exp(Complex(0.0, det * t)); });
  }
}

TwoAtomCarriers two_atom_carriers(double delta, double omega_delta) {
  return {-delta - omega_delta, delta - omega_delta};
}

// ---------------------------------------------------------------------------

int CollectiveBasis::index(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw std::invalid_argument("unknown basis label '" + label + "'");
  return static_cast<int>(it - labels.begin());
}

namespace {

std::string ket_label(int index, int n_atoms) {
  std::string s;
  for (int j = n_atoms - 1; j >= 0; --j) s += ((index >> j) & 1) ? '1' : '0';
  return s;
}

// Fills energies and widths from the expectation values of the system part.
void fill_levels(CollectiveBasis& basis, const CMatrix& hsys) {
  basis.energies.clear();
  basis.widths.clear();
  for (int k = 0; k < basis.dimension(); ++k) {
    const CVector v = basis.kets.col(k);
    const Complex e = v.dot(hsys * v);
    basis.energies.push_back(e.real());
    basis.widths.push_back(-2.0 * e.imag());
  }
}

}  // namespace

CollectiveBasis product_basis(int n_atoms) {
  const int dim = product_dimension(n_atoms);
  CollectiveBasis basis;
  basis.kets = CMatrix::Identity(dim, dim);
  for (int k = 0; k < dim; ++k) {
    basis.labels.push_back(n_atoms == 1 ? std::string(k ? "e" : "g") : ket_label(k, n_atoms));
  }
  basis.energies.assign(dim, 0.0);
  basis.widths.assign(dim, 0.0);
  return basis;
}

CollectiveBasis collective_basis_two(const CouplingMatrix& couplings) {
  if (couplings.size() != 2) throw UnsupportedError("collective_basis_two needs exactly two atoms");
  const double r = 1.0 / std::sqrt(2.0);
  CollectiveBasis basis;
  basis.labels = {"a", "b", "c", "d"};
  basis.kets = CMatrix::Zero(4, 4);
  basis.kets(0, 0) = 1.0;
  basis.kets(2, 1) = r;
  basis.kets(1, 1) = -r;
  basis.kets(2, 2) = r;
  basis.kets(1, 2) = r;
  basis.kets(3, 3) = 1.0;
  fill_levels(basis, system_matrix(couplings, {}));
  return basis;
}

ThreeAtomSpectrum three_atom_spectrum(double delta12, double delta13) {
  ThreeAtomSpectrum sp;
  sp.delta12 = delta12;
  sp.delta13 = delta13;
  const double d2 = delta12 * delta12;
  sp.delta_split = std::sqrt(8.0 * d2 + delta13 * delta13);
  const double d = sp.delta_split;
  sp.kappa = 2.0 * d2 + delta13 * (delta13 - d);
  sp.eta = (delta12 + delta13) * (d - 2.0 * delta12 - delta13);
  sp.varsigma = 2.0 * delta12 * delta13 * (6.0 * d2 - d * d + 3.0 * delta13 * delta13);
  sp.delta_plus = 0.5 * (d + 3.0 * delta13);
  sp.delta_minus = 0.5 * (d - 3.0 * delta13);
  return sp;
}

namespace {

// Makes the highest-index nonzero component real and positive.
void fix_phase(CVector& v) {
  for (Eigen::Index k = v.size() - 1; k >= 0; --k) {
    if (std::abs(v(k)) > 1e-12) {
      v *= std::abs(v(k)) / v(k);
      return;
    }
  }
}

}  // namespace

std::pair<CollectiveBasis, ThreeAtomSpectrum> collective_basis_three(const CouplingMatrix& couplings) {
  if (couplings.size() != 3) throw UnsupportedError("collective_basis_three needs exactly three atoms");
  const double d12 = couplings.delta(0, 1);
  const double d13 = couplings.delta(0, 2);
  const double scale = std::max({std::abs(d12), std::abs(d13), couplings.gamma});
  if (std::abs(couplings.delta(1, 2) - d12) > 1e-12 * scale) {
    throw UnsupportedError("three-atom labeling requires Delta12 == Delta23 (linear, equally spaced chain)");
  }
  ThreeAtomSpectrum sp = three_atom_spectrum(d12, d13);
  if (sp.delta_split < 1e-9 * scale) {
    throw UnsupportedError("three-atom labeling is ambiguous: symmetric levels are degenerate (delta ~ 0)");
  }

  // Mirror-symmetric sector in the basis (1,0,1)/sqrt2, (0,1,0).
  Eigen::Matrix2d m;
  m << d13, std::sqrt(2.0) * d12, std::sqrt(2.0) * d12, 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);  // ascending eigenvalues
  const double r = 1.0 / std::sqrt(2.0);
  auto sym_vector = [&](int col, const int idx[3]) {
    CVector v = CVector::Zero(8);
    const double p = es.eigenvectors()(0, col), q = es.eigenvectors()(1, col);
    v(idx[0]) = p * r;
    v(idx[1]) = q;
    v(idx[2]) = p * r;
    return v;
  };
  auto anti_vector = [&](const int idx[3]) {
    CVector v = CVector::Zero(8);
    v(idx[0]) = -r;
    v(idx[2]) = r;
    return v;
  };
  const int one[3] = {1, 2, 4};   // atom j excited
  const int hole[3] = {6, 5, 3};  // atom j de-excited

  const CMatrix hsys = system_matrix(couplings, {});
  auto width = [&](const CVector& v) { return -2.0 * v.dot(hsys * v).imag(); };

  CVector s_lo = sym_vector(0, one), s_hi = sym_vector(1, one);
  CVector b = s_lo, d = s_hi;
  if (width(s_hi) < width(s_lo)) std::swap(b, d);
  CVector c = anti_vector(one);
  CVector e = sym_vector(0, hole), g = sym_vector(1, hole);
  CVector f = anti_vector(hole);
  CVector a = CVector::Zero(8), h = CVector::Zero(8);
  a(0) = 1.0;
  h(7) = 1.0;

  CollectiveBasis basis;
  basis.labels = {"a", "b", "c", "d", "e", "f", "g", "h"};
  basis.kets = CMatrix::Zero(8, 8);
  int col = 0;
  for (CVector* v : {&a, &b, &c, &d, &e, &f, &g, &h}) {
    fix_phase(*v);
    basis.kets.col(col++) = *v;
  }
  fill_levels(basis, hsys);
  sp.gamma_b = basis.widths[1];
  sp.gamma_c = basis.widths[2];
  return {basis, sp};
}

CollectiveBasis default_basis(const CouplingMatrix& couplings) {
  if (couplings.size() == 2) return collective_basis_two(couplings);
  if (couplings.size() == 3) return collective_basis_three(couplings).first;
  CollectiveBasis basis = product_basis(couplings.size());
  fill_levels(basis, system_matrix(couplings, {}));
  return basis;
}

// ---------------------------------------------------------------------------

CMatrix two_atom_collective_drive(double e_mu, double e_nu, double omega_delta, double delta, double t) {
  enum { A, B, C, D };
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix h = CMatrix::Zero(4, 4);
  h(C, D) = r * e_mu * std::exp(Complex(0.0, -t * omega_delta));
  h(B, D) = r * e_nu * std::exp(Complex(0.0, -t * omega_delta));
  h(A, C) = r * e_mu * std::exp(Complex(0.0, -t * (2.0 * delta + omega_delta)));
  h(A, B) = -r * e_nu * std::exp(Complex(0.0, t * (2.0 * delta - omega_delta)));
  CMatrix full = h + h.adjoint();
  return full;
}

bool raman_is_valid(double e_mu, double e_nu, double omega_delta) {
  return std::abs(omega_delta) >= 5.0 * std::max(std::abs(e_mu), std::abs(e_nu));
}

Complex raman_effective_coupling(Complex e_mu, Complex e_nu, double omega_delta,
                                 std::vector<std::string>* warnings) {
  if (omega_delta == 0.0) {
    throw DomainError("raman_effective_coupling: omega_delta = 0 is the resonant (dark-state) case");
  }
  if (warnings && !raman_is_valid(std::abs(e_mu), std::abs(e_nu), omega_delta)) {
    std::ostringstream msg;
    msg << "Raman elimination outside its validity domain: |omega_delta| = " << std::abs(omega_delta)
        << " < 5 * max(|E_mu|, |E_nu|) = " << 5.0 * std::max(std::abs(e_mu), std::abs(e_nu));
    warnings->push_back(msg.str());
  }
  return std::conj(e_nu) * e_mu / (2.0 * omega_delta);
}

QubitState dark_state_two(double e_mu, double e_nu) {
  if (e_mu == 0.0 && e_nu == 0.0) throw DomainError("dark_state_two: both fields are off");
  const double theta = std::atan2(e_mu, e_nu);
  return {-std::sin(theta), std::cos(theta)};
}

EffectiveHamiltonian ansatz_hamiltonian(const AtomGeometry& geom, const CouplingMatrix& couplings,
                                        std::function<double(double)> omega) {
  if (geom.n_atoms != 2 && geom.n_atoms != 3) throw UnsupportedError("the ansatz needs two or three atoms");
  SystemOptions opts;
  opts.dipole_shifts = false;
  EffectiveHamiltonian h = system_hamiltonian(geom, couplings, opts);
  const CollectiveBasis basis = default_basis(couplings);
  const CVector b = basis.ket("b"), c = basis.ket("c");
  const CMatrix op = c * b.adjoint() + b * c.adjoint();
  h.add_term(op, [omega = std::move(omega)](double t) { return Complex(omega(t), 0.0); });
  h.frame = "interaction frame of the dipole shifts";
  return h;
}

// ---------------------------------------------------------------------------

ThreeAtomCarriers three_atom_carriers(const ThreeAtomSpectrum& sp) {
  return {0.5 * (sp.delta13 - sp.delta_split), sp.delta_split, 0.5 * (3.0 * sp.delta13 + sp.delta_split)};
}

Complex three_atom_prep_coupling(const ThreeAtomSpectrum& sp, double e_mu, double k_dot_r) {
  if (sp.kappa == 0.0) throw DomainError("three_atom_prep_coupling: kappa = 0 (singular configuration)");
  const double amp = std::sqrt(1.0 - sp.delta13 / sp.delta_split) * e_mu / (2.0 * sp.kappa) *
                     (3.0 * sp.delta12 * sp.delta13 - sp.delta_split * sp.delta12 +
                      2.0 * sp.kappa * std::cos(k_dot_r));
  return std::exp(Complex(0.0, -k_dot_r)) * amp;
}

StirapCouplings three_atom_stirap_couplings(const ThreeAtomSpectrum& sp, double e_mu, double e_nu,
                                            double k_dot_r, double t) {
  const double d = sp.delta_split, d12 = sp.delta12, d13 = sp.delta13;
  if (sp.kappa == 0.0 || d == 0.0) {
    throw DomainError("three_atom_stirap_couplings: kappa = 0 or delta = 0 (singular configuration)");
  }
  const double q = 2.0 * d12 * d12 + d13 * (d + d13);
  const Complex i(0.0, 1.0);

  const double k_cg = d12 * (d + 3.0 * d13) * std::sqrt(d + d13) / (2.0 * std::sqrt(2.0 * d) * q);
  const Complex cg = k_cg * std::exp(-i * (4.0 * k_dot_r + 3.0 * d13 * t) / 2.0) *
                     (std::exp(2.0 * i * k_dot_r) - 1.0) *
                     (std::exp(i * d * t / 2.0) * e_nu + std::exp(3.0 * i * d13 * t / 2.0) * e_mu);

  const double p = 2.0 * d12 * d12 + d13 * d13;
  const Complex bg = std::sqrt(d * d - d13 * d13) * std::exp(-i * k_dot_r) *
                     (e_nu + std::exp(-i * (d - 3.0 * d13) * t / 2.0) * e_mu) / (2.0 * d * sp.kappa * q) *
                     (p * p - d * d * d13 * d13 + sp.varsigma * std::cos(k_dot_r));
  return {cg, bg};
}

QubitState dark_state_three(Complex e_cg, Complex e_bg) {
  const double n = std::hypot(std::abs(e_cg), std::abs(e_bg));
  if (n == 0.0) throw DomainError("dark_state_three: both couplings vanish");
  return {e_cg / n, -e_bg / n};
}

}  // namespace ddemit
