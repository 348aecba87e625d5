#pragma once

// Non-Hermitian no-jump Hamiltonian of N dipole-coupled atoms in the frame
// rotating at the atomic frequency, the bichromatic drive, and the
// collective bases with their analytic reductions.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ddemit/coupling.hpp"
#include "ddemit/types.hpp"

namespace ddemit {

// ---------------------------------------------------------------------------
// Product basis
//
// Basis index k has bit (j-1) set when atom j is excited. Kets are printed
// most significant bit first, so for two atoms |10> is atom 2 excited.

int product_dimension(int n_atoms);
int excitation_count(int index);
CMatrix lowering_operator(int n_atoms, int atom);

/// Time-dependent generator H(t) = system + sum_k coeff_k(t) * op_k.
class EffectiveHamiltonian {
 public:
  struct Term {
    CMatrix op;
    std::function<Complex(double)> coeff;
  };

  EffectiveHamiltonian(int n_atoms, CMatrix system);

  int n_atoms() const { return n_atoms_; }
  int dimension() const { return static_cast<int>(system_.rows()); }
  const CMatrix& system() const { return system_; }
  const std::vector<Term>& terms() const { return terms_; }

  void add_term(CMatrix op, std::function<Complex(double)> coeff);
  /// Adds coeff(t) * op + conj(coeff(t)) * op^dagger.
  void add_hermitian_pair(const CMatrix& op, const std::function<Complex(double)>& coeff);

  CMatrix matrix(double t) const;
  void apply(double t, const CVector& psi, CVector& out) const;
  /// Upper bound on the operator norm of H(t) (Frobenius norms of the parts).
  double norm_bound(double t) const;

  /// Frame bookkeeping: the carrier omega_0 never appears numerically.
  std::string frame = "rotating at omega_0";

 private:
  int n_atoms_;
  CMatrix system_;
  std::vector<Term> terms_;
  std::vector<double> term_norms_;
  double system_norm_;
};

struct SystemOptions {
  bool single_atom_decay = true;
  /// -i gamma_ij / 2 exchange terms.
  bool cross_decay = true;
  /// Delta_ij exchange terms. Dropping them gives the interaction frame of a
  /// two-atom system, where the Hermitian part is diagonal in {b, c}.
  bool dipole_shifts = true;
};

/// sum_{i != j} Xi_ij s_i^+ s_j^- - i (gamma/2) sum_i s_i^+ s_i^-.
EffectiveHamiltonian system_hamiltonian(const AtomGeometry& geom, const CouplingMatrix& couplings,
                                        const SystemOptions& options = {});

// ---------------------------------------------------------------------------
// Drive

using Envelope = std::function<double(double)>;

/// One monochromatic component: E_i(t) = weights[i] * envelope(t) * e^{i detuning t}.
struct DriveField {
  std::string name;
  Envelope envelope;
  double detuning = 0.0;
  std::vector<Complex> weights;
};

struct DriveSpec {
  std::vector<DriveField> fields;
  double omega_delta = 0.0;
};

std::vector<Complex> symmetric_weights(int n_atoms);
/// (1, -1, 1, ...), the standing-wave pattern.
std::vector<Complex> antisymmetric_weights(int n_atoms);
/// e^{-i 2 pi spacing (j-1) cos(beta)} for propagation at angle beta to the axis.
std::vector<Complex> plane_wave_weights(int n_atoms, double spacing, double beta);

/// H_I(t) = (1/2) sum_i E_i(t) s_i^- + h.c. with E the Rabi frequency.
CMatrix drive_hamiltonian(const DriveSpec& drive, int n_atoms, double t);
void add_drive(EffectiveHamiltonian& h, const DriveSpec& drive);

/// Carrier detunings from omega_0 for the two-atom Raman / STIRAP setup:
/// mu = -Delta - omega_delta, nu = Delta - omega_delta.
struct TwoAtomCarriers {
  double mu;
  double nu;
};
TwoAtomCarriers two_atom_carriers(double delta, double omega_delta);

// ---------------------------------------------------------------------------
// Collective bases

struct CollectiveBasis {
  std::vector<std::string> labels;
  /// Columns are the collective kets in the product basis.
  CMatrix kets;
  std::vector<double> energies;
  std::vector<double> widths;

  int dimension() const { return static_cast<int>(kets.cols()); }
  int index(const std::string& label) const;
  CVector ket(const std::string& label) const { return kets.col(index(label)); }
  /// Unitary mapping product amplitudes to collective amplitudes (kets^dagger).
  CMatrix transform() const { return kets.adjoint(); }
};

/// |0> and |1> for a single atom (labels g, e).
CollectiveBasis product_basis(int n_atoms);

/// a = |00>, b = (|10> - |01>)/sqrt2, c = (|10> + |01>)/sqrt2, d = |11>.
CollectiveBasis collective_basis_two(const CouplingMatrix& couplings);

struct ThreeAtomSpectrum {
  double delta12 = 0.0;
  double delta13 = 0.0;
  double delta_split = 0.0;  // sqrt(8 Delta12^2 + Delta13^2)
  double kappa = 0.0;
  double eta = 0.0;
  double varsigma = 0.0;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double gamma_b = 0.0;
  double gamma_c = 0.0;
};

ThreeAtomSpectrum three_atom_spectrum(double delta12, double delta13);

/// Labels a..h: b, c, d one-excitation (c antisymmetric under 1<->3, b the
/// slower-decaying symmetric state), e, f, g two-excitation (f antisymmetric,
/// e/g symmetric with lower/upper energy), h fully excited. Each ket has its
/// highest-index product component real and positive.
std::pair<CollectiveBasis, ThreeAtomSpectrum> collective_basis_three(const CouplingMatrix& couplings);

/// Collective basis for two or three atoms, product basis otherwise.
CollectiveBasis default_basis(const CouplingMatrix& couplings);

// ---------------------------------------------------------------------------
// Two-atom analytic reductions (rows/cols ordered a, b, c, d)

/// Field Hamiltonian in the collective interaction picture for a symmetric mu
/// and antisymmetric nu field.
CMatrix two_atom_collective_drive(double e_mu, double e_nu, double omega_delta, double delta, double t);

/// Outside |omega_delta| >= 5 max(|E_mu|, |E_nu|) the elimination is not trusted.
bool raman_is_valid(double e_mu, double e_nu, double omega_delta);

/// E_nu^* E_mu / (2 omega_delta). Appends a message to `warnings` when
/// raman_is_valid fails. Throws DomainError for omega_delta == 0.
Complex raman_effective_coupling(Complex e_mu, Complex e_nu, double omega_delta,
                                 std::vector<std::string>* warnings = nullptr);

/// Amplitudes on the two slow collective states.
struct QubitState {
  Complex b;
  Complex c;

  CVector embed(const CollectiveBasis& basis) const {
    return b * basis.ket("b") + c * basis.ket("c");
  }
};

/// cos(theta)|c> - sin(theta)|b> with tan(theta) = E_mu / E_nu.
QubitState dark_state_two(double e_mu, double e_nu);

/// Two-level b-c coupling Omega(t)(|c><b| + |b><c|) on top of the decay-only
/// system part (interaction frame for two atoms).
EffectiveHamiltonian ansatz_hamiltonian(const AtomGeometry& geom, const CouplingMatrix& couplings,
                                        std::function<double(double)> omega);

// ---------------------------------------------------------------------------
// Three-atom analytic couplings (returned as transition Rabi frequencies,
// i.e. matrix elements of sum_i E_i s_i^-)

struct ThreeAtomCarriers {
  double ab;  // (Delta13 - delta)/2
  double bg;  // delta
  double cg;  // (3 Delta13 + delta)/2
};
ThreeAtomCarriers three_atom_carriers(const ThreeAtomSpectrum& spectrum);

Complex three_atom_prep_coupling(const ThreeAtomSpectrum& spectrum, double e_mu, double k_dot_r);

struct StirapCouplings {
  Complex cg;
  Complex bg;
};
StirapCouplings three_atom_stirap_couplings(const ThreeAtomSpectrum& spectrum, double e_mu, double e_nu,
                                            double k_dot_r, double t);

/// Normalised E_cg |b> - E_bg |c>, taken as written. It annihilates the
/// coupling E_cg |g><c| + E_bg |g><b| + h.c.; under the lowering-operator
/// convention used for the couplings above the dark combination of the actual
/// drive is the one with conjugated arguments.
QubitState dark_state_three(Complex e_cg, Complex e_bg);

}  // namespace ddemit
