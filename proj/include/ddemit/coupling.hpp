#pragma once

// Geometry of a linear chain of identical two-level atoms and the
// dipole-dipole coupling coefficients between them.

#include <vector>

#include "ddemit/types.hpp"

namespace ddemit {

/// Largest chain the product-basis builders accept.
inline constexpr int kMaxAtoms = 8;

/// Collinear, equally spaced atoms with identically oriented dipoles.
///
/// `spacing` is the neighbour separation in units of the emission wavelength,
/// `alpha` the angle between dipole and chain axis, `gamma` the single-atom
/// decay rate. All rates in the library are expressed in units of `gamma`.
struct AtomGeometry {
  int n_atoms = 2;
  double spacing = 0.2;
  double alpha = kPi / 2;
  double gamma = 1.0;

  /// Throws DomainError / UnsupportedError when the invariants do not hold.
  void validate() const;

  /// Positions along the axis in wavelength units: atom i at (i-1)*spacing.
  std::vector<double> positions() const;

  /// Dimensionless separation k0*r between neighbours, 2*pi*spacing.
  double xi_neighbour() const { return 2.0 * kPi * spacing; }

  /// Build a geometry from k0*r instead of the wavelength-unit spacing.
  static AtomGeometry from_xi(int n_atoms, double xi, double alpha, double gamma = 1.0);
};

/// Pairwise couplings Xi_ij with their coherent (Delta_ij = Re Xi) and
/// dissipative (gamma_ij = -2 Im Xi) parts. Diagonal entries are zero; the
/// single-atom term lives in the Hamiltonian builder.
struct CouplingMatrix {
  CMatrix xi;
  RMatrix delta;
  RMatrix gamma_ij;
  RMatrix xi_args;
  double gamma = 1.0;

  int size() const { return static_cast<int>(xi.rows()); }
};

/// -(3 gamma/4) e^{i xi}/xi^3 [xi^2 sin^2 alpha - (1 - i xi)(1 - 3 cos^2 alpha)].
/// Uses a series for the imaginary part below xi = 0.5, where the closed form
/// loses digits to cancellation.
Complex xi_coefficient(double xi_arg, double alpha, double gamma = 1.0);

CouplingMatrix coupling_matrix(const AtomGeometry& geom);

/// Every pair gets the same coupling `xi`, the idealised Dicke configuration.
CouplingMatrix uniform_coupling_matrix(int n_atoms, Complex xi, double gamma = 1.0);

/// Azimuth-integrated dipole pattern for alpha = pi/2: 3/4 - (3/8) sin^2 theta.
/// Normalised so that the integral against sin(theta) over [0, pi] is one.
double dipole_pattern(double theta);

}  // namespace ddemit
