#pragma once

// Direction-resolved emission: jump operators, time-integrated angular
// distributions from no-jump traces, and the closed-form distributions of
// the two- and three-atom models. Directional results assume alpha = pi/2.

#include <functional>
#include <string>
#include <vector>

#include "ddemit/dynamics.hpp"
#include "ddemit/hamiltonian.hpp"

namespace ddemit {

/// Uniform theta grid on [0, pi] with composite Simpson weights that already
/// include the sin(theta) measure.
struct AngularGrid {
  std::vector<double> thetas;
  std::vector<double> weights;

  std::size_t size() const { return thetas.size(); }
  /// Sum of weights[k] * f[k].
  double integrate(const std::vector<double>& f) const;
};

inline constexpr int kDefaultThetaPoints = 721;

/// n must be odd and at least 3.
AngularGrid make_angular_grid(int n = kDefaultThetaPoints);

enum class Provenance { numeric, analytic_b, analytic_c, analytic_omega, trajectory };
std::string to_string(Provenance p);

/// dicke_scale: values = factor * raw, with factor = initial emission rate /
///   (N gamma), which puts |b>, |c> on the Phi_b + Phi_c = D scale.
/// unit_total: values integrate to one against sin(theta).
/// raw: the plain time integral, factor = 1.
enum class NormalizationScheme { dicke_scale, unit_total, raw };
std::string to_string(NormalizationScheme n);
NormalizationScheme parse_normalization(const std::string& text);

struct AngularDistribution {
  AngularGrid grid;
  std::vector<double> values;
  Provenance provenance = Provenance::numeric;
  NormalizationScheme normalization = NormalizationScheme::raw;
  /// values = factor * (emission probability density per sin(theta) d theta).
  double factor = 1.0;
  std::vector<std::string> warnings;

  /// One-line description for file headers.
  std::string normalization_note() const;
};

/// sqrt(gamma D(theta)) sum_j exp(-i 2 pi s (j-1) cos theta) sigma_j^-.
/// Throws UnsupportedError unless alpha = pi/2.
CMatrix jump_operator(double theta, const AtomGeometry& geom);

/// Phi(theta) = int dt <psi(t)|S^dagger S|psi(t)> by trapezoid on the trace
/// grid, then scaled per `normalization`. Adds a warning when more than 1e-3
/// of the population survives at the end of the trace.
AngularDistribution angular_distribution_numeric(const StateTrace& trace, const AtomGeometry& geom,
                                                 const AngularGrid& grid,
                                                 NormalizationScheme normalization = NormalizationScheme::dicke_scale);

/// int Phi sin(theta) d theta / factor: the probability that a photon was
/// emitted within the trace.
double total_emission_probability(const AngularDistribution& dist);

double phi_b_analytic(double theta, double s);
double phi_c_analytic(double theta, double s);
AngularDistribution phi_b_distribution(const AngularGrid& grid, double s, double gamma = 1.0);
AngularDistribution phi_c_distribution(const AngularGrid& grid, double s, double gamma = 1.0);

/// 2 gamma D(theta) cos^2(Omega t + pi s cos theta).
double driven_matrix_element(double t, double theta, double omega, double s, double gamma = 1.0);

/// Time integrand of the driven pattern for psi(0) = |c>, written with real
/// hyperbolic or trigonometric functions on either side of 2 Omega = Gamma.
double phi_omega_integrand(double t, double theta, double s, double omega, double big_gamma, double gamma = 1.0);

/// Time integral of phi_omega_integrand over [0, inf) by adaptive
/// Gauss-Kronrod. Throws DomainError for gamma <= 0.
double phi_omega_value(double theta, double s, double omega, double big_gamma, double gamma = 1.0);
AngularDistribution phi_omega_analytic(const AngularGrid& grid, double s, double omega, double big_gamma,
                                       double gamma = 1.0);

/// Full bichromatic model and its two-level ansatz, both started in |c>.
struct DrivenComparisonSetup {
  AtomGeometry geom;
  DriveSpec exact_drive;
  std::function<double(double)> ansatz_omega;
  double t_end = 20.0;
  /// Spacing of the stored trace, i.e. the time quadrature step.
  double record_step = 0.001;
  EvolveOptions evolve;
};

struct DrivenComparison {
  AngularDistribution exact;
  AngularDistribution ansatz;
  double max_abs_discrepancy = 0.0;
};

DrivenComparison phi_omega_numeric_vs_exact(const DrivenComparisonSetup& setup, const AngularGrid& grid);

// ---------------------------------------------------------------------------
// Three atoms

enum class ProjectionState { b, c, psi_t };

/// chain: amplitudes computed from the linear-chain eigenvectors.
/// printed: the closed forms exactly as written in the source text, which
///   drop the first-atom term and agree with `chain` only at zeta = 0.
enum class ProjectionForm { chain, printed };

/// Amplitude on |a> of S(theta)|state>, where psi_t = cos(Omega t)|b> - i
/// sin(Omega t)|c> is the ansatz rotation without decay.
Complex three_atom_projection(ProjectionState state, double theta, const ThreeAtomSpectrum& spectrum, double s,
                              double omega = 0.0, double t = 0.0, double gamma = 1.0,
                              ProjectionForm form = ProjectionForm::chain);

}  // namespace ddemit
