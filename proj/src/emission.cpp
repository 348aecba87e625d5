#include "ddemit/emission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/sinc.hpp>
#include <boost/math/special_functions/sinhc.hpp>

namespace ddemit {

double AngularGrid::integrate(const std::vector<double>& f) const {
  if (f.size() != weights.size()) throw std::invalid_argument("AngularGrid::integrate: size mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) sum += weights[k] * f[k];
  return sum;
}

AngularGrid make_angular_grid(int n) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("theta grid needs an odd number of points >= 3");
  AngularGrid g;
  g.thetas.resize(n);
  g.weights.resize(n);
  const double h = kPi / (n - 1);
  for (int k = 0; k < n; ++k) {
    const double th = (k == n - 1) ? kPi : k * h;
    const double simpson = (k == 0 || k == n - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    g.thetas[k] = th;
    g.weights[k] = simpson * h / 3.0 * std::sin(th);
  }
  return g;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::numeric: return "numeric";
    case Provenance::analytic_b: return "analytic-b";
    case Provenance::analytic_c: return "analytic-c";
    case Provenance::analytic_omega: return "analytic-omega";
    case Provenance::trajectory: return "trajectory";
  }
  return "unknown";
}

std::string to_string(NormalizationScheme n) {
  switch (n) {
    case NormalizationScheme::dicke_scale: return "dicke_scale";
    case NormalizationScheme::unit_total: return "unit_total";
    case NormalizationScheme::raw: return "raw";
  }
  return "unknown";
}

NormalizationScheme parse_normalization(const std::string& text) {
  if (text == "dicke_scale") return NormalizationScheme::dicke_scale;
  if (text == "unit_total") return NormalizationScheme::unit_total;
  if (text == "raw") return NormalizationScheme::raw;
  throw std::invalid_argument("unknown normalization '" + text + "' (expected dicke_scale, unit_total or raw)");
}

std::string AngularDistribution::normalization_note() const {
  std::ostringstream s;
  s.precision(17);
  switch (normalization) {
    case NormalizationScheme::dicke_scale:
      s << "dicke_scale: Phi = K * int dt <S^+S>, K = initial emission rate / (N gamma) = " << factor
        << " (Phi_b + Phi_c = D scale)";
      break;
    case NormalizationScheme::unit_total:
      s << "unit_total: int Phi sin(theta) dtheta = 1, raw total emission probability = " << 1.0 / factor;
      break;
    case NormalizationScheme::raw:
      s << "raw: Phi = int dt <S^+S>, emission probability per sin(theta) dtheta";
      break;
  }
  return s.str();
}

namespace {

void require_perpendicular(const AtomGeometry& geom) {
  if (std::abs(geom.alpha - kPi / 2) > 1e-12) {
    throw UnsupportedError("directional emission is modelled for alpha = pi/2 only");
  }
}

std::vector<Complex> direction_phases(int n, double s, double theta) {
  std::vector<Complex> p(n);
  const double c = std::cos(theta);
  for (int j = 0; j < n; ++j) p[j] = std::exp(Complex(0.0, -2.0 * kPi * s * j * c));
  return p;
}

}  // namespace

CMatrix jump_operator(double theta, const AtomGeometry& geom) {
  geom.validate();
  require_perpendicular(geom);
  const double amp = std::sqrt(geom.gamma * dipole_pattern(theta));
  const auto p = direction_phases(geom.n_atoms, geom.spacing, theta);
  const int dim = product_dimension(geom.n_atoms);
  CMatrix s = CMatrix::Zero(dim, dim);
  for (int j = 0; j < geom.n_atoms; ++j) s += p[j] * lowering_operator(geom.n_atoms, j);
  return amp * s;
}

AngularDistribution angular_distribution_numeric(const StateTrace& trace, const AtomGeometry& geom,
                                                 const AngularGrid& grid, NormalizationScheme normalization) {
  geom.validate();
  require_perpendicular(geom);
  if (trace.n_atoms != geom.n_atoms) throw std::invalid_argument("trace and geometry disagree on n_atoms");
  const int n = geom.n_atoms;
  std::vector<CMatrix> lower;
  for (int j = 0; j < n; ++j) lower.push_back(lowering_operator(n, j));

  // Time-integrated Gram matrix of the vectors sigma_j^- psi(t); the
  // direction dependence then only enters through the phase vector.
  CMatrix gram = CMatrix::Zero(n, n);
  auto gram_at = [&](const CVector& psi) {
    CMatrix v(psi.size(), n);
    for (int j = 0; j < n; ++j) v.col(j) = lower[j] * psi;
    return CMatrix(v.adjoint() * v);
  };
  CMatrix prev = gram_at(trace.states.front());
  for (std::size_t k = 1; k < trace.size(); ++k) {
    CMatrix cur = gram_at(trace.states[k]);
    gram += 0.5 * (trace.times[k] - trace.times[k - 1]) * (prev + cur);
    prev = std::move(cur);
  }

  AngularDistribution dist;
  dist.grid = grid;
  dist.provenance = Provenance::numeric;
  dist.normalization = normalization;
  dist.values.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto p = direction_phases(n, geom.spacing, grid.thetas[k]);
    CVector pv(n);
    for (int j = 0; j < n; ++j) pv(j) = p[j];
    const double q = pv.dot(gram * pv).real();
    dist.values[k] = std::max(0.0, geom.gamma * dipole_pattern(grid.thetas[k]) * q);
  }

  const double survival = trace.states.back().squaredNorm();
  if (survival > 1e-3) {
    std::ostringstream msg;
    msg << "trace ends with survival probability " << survival << " > 1e-3; distribution misses that tail";
    dist.warnings.push_back(msg.str());
  }

  double factor = 1.0;
  if (normalization == NormalizationScheme::dicke_scale) {
    const CouplingMatrix cm = coupling_matrix(geom);
    const CVector& psi0 = trace.states.front();
    double rate = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double g = (i == j) ? geom.gamma : cm.gamma_ij(i, j);
        rate += g * (lower[i] * psi0).dot(lower[j] * psi0).real();
      }
    }
    if (rate > 0.0) factor = rate / (n * geom.gamma);
  } else if (normalization == NormalizationScheme::unit_total) {
    const double total = grid.integrate(dist.values);
    if (total > 0.0) factor = 1.0 / total;
  }
  for (double& v : dist.values) v *= factor;
  dist.factor = factor;
  return dist;
}

double total_emission_probability(const AngularDistribution& dist) {
  return dist.grid.integrate(dist.values) / dist.factor;
}

double phi_b_analytic(double theta, double s) {
  const double x = std::sin(kPi * s * std::cos(theta));
  return dipole_pattern(theta) * x * x;
}

double phi_c_analytic(double theta, double s) {
  const double x = std::cos(kPi * s * std::cos(theta));
  return dipole_pattern(theta) * x * x;
}

namespace {

double two_atom_gamma12(double s, double gamma) {
  return -2.0 * xi_coefficient(2.0 * kPi * s, kPi / 2, gamma).imag();
}

AngularDistribution analytic_distribution(const AngularGrid& grid, Provenance prov, double factor,
                                          const std::function<double(double)>& f) {
  AngularDistribution d;
  d.grid = grid;
  d.provenance = prov;
  d.normalization = NormalizationScheme::dicke_scale;
  d.factor = factor;
  d.values.reserve(grid.size());
  for (double th : grid.thetas) d.values.push_back(f(th));
  return d;
}

}  // namespace

AngularDistribution phi_b_distribution(const AngularGrid& grid, double s, double gamma) {
  const double g12 = two_atom_gamma12(s, gamma);
  return analytic_distribution(grid, Provenance::analytic_b, (gamma - g12) / (2.0 * gamma),
                               [s](double th) { return phi_b_analytic(th, s); });
}

AngularDistribution phi_c_distribution(const AngularGrid& grid, double s, double gamma) {
  const double g12 = two_atom_gamma12(s, gamma);
  return analytic_distribution(grid, Provenance::analytic_c, (gamma + g12) / (2.0 * gamma),
                               [s](double th) { return phi_c_analytic(th, s); });
}

double driven_matrix_element(double t, double theta, double omega, double s, double gamma) {
  const double c = std::cos(omega * t + kPi * s * std::cos(theta));
  return 2.0 * gamma * dipole_pattern(theta) * c * c;
}

double phi_omega_integrand(double t, double theta, double s, double omega, double big_gamma, double gamma) {
  const double half_zeta = kPi * s * std::cos(theta);
  const double q = big_gamma * big_gamma - 4.0 * omega * omega;  // Omega_R^2
  // ch and sc carry the e^{-gamma t / 2} envelope so that the hyperbolic
  // branch never forms inf * 0 at large t.
  const double damp = 0.5 * gamma * t;
  double ch, sc;
  if (q >= 0.0) {
    const double x = 0.5 * std::sqrt(q) * t;
    if (x < 1.0) {
      const double e = std::exp(-damp);
      ch = std::cosh(x) * e;
      sc = boost::math::sinhc_pi(x) * e;
    } else {
      const double up = std::exp(x - damp), down = std::exp(-x - damp);
      ch = 0.5 * (up + down);
      sc = 0.5 * (up - down) / x;
    }
  } else {
    const double x = 0.5 * std::sqrt(-q) * t;
    const double e = std::exp(-damp);
    ch = std::cos(x) * e;
    sc = boost::math::sinc_pi(x) * e;
  }
  const double bterm = big_gamma * std::cos(half_zeta) + 2.0 * omega * std::sin(half_zeta);
  const double amp = std::cos(half_zeta) * ch - bterm * 0.5 * t * sc;
  return dipole_pattern(theta) * (gamma + big_gamma) * amp * amp;
}

double phi_omega_value(double theta, double s, double omega, double big_gamma, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("phi_omega: gamma must be positive for the time integral to converge");
  auto f = [&](double t) { return phi_omega_integrand(t, theta, s, omega, big_gamma, gamma); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-13, &err);
}

AngularDistribution phi_omega_analytic(const AngularGrid& grid, double s, double omega, double big_gamma,
                                       double gamma) {
  if (!(gamma > 0.0)) throw DomainError("phi_omega: gamma must be positive for the time integral to converge");
  return analytic_distribution(grid, Provenance::analytic_omega, (gamma + big_gamma) / (2.0 * gamma),
                               [&](double th) { return phi_omega_value(th, s, omega, big_gamma, gamma); });
}

DrivenComparison phi_omega_numeric_vs_exact(const DrivenComparisonSetup& setup, const AngularGrid& grid) {
  const AtomGeometry& geom = setup.geom;
  if (geom.n_atoms != 2) throw UnsupportedError("the driven comparison is defined for two atoms");
  const CouplingMatrix cm = coupling_matrix(geom);
  const CollectiveBasis basis = collective_basis_two(cm);
  const CVector c = basis.ket("c");
  const auto t_grid = grid_with_spacing(0.0, setup.t_end, setup.record_step);

  EffectiveHamiltonian exact = system_hamiltonian(geom, cm);
  add_drive(exact, setup.exact_drive);
  const StateTrace exact_trace = evolve(exact, c, t_grid, setup.evolve);

  const EffectiveHamiltonian ansatz = ansatz_hamiltonian(geom, cm, setup.ansatz_omega);
  const StateTrace ansatz_trace = evolve(ansatz, c, t_grid, setup.evolve);

  DrivenComparison out;
  out.exact = angular_distribution_numeric(exact_trace, geom, grid);
  out.ansatz = angular_distribution_numeric(ansatz_trace, geom, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.max_abs_discrepancy = std::max(out.max_abs_discrepancy, std::abs(out.exact.values[k] - out.ansatz.values[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------

Complex three_atom_projection(ProjectionState state, double theta, const ThreeAtomSpectrum& sp, double s,
                              double omega, double t, double gamma, ProjectionForm form) {
  const double zeta = 2.0 * kPi * s * std::cos(theta);
  const double root = std::sqrt(dipole_pattern(theta) * gamma);
  const double norm_b = std::sqrt(1.0 - sp.delta13 / sp.delta_split);
  const Complex i(0.0, 1.0);
  const Complex e1 = std::exp(i * zeta);

  Complex proj_b, proj_c;
  if (form == ProjectionForm::printed) {
    const Complex pre = std::exp(-2.0 * i * zeta) * root / (2.0 * sp.kappa);
    proj_b = pre * norm_b * (sp.kappa - e1 * sp.eta);
    proj_c = std::exp(-2.0 * i * zeta) * (1.0 - e1) * root / std::sqrt(2.0);
    if (state == ProjectionState::psi_t) {
      return pre * (norm_b * (sp.kappa - e1 * sp.eta) * std::cos(omega * t) +
                    i * std::sqrt(2.0) * (e1 - 1.0) * sp.kappa * std::sin(omega * t));
    }
  } else {
    if (sp.kappa == 0.0) throw DomainError("three_atom_projection: kappa = 0");
    const Complex em1 = std::conj(e1), em2 = em1 * em1;
    // |b> = (1, x_b, 1) sqrt(1 - Delta13/delta) / 2 with x_b = -(kappa + eta) / kappa.
    proj_b = root * norm_b / (2.0 * sp.kappa) * (sp.kappa * (1.0 + em2) - (sp.kappa + sp.eta) * em1);
    // |c> = (|atom 3> - |atom 1>) / sqrt2.
    proj_c = root / std::sqrt(2.0) * (em2 - 1.0);
  }
  switch (state) {
    case ProjectionState::b: return proj_b;
    case ProjectionState::c: return proj_c;
    case ProjectionState::psi_t: return std::cos(omega * t) * proj_b - i * std::sin(omega * t) * proj_c;
  }
  return 0.0;
}

}  // namespace ddemit
