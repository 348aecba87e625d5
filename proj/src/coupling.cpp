#include "ddemit/coupling.hpp"

#include <cmath>
#include <sstream>

namespace ddemit {

namespace {

// (sin x - x cos x) / x^3, stable near zero.
double sin_minus_xcos_over_cube(double x) {
  if (x >= 0.5) {
    return (std::sin(x) - x * std::cos(x)) / (x * x * x);
  }
  // sum_{k>=1} (-1)^{k+1} 2k x^{2k-2} / (2k+1)!
  const double x2 = x * x;
  double term_pow = 1.0;
  double factorial = 6.0;  // 3!
  double sum = 0.0;
  for (int k = 1; k <= 14; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    sum += sign * 2.0 * k * term_pow / factorial;
    term_pow *= x2;
    factorial *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
  }
  return sum;
}

}  // namespace

void AtomGeometry::validate() const {
  if (n_atoms < 1 || n_atoms > kMaxAtoms) {
    std::ostringstream os;
    os << "n_atoms must be in [1, " << kMaxAtoms << "], got " << n_atoms;
    throw UnsupportedError(os.str());
  }
  if (n_atoms >= 2 && !(spacing > 0.0)) {
    throw DomainError("spacing must be positive for two or more atoms");
  }
  if (!std::isfinite(spacing) || !std::isfinite(alpha)) {
    throw DomainError("geometry parameters must be finite");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("gamma must be positive and finite");
  }
}

std::vector<double> AtomGeometry::positions() const {
  std::vector<double> out(static_cast<std::size_t>(n_atoms));
  for (int i = 0; i < n_atoms; ++i) out[static_cast<std::size_t>(i)] = i * spacing;
  return out;
}

AtomGeometry AtomGeometry::from_xi(int n_atoms, double xi, double alpha, double gamma) {
  return AtomGeometry{n_atoms, xi / (2.0 * kPi), alpha, gamma};
}

Complex xi_coefficient(double xi_arg, double alpha, double gamma) {
  if (!(xi_arg > 0.0) || !std::isfinite(xi_arg)) {
    throw DomainError("xi_coefficient: separation must be positive (coincident atoms?)");
  }
  const double x = xi_arg;
  const double c = std::cos(alpha);
  const double v = std::sin(alpha) * std::sin(alpha);
  const double u = 1.0 - 3.0 * c * c;
  const double pre = -0.75 * gamma;
  // e^{ix}(1 - ix) = (cos x + x sin x) + i (sin x - x cos x)
  const double re = v * std::cos(x) / x - u * (std::cos(x) + x * std::sin(x)) / (x * x * x);
  const double im = v * std::sin(x) / x - u * sin_minus_xcos_over_cube(x);
  return {pre * re, pre * im};
}

CouplingMatrix coupling_matrix(const AtomGeometry& geom) {
  geom.validate();
  const int n = geom.n_atoms;
  CouplingMatrix m;
  m.gamma = geom.gamma;
  m.xi = CMatrix::Zero(n, n);
  m.delta = RMatrix::Zero(n, n);
  m.gamma_ij = RMatrix::Zero(n, n);
  m.xi_args = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double arg = geom.xi_neighbour() * (j - i);
      const Complex value = xi_coefficient(arg, geom.alpha, geom.gamma);
      m.xi(i, j) = m.xi(j, i) = value;
      m.delta(i, j) = m.delta(j, i) = value.real();
      m.gamma_ij(i, j) = m.gamma_ij(j, i) = -2.0 * value.imag();
      m.xi_args(i, j) = m.xi_args(j, i) = arg;
    }
  }
  return m;
}

CouplingMatrix uniform_coupling_matrix(int n_atoms, Complex xi, double gamma) {
  if (n_atoms < 1 || n_atoms > kMaxAtoms) {
    throw UnsupportedError("uniform_coupling_matrix: unsupported atom count");
  }
  CouplingMatrix m;
  m.gamma = gamma;
  m.xi = CMatrix::Constant(n_atoms, n_atoms, xi);
  m.xi.diagonal().setZero();
  m.delta = m.xi.real();
  m.gamma_ij = -2.0 * m.xi.imag();
  m.xi_args = RMatrix::Zero(n_atoms, n_atoms);
  return m;
}

double dipole_pattern(double theta) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("dipole_pattern: theta outside [0, pi]");
  }
  const double s = std::sin(theta);
  return 0.75 - 0.375 * s * s;
}

}  // namespace ddemit
