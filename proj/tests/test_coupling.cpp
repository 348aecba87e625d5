#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "ddemit/coupling.hpp"

using namespace ddemit;

namespace {

// The coefficient evaluated in 50-digit arithmetic, where the 1/xi^3
// cancellation costs nothing.
Complex xi_oracle(double xi_arg, double alpha, double gamma = 1.0) {
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp x = xi_arg, a = alpha;
  const mp s2 = sin(a) * sin(a), c2 = cos(a) * cos(a);
  const mp k = 1 - 3 * c2;
  const mp A = x * x * s2 - k;  // real part of the bracket
  const mp B = x * k;           // imaginary part
  const mp re = cos(x) * A - sin(x) * B;
  const mp im = sin(x) * A + cos(x) * B;
  const mp pre = mp(-0.75) * gamma / (x * x * x);
  return {static_cast<double>(pre * re), static_cast<double>(pre * im)};
}

}  // namespace

TEST_SUITE("coupling") {
  TEST_CASE("xi = 1.25, alpha = 0 gives a coherent shift of about 1.2 gamma") {
    const Complex xi = xi_coefficient(1.25, 0.0);
    CHECK(std::abs(xi.real()) == doctest::Approx(1.2).epsilon(0.05));
    // Sign as printed by the formula.
    CHECK(xi.real() < 0.0);
  }

  TEST_CASE("tiny separation recovers single-atom collective decay") {
    const Complex xi = xi_coefficient(1e-4, kPi / 2);
    CHECK(std::abs(-2.0 * xi.imag() - 1.0) < 1e-6);
    const Complex ref = xi_oracle(1e-4, kPi / 2);
    CHECK(std::abs(xi.imag() - ref.imag()) < 1e-12);
  }

  TEST_CASE("agrees with the multiprecision oracle across separations and angles") {
    for (double x : {1e-4, 1e-3, 1e-2, 0.1, 0.4999, 0.5, 0.5001, 1.0, 1.25, 2.5, 7.0, 10.0}) {
      for (double a : {0.0, 0.3, kPi / 4, 1.2, kPi / 2}) {
        const Complex got = xi_coefficient(x, a);
        const Complex ref = xi_oracle(x, a);
        CAPTURE(x);
        CAPTURE(a);
        CHECK(std::abs(got.real() - ref.real()) <= 1e-12 * std::max(1.0, std::abs(ref.real())));
        CHECK(std::abs(got.imag() - ref.imag()) <= 1e-12);
      }
    }
  }

  TEST_CASE("small-separation limits at alpha = pi/2") {
    for (double x : {1e-2, 1e-3, 1e-4}) {
      const Complex xi = xi_coefficient(x, kPi / 2);
      const Complex ref = xi_oracle(x, kPi / 2);
      CHECK(-2.0 * xi.imag() == doctest::Approx(1.0).epsilon(1e-3));
      // Delta xi^3 -> 3/4 for perpendicular dipoles.
      CHECK(xi.real() * x * x * x == doctest::Approx(0.75).epsilon(1e-3));
      CHECK(xi.real() == doctest::Approx(ref.real()).epsilon(1e-12));
    }
  }

  TEST_CASE("continuity on (0, 10]") {
    // Relative change over a 1e-7 relative step; the 1/xi^4 slope dominates near zero.
    auto jump = [](double x, double a) {
      const Complex lo = xi_coefficient(x, a), hi = xi_coefficient(x * (1.0 + 1e-7), a);
      return std::abs(hi - lo) / std::abs(lo);
    };
    double worst = 0.0;
    for (double x = 0.05; x <= 10.0; x += 0.0137) worst = std::max(worst, jump(x, kPi / 2));
    // Around the series switch specifically.
    for (double a : {0.0, kPi / 2}) {
      worst = std::max(worst, jump(0.5 - 1e-9, a));
      const double gap = std::abs(xi_coefficient(0.5, a).imag() - xi_coefficient(std::nextafter(0.5, 0.0), a).imag());
      CHECK(gap < 1e-13);
    }
    CHECK(worst < 1e-5);
  }

  TEST_CASE("non-positive separation is a domain error") {
    CHECK_THROWS_AS(xi_coefficient(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(xi_coefficient(-1.0, 0.0), DomainError);
  }

  TEST_CASE("coupling matrix: single atom has no pairs") {
    AtomGeometry g;
    g.n_atoms = 1;
    const CouplingMatrix m = coupling_matrix(g);
    CHECK(m.size() == 1);
    CHECK(m.xi(0, 0) == Complex(0.0));
  }

  TEST_CASE("coupling matrix: three atoms at s = 0.2") {
    AtomGeometry g;
    g.n_atoms = 3;
    g.spacing = 0.2;
    const CouplingMatrix m = coupling_matrix(g);
    CHECK(m.xi_args(0, 1) == doctest::Approx(0.4 * kPi));
    CHECK(m.xi_args(1, 2) == doctest::Approx(0.4 * kPi));
    CHECK(m.xi_args(0, 2) == doctest::Approx(0.8 * kPi));
    const auto pos = g.positions();
    CHECK(pos[0] == 0.0);
    CHECK(pos[2] - pos[1] == doctest::Approx(pos[1] - pos[0]));
  }

  TEST_CASE("coupling matrix: s = 0.199, alpha = 0") {
    AtomGeometry g{2, 0.199, 0.0, 1.0};
    const CouplingMatrix m = coupling_matrix(g);
    CHECK(std::abs(m.delta(0, 1)) == doctest::Approx(1.2).epsilon(0.05));
  }

  TEST_CASE("coupling matrix invariants on random geometries") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> us(0.001, 2.0), ua(0.0, kPi);
    for (int trial = 0; trial < 200; ++trial) {
      AtomGeometry g{1 + trial % 5, us(rng), ua(rng), 1.0};
      const CouplingMatrix m = coupling_matrix(g);
      for (int i = 0; i < g.n_atoms; ++i) {
        for (int j = 0; j < g.n_atoms; ++j) {
          if (i == j) continue;
          CHECK(m.xi(i, j) == m.xi(j, i));
          CHECK(m.delta(i, j) == m.xi(i, j).real());
          CHECK(m.gamma_ij(i, j) == -2.0 * m.xi(i, j).imag());
          const Complex back(m.delta(i, j), -0.5 * m.gamma_ij(i, j));
          CHECK(back == m.xi(i, j));
          CHECK(m.gamma_ij(i, j) <= g.gamma + 1e-12);
          CHECK(m.xi_args(i, j) == doctest::Approx(2.0 * kPi * g.spacing * std::abs(i - j)));
        }
      }
    }
  }

  TEST_CASE("zero spacing with two atoms is rejected") {
    AtomGeometry g{2, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(coupling_matrix(g), DomainError);
    g.spacing = -0.1;
    CHECK_THROWS_AS(coupling_matrix(g), DomainError);
    g = {kMaxAtoms + 1, 0.2, 0.0, 1.0};
    CHECK_THROWS_AS(coupling_matrix(g), UnsupportedError);
  }

  TEST_CASE("uniform couplings") {
    const Complex x = xi_coefficient(0.3, kPi / 2);
    const CouplingMatrix m = uniform_coupling_matrix(3, x);
    CHECK(m.xi(0, 2) == x);
    CHECK(m.xi(1, 1) == Complex(0.0));
  }

  TEST_CASE("dipole pattern") {
    CHECK(dipole_pattern(kPi / 2) == doctest::Approx(0.375));
    CHECK(dipole_pattern(0.0) == doctest::Approx(0.75));
    for (double th : {0.1, 0.7, 1.3}) CHECK(dipole_pattern(th) == doctest::Approx(dipole_pattern(kPi - th)));
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [](double th) { return dipole_pattern(th) * std::sin(th); }, 0.0, kPi, 5, 1e-15);
    CHECK(std::abs(integral - 1.0) < 1e-12);
    CHECK_THROWS(dipole_pattern(-0.1));
    CHECK_THROWS(dipole_pattern(kPi + 0.1));
  }
}
