#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "ddemit/hamiltonian.hpp"

using namespace ddemit;

namespace {

CouplingMatrix pair_couplings(double s, double alpha = kPi / 2) { return coupling_matrix({2, s, alpha, 1.0}); }

// Drive matrix element in the interaction picture of the Hermitian system
// part: <x| H_I(t) |y> e^{i (E_x - E_y) t}, all built from scratch.
CMatrix to_interaction_picture(const CMatrix& h_product, const CollectiveBasis& basis, double t) {
  CMatrix h = basis.transform() * h_product * basis.kets;
  for (int x = 0; x < h.rows(); ++x) {
    for (int y = 0; y < h.cols(); ++y) {
      h(x, y) *= std::exp(Complex(0.0, (basis.energies[x] - basis.energies[y]) * t));
    }
  }
  return h;
}

CMatrix weighted_lowering(const std::vector<Complex>& w) {
  const int n = static_cast<int>(w.size());
  CMatrix l = CMatrix::Zero(product_dimension(n), product_dimension(n));
  for (int j = 0; j < n; ++j) l += w[j] * lowering_operator(n, j);
  return l;
}

}  // namespace

TEST_SUITE("hamiltonian") {
  TEST_CASE("product basis bookkeeping") {
    CHECK(product_dimension(1) == 2);
    CHECK(product_dimension(3) == 8);
    CHECK_THROWS_AS(product_dimension(0), UnsupportedError);
    CHECK_THROWS_AS(product_dimension(kMaxAtoms + 1), UnsupportedError);
    CHECK(excitation_count(5) == 2);

    // |10> (index 2) is atom 2 excited; sigma_2^- takes it to |00>.
    const CMatrix s2 = lowering_operator(2, 1);
    CHECK(s2(0, 2) == Complex(1.0));
    CHECK(s2(0, 1) == Complex(0.0));
    const CollectiveBasis pb = product_basis(2);
    CHECK(pb.labels[2] == "10");
    CHECK(product_basis(1).labels[1] == "e");
  }

  TEST_CASE("single atom decays at gamma") {
    AtomGeometry g{1, 0.2, kPi / 2, 1.0};
    const EffectiveHamiltonian h = system_hamiltonian(g, coupling_matrix(g));
    CHECK(h.matrix(0.0)(1, 1) == Complex(0.0, -0.5));
    CHECK(h.matrix(0.0)(0, 0) == Complex(0.0));
  }

  TEST_CASE("two-atom one-excitation spectrum") {
    for (double s : {0.05, 0.2, 0.37}) {
      const CouplingMatrix cm = pair_couplings(s);
      const CMatrix h = system_hamiltonian({2, s, kPi / 2, 1.0}, cm).matrix(0.0);
      const Complex xi = cm.xi(0, 1);
      // [[-i/2, xi], [xi, -i/2]] has eigenvalues -i/2 -+ xi.
      Eigen::Matrix2cd block;
      block << h(1, 1), h(1, 2), h(2, 1), h(2, 2);
      Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(block);
      std::vector<Complex> got{es.eigenvalues()(0), es.eigenvalues()(1)};
      std::vector<Complex> want{Complex(0.0, -0.5) + xi, Complex(0.0, -0.5) - xi};
      auto by_real = [](Complex a, Complex b) { return a.real() < b.real(); };
      std::sort(got.begin(), got.end(), by_real);
      std::sort(want.begin(), want.end(), by_real);
      for (int k = 0; k < 2; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-12);
      CHECK(h(3, 3) == Complex(0.0, -1.0));
    }
  }

  TEST_CASE("no decay gives a Hermitian Hamiltonian") {
    AtomGeometry g{3, 0.2, kPi / 2, 1.0};
    SystemOptions o;
    o.single_atom_decay = false;
    o.cross_decay = false;
    const CMatrix h = system_hamiltonian(g, coupling_matrix(g), o).matrix(0.0);
    CHECK((h - h.adjoint()).norm() < 1e-14);
  }

  TEST_CASE("two-atom basis: energies and widths") {
    const CouplingMatrix cm = pair_couplings(0.2);
    const CollectiveBasis b = collective_basis_two(cm);
    CHECK((b.kets.adjoint() * b.kets - CMatrix::Identity(4, 4)).norm() < 1e-14);
    const double d = cm.delta(0, 1), g12 = cm.gamma_ij(0, 1);
    CHECK(b.energies[b.index("b")] == doctest::Approx(-d));
    CHECK(b.energies[b.index("c")] == doctest::Approx(d));
    CHECK(b.widths[b.index("b")] == doctest::Approx(1.0 - g12));
    CHECK(b.widths[b.index("c")] == doctest::Approx(1.0 + g12));
    CHECK(b.widths[b.index("d")] == doctest::Approx(2.0));
    CHECK_THROWS(b.index("z"));
  }

  TEST_CASE("drive selection rules for two atoms") {
    const CollectiveBasis basis = collective_basis_two(pair_couplings(0.2));
    const CMatrix t = basis.transform();
    const CMatrix sym = t * weighted_lowering(symmetric_weights(2)) * basis.kets;
    const CMatrix anti = t * weighted_lowering(antisymmetric_weights(2)) * basis.kets;
    const int a = 0, b = 1, c = 2, d = 3;
    CHECK(std::abs(sym(a, b)) < 1e-14);
    CHECK(std::abs(sym(b, d)) < 1e-14);
    CHECK(std::abs(sym(a, c)) > 1.0);
    CHECK(std::abs(sym(c, d)) > 1.0);
    CHECK(std::abs(anti(a, c)) < 1e-14);
    CHECK(std::abs(anti(c, d)) < 1e-14);
    CHECK(std::abs(anti(a, b)) > 1.0);
    CHECK(std::abs(anti(b, d)) > 1.0);
  }

  TEST_CASE("drive Hamiltonian carries the one-half convention") {
    DriveSpec spec;
    spec.fields.push_back({"mu", [](double) { return 2.0; }, 0.0, symmetric_weights(1)});
    const CMatrix h = drive_hamiltonian(spec, 1, 0.3);
    CHECK(h(0, 1) == Complex(1.0));
    CHECK(h(1, 0) == Complex(1.0));

    EffectiveHamiltonian eff(1, CMatrix::Zero(2, 2));
    spec.fields[0].detuning = 1.7;
    add_drive(eff, spec);
    for (double t : {0.0, 0.4, 2.2}) CHECK((eff.matrix(t) - drive_hamiltonian(spec, 1, t)).norm() < 1e-14);

    spec.fields[0].weights = {Complex(2.0)};
    CHECK_THROWS_AS(drive_hamiltonian(spec, 1, 0.0), DomainError);
  }

  TEST_CASE("plane-wave weights") {
    const auto w = plane_wave_weights(3, 0.2, kPi / 3);
    CHECK(w[0] == Complex(1.0));
    CHECK(std::arg(w[2]) == doctest::Approx(std::remainder(-2.0 * kPi * 0.2 * 2 * 0.5, 2 * kPi)));
    const auto n = plane_wave_weights(3, 0.2, kPi / 2);
    for (auto x : n) CHECK(std::abs(x - 1.0) < 1e-12);
  }

  TEST_CASE("collective drive matches the frame transformation at random points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0), us(0.05, 0.45), ut(0.0, 20.0);
    for (int trial = 0; trial < 100; ++trial) {
      const double s = us(rng), e_mu = u(rng), e_nu = u(rng), wd = 10.0 * u(rng), t = ut(rng);
      const CouplingMatrix cm = pair_couplings(s);
      const CollectiveBasis basis = collective_basis_two(cm);
      const double delta = cm.delta(0, 1);
      const auto car = two_atom_carriers(delta, wd);
      DriveSpec spec;
      spec.fields.push_back({"mu", [e_mu](double) { return e_mu; }, car.mu, symmetric_weights(2)});
      spec.fields.push_back({"nu", [e_nu](double) { return e_nu; }, car.nu, antisymmetric_weights(2)});
      const CMatrix oracle = to_interaction_picture(drive_hamiltonian(spec, 2, t), basis, t);
      const CMatrix got = two_atom_collective_drive(e_mu, e_nu, wd, delta, t);
      CHECK((oracle - got).norm() < 1e-11);
    }
  }

  TEST_CASE("Raman coupling") {
    std::vector<std::string> warnings;
    const Complex g = raman_effective_coupling(3.0, 2.0, 30.0, &warnings);
    CHECK(g == Complex(0.1));
    CHECK(warnings.empty());
    raman_effective_coupling(Complex(0.0, 3.0), 2.0, 10.0, &warnings);
    CHECK(warnings.size() == 1);
    CHECK(raman_effective_coupling(Complex(0.0, 3.0), Complex(0.0, 2.0), 30.0) == Complex(0.1));
    CHECK_THROWS_AS(raman_effective_coupling(1.0, 1.0, 0.0), DomainError);
    CHECK(raman_is_valid(1.0, 2.0, 10.0));
    CHECK_FALSE(raman_is_valid(1.0, 2.0, 9.99));
  }

  TEST_CASE("two-atom dark state is annihilated by the resonant coupling to d") {
    for (auto [e_mu, e_nu] : {std::pair{0.0, 1.0}, {1.0, 0.0}, {0.3, 0.8}, {-0.5, 0.2}}) {
      const QubitState q = dark_state_two(e_mu, e_nu);
      CHECK(std::norm(q.b) + std::norm(q.c) == doctest::Approx(1.0));
      const CMatrix h = two_atom_collective_drive(e_mu, e_nu, 0.0, 0.4, 0.0);
      CVector v = CVector::Zero(4);
      v(1) = q.b;
      v(2) = q.c;
      CHECK(std::abs((h * v)(3)) < 1e-14);
    }
    // Only the nu field on: the dark state is |c>.
    CHECK(dark_state_two(0.0, 1.0).c == Complex(1.0));
    CHECK_THROWS_AS(dark_state_two(0.0, 0.0), DomainError);
  }

  TEST_CASE("ansatz Hamiltonian") {
    AtomGeometry g{2, 0.2, kPi / 2, 1.0};
    const CouplingMatrix cm = coupling_matrix(g);
    const EffectiveHamiltonian h = ansatz_hamiltonian(g, cm, [](double t) { return 2.0 * t; });
    const CollectiveBasis basis = collective_basis_two(cm);
    const CMatrix m = basis.transform() * h.matrix(1.5) * basis.kets;
    CHECK(std::abs(m(1, 2) - 3.0) < 1e-14);
    CHECK(std::abs(m(2, 1) - 3.0) < 1e-14);
    CHECK(m(1, 1).real() == doctest::Approx(0.0));
    CHECK(-2.0 * m(2, 2).imag() == doctest::Approx(1.0 + cm.gamma_ij(0, 1)));
  }

  TEST_CASE("three-atom spectrum") {
    const CouplingMatrix cm = coupling_matrix({3, 0.2, kPi / 2, 1.0});
    const auto [basis, sp] = collective_basis_three(cm);
    const double d12 = sp.delta12, d13 = sp.delta13;
    CHECK((basis.kets.adjoint() * basis.kets - CMatrix::Identity(8, 8)).norm() < 1e-13);

    // One-excitation energies are the roots of -l^3 + l(2 d12^2 + d13^2) + 2 d12^2 d13.
    auto poly = [&](double l) { return -l * l * l + l * (2 * d12 * d12 + d13 * d13) + 2 * d12 * d12 * d13; };
    for (const char* label : {"b", "c", "d"}) CHECK(std::abs(poly(basis.energies[basis.index(label)])) < 1e-12);
    // Two-excitation partners share the one-excitation energies.
    CHECK(basis.energies[basis.index("e")] == doctest::Approx(std::min(basis.energies[1], basis.energies[3])));
    CHECK(basis.energies[basis.index("f")] == doctest::Approx(basis.energies[basis.index("c")]));

    CHECK(sp.delta_split == doctest::Approx(std::sqrt(8 * d12 * d12 + d13 * d13)));
    CHECK(sp.gamma_b < sp.gamma_c);
    CHECK(basis.widths[basis.index("b")] < basis.widths[basis.index("d")]);
    CHECK(basis.widths[basis.index("h")] == doctest::Approx(3.0));

    // c = (|atom3> - |atom1>)/sqrt2 with the last component real positive.
    const CVector c = basis.ket("c");
    CHECK(c(4) == Complex(1.0 / std::sqrt(2.0)));
    CHECK(c(1) == Complex(-1.0 / std::sqrt(2.0)));
    for (int k = 0; k < 8; ++k) {
      const CVector v = basis.kets.col(k);
      for (int m = 7; m >= 0; --m) {
        if (std::abs(v(m)) > 1e-12) {
          CHECK(v(m).imag() == 0.0);
          CHECK(v(m).real() > 0.0);
          break;
        }
      }
    }
  }

  TEST_CASE("three atoms with equal couplings: symmetric state is superradiant") {
    const Complex xi = xi_coefficient(0.3 * 2 * kPi, kPi / 2);
    const CouplingMatrix cm = uniform_coupling_matrix(3, xi);
    const auto [basis, sp] = collective_basis_three(cm);
    CVector w = CVector::Zero(8);
    w(1) = w(2) = w(4) = 1.0 / std::sqrt(3.0);
    const double g12 = -2.0 * xi.imag();
    const double overlap_b = std::abs(basis.ket("b").dot(w)), overlap_d = std::abs(basis.ket("d").dot(w));
    CHECK(std::max(overlap_b, overlap_d) == doctest::Approx(1.0));
    const std::string label = overlap_b > overlap_d ? "b" : "d";
    CHECK(basis.widths[basis.index(label)] == doctest::Approx(1.0 + 2.0 * g12));
    CHECK(basis.energies[basis.index(label)] == doctest::Approx(2.0 * xi.real()));
  }

  TEST_CASE("three-atom labeling rejects unequal neighbour couplings") {
    CouplingMatrix cm = coupling_matrix({3, 0.2, kPi / 2, 1.0});
    cm.delta(1, 2) += 0.01;
    CHECK_THROWS_AS(collective_basis_three(cm), UnsupportedError);
    CHECK_THROWS_AS(collective_basis_three(pair_couplings(0.2)), UnsupportedError);
  }

  TEST_CASE("three-atom carriers") {
    const auto [basis, sp] = collective_basis_three(coupling_matrix({3, 0.2, kPi / 2, 1.0}));
    const auto car = three_atom_carriers(sp);
    CHECK(car.bg == doctest::Approx(sp.delta_split));
    // Carrier = level spacing it bridges.
    CHECK(car.bg == doctest::Approx(basis.energies[basis.index("g")] - basis.energies[basis.index("b")]));
    CHECK(car.cg == doctest::Approx(basis.energies[basis.index("g")] - basis.energies[basis.index("c")]));
    CHECK(car.ab == doctest::Approx(basis.energies[basis.index("b")] - basis.energies[basis.index("a")]));
  }

  TEST_CASE("three-atom couplings match lowering-operator matrix elements") {
    const AtomGeometry g{3, 0.2, kPi / 2, 1.0};
    const auto [basis, sp] = collective_basis_three(coupling_matrix(g));
    const auto car = three_atom_carriers(sp);
    auto energy = [&](const char* l) { return basis.energies[basis.index(l)]; };
    for (double beta : {0.0, 0.3, 1.0, 2.0}) {
      const double kr = 2.0 * kPi * g.spacing * std::cos(beta);
      const CMatrix l = weighted_lowering(plane_wave_weights(3, g.spacing, beta));
      const Complex ab = basis.ket("a").dot(l * basis.ket("b"));
      CHECK(std::abs(three_atom_prep_coupling(sp, 1.7, kr) - 1.7 * ab) < 1e-12);

      const Complex cg = basis.ket("c").dot(l * basis.ket("g"));
      const Complex bg = basis.ket("b").dot(l * basis.ket("g"));
      for (double t : {0.0, 0.7, 3.1}) {
        const double e_mu = 0.9, e_nu = -1.3;
        // Interaction picture with mu on the cg carrier and nu on bg.
        auto field = [&](const char* lo) {
          return e_mu * std::exp(Complex(0.0, (energy(lo) - energy("g") + car.cg) * t)) +
                 e_nu * std::exp(Complex(0.0, (energy(lo) - energy("g") + car.bg) * t));
        };
        const auto got = three_atom_stirap_couplings(sp, e_mu, e_nu, kr, t);
        CHECK(std::abs(got.cg - cg * field("c")) < 1e-12);
        CHECK(std::abs(got.bg - bg * field("b")) < 1e-12);
      }
    }
  }

  TEST_CASE("three-atom dark state") {
    const Complex e_cg(0.3, 0.7), e_bg(-0.2, 0.4);
    const QubitState q = dark_state_three(e_cg, e_bg);
    CHECK(std::norm(q.b) + std::norm(q.c) == doctest::Approx(1.0));
    // Basis order b, c, g.
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    h(2, 0) = e_bg;
    h(2, 1) = e_cg;
    h(0, 2) = std::conj(e_bg);
    h(1, 2) = std::conj(e_cg);
    const Eigen::Vector3cd v(q.b, q.c, 0.0);
    CHECK(std::abs((h * v)(2)) < 1e-14);
    CHECK_THROWS_AS(dark_state_three(0.0, 0.0), DomainError);
  }
}
