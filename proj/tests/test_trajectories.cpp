#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "ddemit/trajectories.hpp"

using namespace ddemit;

namespace {

StateTrace decay_trace(const AtomGeometry& g, const CVector& psi0, double t_end) {
  const CouplingMatrix cm = coupling_matrix(g);
  return evolve(system_hamiltonian(g, cm), psi0, grid_with_spacing(0.0, t_end, 0.01));
}

}  // namespace

TEST_SUITE("trajectories") {
  TEST_CASE("same seed gives the same events regardless of thread count") {
    const AtomGeometry g{2, 0.2, kPi / 2, 1.0};
    const StateTrace tr = decay_trace(g, collective_basis_two(coupling_matrix(g)).ket("c"), 15.0);
    const AngularGrid grid = make_angular_grid(181);
    TrajectoryOptions o;
    o.n_traj = 2000;
    o.seed = 42;
    o.threads = 1;
    const auto a = sample_trajectories(tr, g, grid, o);
    o.threads = 7;
    const auto b = sample_trajectories(tr, g, grid, o);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t k = 0; k < a.events.size(); ++k) {
      CHECK(a.events[k].time == b.events[k].time);
      CHECK(a.events[k].theta == b.events[k].theta);
    }
    o.seed = 43;
    const auto c = sample_trajectories(tr, g, grid, o);
    CHECK(c.events[0].time != a.events[0].time);
  }

  TEST_CASE("single atom: mean emission time is 1/gamma") {
    const AtomGeometry g{1, 0.2, kPi / 2, 1.0};
    CVector e = CVector::Zero(2);
    e(1) = 1.0;
    const StateTrace tr = decay_trace(g, e, 25.0);
    TrajectoryOptions o;
    o.n_traj = 20000;
    o.seed = 3;
    const auto r = sample_trajectories(tr, g, make_angular_grid(181), o);
    CHECK(r.n_emitted == o.n_traj);
    CHECK(std::abs(r.mean_time - 1.0) < 4.0 * r.stderr_time);
    CHECK(r.stderr_time == doctest::Approx(1.0 / std::sqrt(20000.0)).epsilon(0.05));
    CHECK(r.warnings.empty());
  }

  TEST_CASE("emitted fraction follows 1 - ||psi||^2") {
    const AtomGeometry g{2, 0.2, kPi / 2, 1.0};
    const StateTrace tr = decay_trace(g, collective_basis_two(coupling_matrix(g)).ket("b"), 1.0);
    TrajectoryOptions o;
    o.n_traj = 20000;
    const auto r = sample_trajectories(tr, g, make_angular_grid(181), o);
    const double p = 1.0 - tr.states.back().squaredNorm();
    const double sigma = std::sqrt(p * (1 - p) / o.n_traj);
    CHECK(std::abs(static_cast<double>(r.n_emitted) / o.n_traj - p) < 4.0 * sigma);
    CHECK(r.tail_mass == doctest::Approx(1.0 - p));
    CHECK(r.warnings.size() == 1);
    for (const auto& ev : r.events) {
      if (ev.emitted) CHECK(ev.time <= 1.0);
    }
  }

  TEST_CASE("directions follow Phi_c sin(theta)") {
    const double s = 0.2;
    const AtomGeometry g{2, s, kPi / 2, 1.0};
    const StateTrace tr = decay_trace(g, collective_basis_two(coupling_matrix(g)).ket("c"), 20.0);
    TrajectoryOptions o;
    o.n_traj = 40000;
    o.seed = 9;
    const auto r = sample_trajectories(tr, g, make_angular_grid(721), o);
    const int bins = 20;
    const auto counts = direction_histogram(r.events, bins);

    // Expected bin probabilities from the closed form, by fine midpoint sums.
    std::vector<double> prob(bins, 0.0);
    double total = 0.0;
    const int sub = 2000;
    for (int b = 0; b < bins; ++b) {
      for (int k = 0; k < sub; ++k) {
        const double th = (b + (k + 0.5) / sub) * kPi / bins;
        prob[b] += phi_c_analytic(th, s) * std::sin(th);
      }
      total += prob[b];
    }
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double expect = prob[b] / total * static_cast<double>(r.n_emitted);
      chi2 += (counts[b] - expect) * (counts[b] - expect) / expect;
    }
    const boost::math::chi_squared dist(bins - 1);
    CHECK(chi2 < boost::math::quantile(dist, 0.999));
  }

  TEST_CASE("post-jump states are normalised ground states for one excitation") {
    const AtomGeometry g{2, 0.2, kPi / 2, 1.0};
    const StateTrace tr = decay_trace(g, collective_basis_two(coupling_matrix(g)).ket("c"), 10.0);
    TrajectoryOptions o;
    o.n_traj = 50;
    o.record_post_jump = true;
    for (const auto& ev : sample_trajectories(tr, g, make_angular_grid(181), o).events) {
      if (!ev.emitted) continue;
      CHECK(ev.post_jump.norm() == doctest::Approx(1.0));
      CHECK(std::abs(ev.post_jump(0)) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("bad input") {
    const AtomGeometry g{2, 0.2, kPi / 2, 1.0};
    const StateTrace tr = decay_trace(g, collective_basis_two(coupling_matrix(g)).ket("c"), 1.0);
    TrajectoryOptions o;
    o.n_traj = 0;
    CHECK_THROWS(sample_trajectories(tr, g, make_angular_grid(11), o));
    o.n_traj = 10;
    AtomGeometry tilted = g;
    tilted.alpha = 0.0;
    CHECK_THROWS_AS(sample_trajectories(tr, tilted, make_angular_grid(11), o), UnsupportedError);
    CHECK_THROWS(direction_histogram({}, 0));
  }
}
