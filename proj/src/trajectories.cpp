#include "ddemit/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace ddemit {

namespace {

struct Sampler {
  const StateTrace& trace;
  const AtomGeometry& geom;
  const AngularGrid& grid;
  std::vector<double> emitted;  // 1 - ||psi(t_k)||^2
  std::vector<CMatrix> lower;
  std::vector<CVector> phases;  // per theta, one entry per atom
  std::vector<double> pattern;  // gamma D(theta) sin(theta)

  Sampler(const StateTrace& tr, const AtomGeometry& g, const AngularGrid& gr) : trace(tr), geom(g), grid(gr) {
    for (double p : trace.norm_squared()) emitted.push_back(1.0 - p);
    // Roundoff can make the curve wiggle by an ulp; inversion needs it monotone.
    for (std::size_t k = 1; k < emitted.size(); ++k) emitted[k] = std::max(emitted[k], emitted[k - 1]);
    const int n = geom.n_atoms;
    for (int j = 0; j < n; ++j) lower.push_back(lowering_operator(n, j));
    for (double th : grid.thetas) {
      CVector p(n);
      for (int j = 0; j < n; ++j) p(j) = std::exp(Complex(0.0, -2.0 * kPi * geom.spacing * j * std::cos(th)));
      phases.push_back(p);
      pattern.push_back(geom.gamma * dipole_pattern(th) * std::sin(th));
    }
  }

  EmissionEvent draw(std::int64_t id, std::uint64_t seed, bool record) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(id)),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(id) >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    EmissionEvent ev;
    ev.id = id;
    const double u = uni(rng);
    if (!(u < emitted.back())) return ev;

    const auto it = std::upper_bound(emitted.begin(), emitted.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - emitted.begin());  // emitted[k-1] <= u < emitted[k]
    const double e0 = emitted[k - 1], e1 = emitted[k];
    const double f = (e1 > e0) ? (u - e0) / (e1 - e0) : 0.0;
    ev.emitted = true;
    ev.time = trace.times[k - 1] + f * (trace.times[k] - trace.times[k - 1]);
    const CVector psi = (1.0 - f) * trace.states[k - 1] + f * trace.states[k];

    const int n = geom.n_atoms;
    CMatrix v(psi.size(), n);
    for (int j = 0; j < n; ++j) v.col(j) = lower[j] * psi;
    const CMatrix gram = v.adjoint() * v;

    std::vector<double> dens(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
      dens[m] = std::max(0.0, pattern[m] * phases[m].dot(gram * phases[m]).real());
    }
    std::vector<double> cdf(grid.size(), 0.0);
    for (std::size_t m = 1; m < grid.size(); ++m) {
      cdf[m] = cdf[m - 1] + 0.5 * (grid.thetas[m] - grid.thetas[m - 1]) * (dens[m] + dens[m - 1]);
    }
    const double target = uni(rng) * cdf.back();
    const auto jt = std::lower_bound(cdf.begin() + 1, cdf.end(), target);
    const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(jt - cdf.begin()), grid.size() - 1);
    const double c0 = cdf[m - 1], c1 = cdf[m];
    const double g = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.5;
    ev.theta = grid.thetas[m - 1] + g * (grid.thetas[m] - grid.thetas[m - 1]);

    if (record) {
      CVector out = jump_operator(ev.theta, geom) * psi;
      const double nrm = out.norm();
      if (nrm > 0.0) out /= nrm;
      ev.post_jump = std::move(out);
    }
    return ev;
  }
};

}  // namespace

TrajectoryResult sample_trajectories(const StateTrace& trace, const AtomGeometry& geom, const AngularGrid& grid,
                                     const TrajectoryOptions& options) {
  geom.validate();
  if (std::abs(geom.alpha - kPi / 2) > 1e-12) {
    throw UnsupportedError("directional sampling is modelled for alpha = pi/2 only");
  }
  if (options.n_traj < 1) throw std::invalid_argument("n_traj must be at least 1");
  if (trace.size() < 2) throw std::invalid_argument("trace needs at least two time points");
  if (trace.n_atoms != geom.n_atoms) throw std::invalid_argument("trace and geometry disagree on n_atoms");

  const Sampler sampler(trace, geom, grid);
  TrajectoryResult result;
  result.events.resize(static_cast<std::size_t>(options.n_traj));

  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp<int>(threads, 1, 64);
  threads = static_cast<int>(std::min<std::int64_t>(threads, options.n_traj));
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::int64_t id = w; id < options.n_traj; id += threads) {
        result.events[static_cast<std::size_t>(id)] = sampler.draw(id, options.seed, options.record_post_jump);
      }
    });
  }
  for (auto& t : pool) t.join();

  double sum = 0.0, sum2 = 0.0;
  for (const auto& ev : result.events) {
    if (!ev.emitted) continue;
    ++result.n_emitted;
    sum += ev.time;
    sum2 += ev.time * ev.time;
  }
  if (result.n_emitted > 0) {
    const double n = static_cast<double>(result.n_emitted);
    result.mean_time = sum / n;
    const double var = n > 1 ? (sum2 - n * result.mean_time * result.mean_time) / (n - 1) : 0.0;
    result.stderr_time = std::sqrt(std::max(var, 0.0) / n);
  }
  result.tail_mass = trace.states.back().squaredNorm();
  if (result.tail_mass > 1e-3) {
    std::ostringstream msg;
    msg << "horizon too short: survival probability " << result.tail_mass << " at t_end";
    result.warnings.push_back(msg.str());
  }
  return result;
}

std::vector<std::int64_t> direction_histogram(const std::vector<EmissionEvent>& events, int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("n_bins must be positive");
  std::vector<std::int64_t> counts(n_bins, 0);
  for (const auto& ev : events) {
    if (!ev.emitted) continue;
    int b = static_cast<int>(ev.theta / kPi * n_bins);
    counts[std::clamp(b, 0, n_bins - 1)]++;
  }
  return counts;
}

}  // namespace ddemit
