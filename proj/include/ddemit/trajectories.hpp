#pragma once

// Monte Carlo first-photon events sampled from a no-jump trace.

#include <cstdint>
#include <string>
#include <vector>

#include "ddemit/emission.hpp"

namespace ddemit {

struct EmissionEvent {
  std::int64_t id = 0;
  bool emitted = false;
  double time = 0.0;
  double theta = 0.0;
  /// Normalised S(theta) psi(t) after the detection; empty without emission
  /// or when post-jump recording is off.
  CVector post_jump;
};

struct TrajectoryOptions {
  std::int64_t n_traj = 1000;
  std::uint64_t seed = 1;
  /// Zero uses std::thread::hardware_concurrency().
  int threads = 0;
  bool record_post_jump = false;
};

struct TrajectoryResult {
  std::vector<EmissionEvent> events;
  std::int64_t n_emitted = 0;
  double mean_time = 0.0;
  double stderr_time = 0.0;
  /// Survival probability left at the end of the trace.
  double tail_mass = 0.0;
  std::vector<std::string> warnings;
};

/// Trajectory k draws from mt19937_64 seeded with seed_seq{seed_lo, seed_hi,
/// k_lo, k_hi}, so results do not depend on thread count or ordering.
///
/// The jump time inverts 1 - ||psi(t)||^2 with linear interpolation on the
/// trace grid; the direction inverts the trapezoid CDF of
/// <psi|S^dagger S|psi> sin(theta) on `grid`, linear within a cell.
TrajectoryResult sample_trajectories(const StateTrace& trace, const AtomGeometry& geom, const AngularGrid& grid,
                                     const TrajectoryOptions& options);

/// Counts of emitted events in n_bins equal theta bins on [0, pi].
std::vector<std::int64_t> direction_histogram(const std::vector<EmissionEvent>& events, int n_bins);

}  // namespace ddemit
