#pragma once

// No-jump evolution under the effective Hamiltonian and what can be read off
// the resulting unnormalised state: populations and decay rates.

#include <string>
#include <vector>

#include "ddemit/hamiltonian.hpp"

namespace ddemit {

struct EvolveOptions {
  /// Fixed RK4 step. Zero selects min(0.001, shortest_pulse / 50, 0.05 / max|H|).
  double step = 0.0;
  /// Shortest pulse width of the drive, used by the automatic step rule.
  double shortest_pulse = 0.0;
  /// Refuse runs that would need more RK4 steps than this.
  long long max_steps = 200'000'000;
};

/// Time grid plus the unnormalised no-jump state at each grid point.
struct StateTrace {
  std::vector<double> times;
  std::vector<CVector> states;
  int n_atoms = 0;
  std::string basis = "product";
  double step = 0.0;
  std::string method = "rk4-fixed";

  std::size_t size() const { return times.size(); }
  /// ||psi(t_k)||^2, the no-jump survival probability.
  std::vector<double> norm_squared() const;
};

/// n + 1 equally spaced points on [t0, t1].
std::vector<double> uniform_grid(double t0, double t1, int n);
/// Grid with spacing at most `dt`, ending exactly at t1.
std::vector<double> grid_with_spacing(double t0, double t1, double dt);

/// Step chosen by the automatic rule for `h` on `grid`.
double automatic_step(const EffectiveHamiltonian& h, const std::vector<double>& grid, double shortest_pulse);

/// Integrates d psi/dt = -i H(t) psi with classical RK4, taking an integer
/// number of equal substeps between grid points. psi0 must be normalised.
StateTrace evolve(const EffectiveHamiltonian& h, const CVector& psi0, const std::vector<double>& grid,
                  const EvolveOptions& options = {});

struct PopulationTable {
  std::vector<std::string> labels;
  std::vector<double> times;
  /// values[k][j]: population of level j at times[k].
  std::vector<std::vector<double>> values;
  bool conditional = false;

  std::vector<double> column(const std::string& label) const;
};

/// |<k|psi(t)>|^2 for each basis ket. With `conditional` the state is
/// renormalised first, giving populations given that no photon was emitted.
PopulationTable populations(const StateTrace& trace, const CollectiveBasis& basis, bool conditional = false);

/// Negated least-squares slope of log(y) against t. Needs at least 10 samples.
double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values);

/// Decay rate of ||psi||^2 on the trace points inside [t_from, t_to].
double fit_decay_rate(const StateTrace& trace, double t_from, double t_to);

}  // namespace ddemit
