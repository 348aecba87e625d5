#include "ddemit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ddemit {

std::vector<double> StateTrace::norm_squared() const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.squaredNorm());
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, int n) {
  if (n < 1 || !(t1 > t0)) throw std::invalid_argument("uniform_grid needs t1 > t0 and n >= 1");
  std::vector<double> g(n + 1);
  for (int k = 0; k <= n; ++k) g[k] = t0 + (t1 - t0) * k / n;
  g[n] = t1;
  return g;
}

std::vector<double> grid_with_spacing(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
  return uniform_grid(t0, t1, n);
}

double automatic_step(const EffectiveHamiltonian& h, const std::vector<double>& grid, double shortest_pulse) {
  double hmax = 0.0;
  // The drive coefficients are smooth on the pulse scale, so sampling the
  // bound on a fine subgrid is enough to find its maximum.
  const double t0 = grid.front(), t1 = grid.back();
  const int samples = 4000;
  for (int k = 0; k <= samples; ++k) hmax = std::max(hmax, h.norm_bound(t0 + (t1 - t0) * k / samples));
  double step = 0.001;
  if (shortest_pulse > 0.0) step = std::min(step, shortest_pulse / 50.0);
  if (hmax > 0.0) step = std::min(step, 0.05 / hmax);
  return step;
}

StateTrace evolve(const EffectiveHamiltonian& h, const CVector& psi0, const std::vector<double>& grid,
                  const EvolveOptions& options) {
  if (psi0.size() != h.dimension()) throw std::invalid_argument("initial state has the wrong dimension");
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-10) throw std::invalid_argument("initial state is not normalised");
  if (grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }

  const double step = options.step > 0.0 ? options.step : automatic_step(h, grid, options.shortest_pulse);
  if (grid.size() > 1) {
    const double total = (grid.back() - grid.front()) / step;
    if (total > static_cast<double>(options.max_steps)) {
      std::ostringstream msg;
      msg << "step " << step << " would need " << total << " RK4 steps (limit " << options.max_steps << ")";
      throw IntegrationError(msg.str());
    }
  }

  StateTrace trace;
  trace.n_atoms = h.n_atoms();
  trace.step = step;
  trace.times = grid;
  trace.states.reserve(grid.size());
  trace.states.push_back(psi0);

  const int dim = h.dimension();
  CVector psi = psi0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  const Complex mi(0.0, -1.0);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double span = grid[g] - grid[g - 1];
    const long long n = std::max<long long>(1, static_cast<long long>(std::ceil(span / step - 1e-9)));
    const double dt = span / static_cast<double>(n);
    double t = grid[g - 1];
    for (long long s = 0; s < n; ++s) {
      h.apply(t, psi, k1);
      k1 *= mi;
      tmp = psi + (0.5 * dt) * k1;
      h.apply(t + 0.5 * dt, tmp, k2);
      k2 *= mi;
      tmp = psi + (0.5 * dt) * k2;
      h.apply(t + 0.5 * dt, tmp, k3);
      k3 *= mi;
      tmp = psi + dt * k3;
      h.apply(t + dt, tmp, k4);
      k4 *= mi;
      psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = grid[g - 1] + dt * static_cast<double>(s + 1);
    }
    if (!psi.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << grid[g] << " (step " << dt << ")";
      throw IntegrationError(msg.str());
    }
    trace.states.push_back(psi);
  }
  return trace;
}

std::vector<double> PopulationTable::column(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw std::invalid_argument("unknown population label '" + label + "'");
  const auto j = static_cast<std::size_t>(it - labels.begin());
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row[j]);
  return out;
}

PopulationTable populations(const StateTrace& trace, const CollectiveBasis& basis, bool conditional) {
  if (!trace.states.empty() && trace.states.front().size() != basis.kets.rows()) {
    throw std::invalid_argument("basis dimension does not match the trace");
  }
  PopulationTable table;
  table.labels = basis.labels;
  table.times = trace.times;
  table.conditional = conditional;
  const CMatrix u = basis.transform();
  for (const auto& s : trace.states) {
    CVector amp = u * s;
    if (conditional) {
      const double n = amp.norm();
      if (n > 0.0) amp /= n;
    }
    std::vector<double> row(amp.size());
    for (Eigen::Index j = 0; j < amp.size(); ++j) row[j] = std::norm(amp(j));
    table.values.push_back(std::move(row));
  }
  return table;
}

double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  if (times.size() < 10) throw std::invalid_argument("fit_decay_rate: window holds fewer than 10 samples");
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(values[k] > 0.0)) throw DomainError("fit_decay_rate: non-positive value in window");
    const double y = std::log(values[k]);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
  }
  const double denom = n * stt - st * st;
  if (denom <= 0.0) throw std::invalid_argument("fit_decay_rate: degenerate time window");
  return -(n * sty - st * sy) / denom;
}

double fit_decay_rate(const StateTrace& trace, double t_from, double t_to) {
  std::vector<double> t, y;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (trace.times[k] >= t_from && trace.times[k] <= t_to) {
      t.push_back(trace.times[k]);
      y.push_back(trace.states[k].squaredNorm());
    }
  }
  return fit_decay_rate(t, y);
}

}  // namespace ddemit
