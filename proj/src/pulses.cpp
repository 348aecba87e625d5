#include "ddemit/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddemit/types.hpp"

namespace ddemit {

void GaussianPulse::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw DomainError("pulse amplitude must be >= 0");
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("pulse width must be > 0");
  if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("pulse shape factor must be > 0");
  if (!std::isfinite(center)) throw DomainError("pulse center must be finite");
}

double GaussianPulse::value(double t) const {
  const double x = (t - center) / width;
  return amplitude * std::exp(-shape * x * x);
}

double GaussianPulse::derivative(double t) const {
  return -2.0 * shape * (t - center) / (width * width) * value(t);
}

double PulseTrain::value(double t) const {
  double sum = 0.0;
  for (const auto& p : pulses) sum += p.value(t);
  return sum;
}

double PulseTrain::derivative(double t) const {
  double sum = 0.0;
  for (const auto& p : pulses) sum += p.derivative(t);
  return sum;
}

double PulseTrain::min_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& p : pulses) w = std::min(w, p.width / std::sqrt(p.shape));
  return w;
}

double PulseTrain::max_width() const {
  double w = 0.0;
  for (const auto& p : pulses) w = std::max(w, p.width);
  return w;
}

double PulseTrain::last_center() const {
  double c = -std::numeric_limits<double>::infinity();
  for (const auto& p : pulses) c = std::max(c, p.center);
  return c;
}

double StirapSchedule::recommended_t_end() const {
  const double last = std::max(pump.last_center(), stokes.last_center());
  const double width = std::max(pump.max_width(), stokes.max_width());
  return last + 6.0 * width;
}

double StirapSchedule::min_width() const { return std::min(pump.min_width(), stokes.min_width()); }

FigureSchedule parse_figure_schedule(std::string_view id) {
  if (id == "fig1b") return FigureSchedule::fig1b;
  if (id == "fig2") return FigureSchedule::fig2;
  if (id == "fig5") return FigureSchedule::fig5;
  throw DomainError("unknown figure schedule id '" + std::string(id) + "'");
}

std::string_view to_string(FigureSchedule id) {
  switch (id) {
    case FigureSchedule::fig1b: return "fig1b";
    case FigureSchedule::fig2: return "fig2";
    case FigureSchedule::fig5: return "fig5";
  }
  return "unknown";
}

namespace {

PulseTrain train(double amplitude, double width, double shape, const std::vector<double>& centers) {
  PulseTrain out;
  for (double c : centers) out.pulses.push_back(GaussianPulse{amplitude, c, width, shape});
  return out;
}

}  // namespace

StirapSchedule make_fig_schedule(FigureSchedule id) {
  StirapSchedule s;
  s.name = std::string(to_string(id));
  switch (id) {
    case FigureSchedule::fig1b: {
      const double T = 5.5;
      const double t_mu = 4.5 * T;
      const double t_nu = t_mu + 2.75 * T;
      s.pump = train(0.75, T, 0.2, {t_mu});
      s.stokes = train(0.75, T, 0.2, {t_nu});
      break;
    }
    case FigureSchedule::fig2: {
      // 60 exp[-3.27 (t - n)^2]
      s.pump = train(60.0, 1.0, 3.27, {1.23, 3.31, 4.53, 6.62});
      s.stokes = train(60.0, 1.0, 3.27, {1.72, 2.94, 5.02, 6.25});
      break;
    }
    case FigureSchedule::fig5: {
      const double T = 1.15;
      const double t_mu = 10.0 * T;
      const double t_nu = t_mu + 3.75 * T;
      std::vector<double> mu_centers;
      for (double n : {1.0, 2.5, 3.25, 4.8}) mu_centers.push_back(n * t_mu);
      std::vector<double> nu_centers;
      for (double n : {1.0, 1.55, 2.65}) nu_centers.push_back(n * t_nu);
      s.pump = train(20.0, T, 0.09, mu_centers);
      s.stokes = train(20.0, T, 0.09, nu_centers);
      break;
    }
  }
  return s;
}

double adiabaticity_margin(const StirapSchedule& schedule, double t) {
  const double em = schedule.pump.value(t);
  const double en = schedule.stokes.value(t);
  const double r2 = em * em + en * en;
  if (!(r2 > 0.0)) throw DomainError("adiabaticity_margin: both envelopes vanish");
  const double dm = schedule.pump.derivative(t);
  const double dn = schedule.stokes.derivative(t);
  const double theta_dot = (dm * en - em * dn) / r2;
  return std::abs(theta_dot) / std::sqrt(r2);
}

}  // namespace ddemit
