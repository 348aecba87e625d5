#pragma once

// Time envelopes for the two drive components: Gaussian pulses, trains of
// them, and counter-intuitive pump/Stokes schedules.

#include <string>
#include <string_view>
#include <vector>

namespace ddemit {

/// amplitude * exp(-shape * (t - center)^2 / width^2)
struct GaussianPulse {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
  double shape = 1.0;

  void validate() const;
  double value(double t) const;
  double derivative(double t) const;

  bool operator==(const GaussianPulse&) const = default;
};

/// Sum of Gaussian pulses.
struct PulseTrain {
  std::vector<GaussianPulse> pulses;

  double value(double t) const;
  double derivative(double t) const;
  double min_width() const;
  double last_center() const;
  double max_width() const;

  bool operator==(const PulseTrain&) const = default;
};

/// Counter-intuitive pair: `pump` drives the mu component (couples the
/// initially empty branch), `stokes` the nu component.
struct StirapSchedule {
  std::string name;
  PulseTrain pump;
  PulseTrain stokes;
  bool pump_first = true;

  /// Last pulse centre plus six widths of the widest pulse.
  double recommended_t_end() const;
  double min_width() const;

  bool operator==(const StirapSchedule&) const = default;
};

enum class FigureSchedule { fig1b, fig2, fig5 };

FigureSchedule parse_figure_schedule(std::string_view id);
std::string_view to_string(FigureSchedule id);

/// Pulse parameters as printed in the figure captions. Trains contain only
/// the listed centres; the trailing ellipses are not extrapolated.
StirapSchedule make_fig_schedule(FigureSchedule id);

/// theta_dot / sqrt(E_mu^2 + E_nu^2) with tan(theta) = E_mu / E_nu, using the
/// analytic envelope derivatives. Returns the magnitude. Throws DomainError
/// when both envelopes vanish at t.
double adiabaticity_margin(const StirapSchedule& schedule, double t);

}  // namespace ddemit
