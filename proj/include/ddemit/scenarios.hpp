#pragma once

// Config-driven scenario runner: YAML parsing and validation, the built-in
// figure reproductions, and CSV/report output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddemit/dynamics.hpp"
#include "ddemit/emission.hpp"
#include "ddemit/pulses.hpp"
#include "ddemit/trajectories.hpp"

namespace ddemit {

/// constant: amplitude. tanh: amplitude * tanh(gamma t).
/// sqrt_tanh: amplitude * sqrt(tanh(gamma t)). train: sum of `pulses`.
/// schedule: the pump or stokes train of a figure schedule. zero: off.
struct EnvelopeConfig {
  std::string type = "zero";
  double amplitude = 0.0;
  PulseTrain train;
  std::string figure;
  std::string component;

  bool operator==(const EnvelopeConfig&) const = default;
};

struct FieldConfig {
  std::string name;
  /// symmetric, antisymmetric or plane_wave (propagating at `beta` to the axis).
  std::string weights = "symmetric";
  double beta = 0.0;
  /// explicit uses `detuning`; the others derive the detuning from the
  /// coupling spectrum: two_atom_mu, two_atom_nu, two_atom_ac,
  /// three_atom_ab, three_atom_bg, three_atom_cg.
  std::string carrier = "explicit";
  double detuning = 0.0;
  EnvelopeConfig envelope;

  bool operator==(const FieldConfig&) const = default;
};

struct GeometryConfig {
  int n_atoms = 2;
  /// wavelength: `separation` is s in units of lambda0. k0r: it is xi = 2 pi s.
  std::string separation_convention = "wavelength";
  double separation = 0.2;
  double alpha = kPi / 2;
  double gamma = 1.0;
  /// chain: linear-chain couplings. uniform: every pair coupled as neighbours.
  std::string coupling = "chain";

  bool operator==(const GeometryConfig&) const = default;
  AtomGeometry to_geometry() const;
};

struct SystemConfig {
  bool decay = true;
  bool cross_decay = true;
  bool dipole_shifts = true;

  bool operator==(const SystemConfig&) const = default;
};

struct DriveConfig {
  double omega_delta = 0.0;
  std::vector<FieldConfig> fields;

  bool operator==(const DriveConfig&) const = default;
};

struct RunConfig {
  double t_end = 20.0;
  double record_step = 0.01;
  /// Zero selects the automatic RK4 step.
  double step = 0.0;
  int theta_points = kDefaultThetaPoints;
  std::int64_t n_traj = 0;
  std::uint64_t seed = 1;
  std::string normalization = "dicke_scale";
  bool conditional_populations = false;
  /// Also evolve without drive and report the distribution difference.
  bool compare_undriven = false;
  /// none, phi_b or phi_c (two atoms).
  std::string analytic = "none";

  bool operator==(const RunConfig&) const = default;
};

struct OutputConfig {
  bool populations = true;
  bool distribution = false;
  bool events = false;
  bool report = true;

  bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
  std::string name = "custom";
  std::string description;
  GeometryConfig geometry;
  SystemConfig system;
  /// Collective label (a, b, ...) or product ket written MSB first ("10").
  std::string initial_state = "c";
  DriveConfig drive;
  /// Two-level b-c coupling Omega(t) evolved alongside the full model.
  std::optional<EnvelopeConfig> ansatz;
  RunConfig run;
  OutputConfig outputs;

  bool operator==(const ScenarioConfig&) const = default;
};

struct ValidationResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

/// Parses YAML text and checks it. Every problem is reported with its field
/// path; unknown keys are errors.
ValidationResult validate_config(const std::string& text);

/// Semantic checks on an already-built config.
std::vector<std::string> check_config(const ScenarioConfig& config);

/// Canonical YAML, every number at 17 significant digits.
std::string serialize_config(const ScenarioConfig& config);

struct BuiltinInfo {
  std::string name;
  std::string description;
};

/// fig1a, fig1b, fig2, fig3, fig5, fig6, free, in that order.
std::vector<BuiltinInfo> list_builtins();
bool is_builtin(const std::string& name);
ScenarioConfig builtin_config(const std::string& name);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> theta_points;
  std::optional<double> step;
};
void apply_overrides(ScenarioConfig& config, const RunOverrides& overrides);

struct NamedDistribution {
  std::string column;
  AngularDistribution dist;
};

struct RunReport {
  std::string scenario;
  std::vector<std::string> files;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> warnings;
  double wall_time = 0.0;

  // Data behind the metrics.
  StateTrace trace;
  PopulationTable populations;
  std::vector<NamedDistribution> distributions;
  std::vector<EmissionEvent> events;

  double metric(const std::string& key) const;
  bool has_metric(const std::string& key) const;
};

/// Runs a validated config. Files are written to `out_dir` when it is set.
RunReport run_scenario(const ScenarioConfig& config, const std::optional<std::filesystem::path>& out_dir = {});

/// Drive built from the config, with carriers resolved against `couplings`.
DriveSpec build_drive(const ScenarioConfig& config, const CouplingMatrix& couplings);
Envelope build_envelope(const EnvelopeConfig& env);
/// Shortest pulse width present in the drive, or zero.
double shortest_pulse_width(const ScenarioConfig& config);
CVector initial_state(const ScenarioConfig& config, const CollectiveBasis& basis);
CouplingMatrix build_couplings(const ScenarioConfig& config);
EffectiveHamiltonian build_hamiltonian(const ScenarioConfig& config, const CouplingMatrix& couplings,
                                       bool with_drive = true);

void write_populations_csv(const std::filesystem::path& path, const PopulationTable& table,
                           const StateTrace& trace);
void write_distribution_csv(const std::filesystem::path& path, const std::vector<NamedDistribution>& dists);
void write_events_csv(const std::filesystem::path& path, const std::vector<EmissionEvent>& events);
void write_report(const std::filesystem::path& path, const RunReport& report);

}  // namespace ddemit
