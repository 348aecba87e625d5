#include "ddemit/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ddemit {

AtomGeometry GeometryConfig::to_geometry() const {
  AtomGeometry g;
  g.n_atoms = n_atoms;
  g.spacing = separation_convention == "k0r" ? separation / (2.0 * kPi) : separation;
  g.alpha = alpha;
  g.gamma = gamma;
  return g;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const std::set<std::string> kWeights = {"symmetric", "antisymmetric", "plane_wave"};
const std::set<std::string> kCarriers = {"explicit",      "two_atom_mu",   "two_atom_nu",  "two_atom_ac",
                                         "three_atom_ab", "three_atom_bg", "three_atom_cg"};
const std::set<std::string> kEnvelopes = {"zero", "constant", "tanh", "sqrt_tanh", "train", "schedule"};

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }

  bool expect_map(const YAML::Node& node, const std::string& path) {
    if (!node.IsMap()) {
      error(path, "expected a mapping");
      return false;
    }
    return true;
  }

  void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) error(join_path(path, key), "unknown key");
    }
  }

  template <typename T>
  void read(const YAML::Node& node, const std::string& key, const std::string& path, T& out) {
    const YAML::Node v = node[key];
    if (!v) return;
    if (!v.IsScalar()) {
      error(join_path(path, key), "expected a scalar");
      return;
    }
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      error(join_path(path, key), std::string("cannot read '") + v.Scalar() + "' as " + type_name<T>());
    }
  }

 private:
  template <typename T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "an integer";
  }

  std::vector<std::string>& errors_;
};

void read_pulse(Reader& r, const YAML::Node& node, const std::string& path, GaussianPulse& p) {
  if (!r.expect_map(node, path)) return;
  r.check_keys(node, path, {"amplitude", "center", "width", "shape"});
  r.read(node, "amplitude", path, p.amplitude);
  r.read(node, "center", path, p.center);
  r.read(node, "width", path, p.width);
  r.read(node, "shape", path, p.shape);
}

void read_envelope(Reader& r, const YAML::Node& node, const std::string& path, EnvelopeConfig& e) {
  if (!r.expect_map(node, path)) return;
  r.check_keys(node, path, {"type", "amplitude", "pulses", "figure", "component"});
  r.read(node, "type", path, e.type);
  r.read(node, "amplitude", path, e.amplitude);
  r.read(node, "figure", path, e.figure);
  r.read(node, "component", path, e.component);
  if (const YAML::Node ps = node["pulses"]) {
    const std::string pp = join_path(path, "pulses");
    if (!ps.IsSequence()) {
      r.error(pp, "expected a list of pulses");
    } else {
      for (std::size_t k = 0; k < ps.size(); ++k) {
        GaussianPulse p;
        read_pulse(r, ps[k], pp + "[" + std::to_string(k) + "]", p);
        e.train.pulses.push_back(p);
      }
    }
  }
}

ScenarioConfig parse_config(const YAML::Node& root, Reader& r) {
  ScenarioConfig c;
  c.drive.fields.clear();
  if (!r.expect_map(root, "<root>")) return c;
  r.check_keys(root, "", {"name", "description", "geometry", "system", "initial_state", "drive", "ansatz", "run",
                          "outputs"});
  r.read(root, "name", "", c.name);
  r.read(root, "description", "", c.description);
  r.read(root, "initial_state", "", c.initial_state);

  if (const YAML::Node g = root["geometry"]; g && r.expect_map(g, "geometry")) {
    r.check_keys(g, "geometry", {"n_atoms", "separation_convention", "separation", "alpha", "gamma", "coupling"});
    r.read(g, "n_atoms", "geometry", c.geometry.n_atoms);
    r.read(g, "separation_convention", "geometry", c.geometry.separation_convention);
    r.read(g, "separation", "geometry", c.geometry.separation);
    r.read(g, "alpha", "geometry", c.geometry.alpha);
    r.read(g, "gamma", "geometry", c.geometry.gamma);
    r.read(g, "coupling", "geometry", c.geometry.coupling);
  }
  if (const YAML::Node s = root["system"]; s && r.expect_map(s, "system")) {
    r.check_keys(s, "system", {"decay", "cross_decay", "dipole_shifts"});
    r.read(s, "decay", "system", c.system.decay);
    r.read(s, "cross_decay", "system", c.system.cross_decay);
    r.read(s, "dipole_shifts", "system", c.system.dipole_shifts);
  }
  if (const YAML::Node d = root["drive"]; d && !d.IsNull() && r.expect_map(d, "drive")) {
    r.check_keys(d, "drive", {"omega_delta", "fields"});
    r.read(d, "omega_delta", "drive", c.drive.omega_delta);
    if (const YAML::Node fs = d["fields"]) {
      if (!fs.IsSequence()) {
        r.error("drive.fields", "expected a list");
      } else {
        for (std::size_t k = 0; k < fs.size(); ++k) {
          const std::string fp = "drive.fields[" + std::to_string(k) + "]";
          FieldConfig f;
          if (r.expect_map(fs[k], fp)) {
            r.check_keys(fs[k], fp, {"name", "weights", "beta", "carrier", "detuning", "envelope"});
            r.read(fs[k], "name", fp, f.name);
            r.read(fs[k], "weights", fp, f.weights);
            r.read(fs[k], "beta", fp, f.beta);
            r.read(fs[k], "carrier", fp, f.carrier);
            r.read(fs[k], "detuning", fp, f.detuning);
            if (const YAML::Node e = fs[k]["envelope"]) read_envelope(r, e, fp + ".envelope", f.envelope);
          }
          c.drive.fields.push_back(f);
        }
      }
    }
  }
  if (const YAML::Node a = root["ansatz"]; a && !a.IsNull()) {
    EnvelopeConfig e;
    if (r.expect_map(a, "ansatz")) {
      r.check_keys(a, "ansatz", {"omega"});
      if (const YAML::Node o = a["omega"]) read_envelope(r, o, "ansatz.omega", e);
      else r.error("ansatz.omega", "missing");
    }
    c.ansatz = e;
  }
  if (const YAML::Node run = root["run"]; run && r.expect_map(run, "run")) {
    r.check_keys(run, "run", {"t_end", "record_step", "step", "theta_points", "n_traj", "seed", "normalization",
                              "conditional_populations", "compare_undriven", "analytic"});
    r.read(run, "t_end", "run", c.run.t_end);
    r.read(run, "record_step", "run", c.run.record_step);
    r.read(run, "step", "run", c.run.step);
    r.read(run, "theta_points", "run", c.run.theta_points);
    r.read(run, "n_traj", "run", c.run.n_traj);
    r.read(run, "seed", "run", c.run.seed);
    r.read(run, "normalization", "run", c.run.normalization);
    r.read(run, "conditional_populations", "run", c.run.conditional_populations);
    r.read(run, "compare_undriven", "run", c.run.compare_undriven);
    r.read(run, "analytic", "run", c.run.analytic);
  }
  if (const YAML::Node o = root["outputs"]; o && r.expect_map(o, "outputs")) {
    r.check_keys(o, "outputs", {"populations", "distribution", "events", "report"});
    r.read(o, "populations", "outputs", c.outputs.populations);
    r.read(o, "distribution", "outputs", c.outputs.distribution);
    r.read(o, "events", "outputs", c.outputs.events);
    r.read(o, "report", "outputs", c.outputs.report);
  }
  return c;
}

bool finite(double x) { return std::isfinite(x); }

void check_envelope(const EnvelopeConfig& e, const std::string& path, bool allow_negative,
                    std::vector<std::string>& errors) {
  if (!kEnvelopes.count(e.type)) {
    errors.push_back(path + ".type: unknown envelope type '" + e.type +
                     "' (zero, constant, tanh, sqrt_tanh, train, schedule)");
    return;
  }
  if (!finite(e.amplitude)) errors.push_back(path + ".amplitude: must be finite");
  if (!allow_negative && e.amplitude < 0.0) errors.push_back(path + ".amplitude: must be >= 0");
  if (e.type == "train") {
    if (e.train.pulses.empty()) errors.push_back(path + ".pulses: a train needs at least one pulse");
    for (std::size_t k = 0; k < e.train.pulses.size(); ++k) {
      try {
        e.train.pulses[k].validate();
      } catch (const std::exception& ex) {
        errors.push_back(path + ".pulses[" + std::to_string(k) + "]: " + ex.what());
      }
    }
  }
  if (e.type == "schedule") {
    try {
      parse_figure_schedule(e.figure);
    } catch (const std::exception&) {
      errors.push_back(path + ".figure: unknown figure schedule '" + e.figure + "' (fig1b, fig2, fig5)");
    }
    if (e.component != "pump" && e.component != "stokes") {
      errors.push_back(path + ".component: must be pump or stokes");
    }
  }
}

bool valid_initial_label(const std::string& label, int n) {
  if (n == 1) return label == "g" || label == "e" || label == "0" || label == "1";
  if (static_cast<int>(label.size()) == n &&
      std::all_of(label.begin(), label.end(), [](char ch) { return ch == '0' || ch == '1'; })) {
    return true;
  }
  if (label.size() != 1) return false;
  if (n == 2) return label[0] >= 'a' && label[0] <= 'd';
  if (n == 3) return label[0] >= 'a' && label[0] <= 'h';
  return false;
}

}  // namespace

std::vector<std::string> check_config(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  const auto& g = c.geometry;
  const bool n_ok = g.n_atoms >= 1 && g.n_atoms <= kMaxAtoms;
  if (!n_ok) errors.push_back("geometry.n_atoms: must lie in [1, " + std::to_string(kMaxAtoms) + "]");
  if (g.separation_convention != "wavelength" && g.separation_convention != "k0r") {
    errors.push_back("geometry.separation_convention: must be wavelength or k0r");
  }
  if (!finite(g.separation) || (g.n_atoms >= 2 && g.separation <= 0.0)) {
    errors.push_back("geometry.separation: must be finite and > 0 for n_atoms >= 2");
  }
  if (!finite(g.alpha) || g.alpha < 0.0 || g.alpha > kPi) errors.push_back("geometry.alpha: must lie in [0, pi]");
  if (!finite(g.gamma) || g.gamma <= 0.0) errors.push_back("geometry.gamma: must be finite and > 0");
  if (g.coupling != "chain" && g.coupling != "uniform") errors.push_back("geometry.coupling: must be chain or uniform");
  if (n_ok && !valid_initial_label(c.initial_state, g.n_atoms)) {
    errors.push_back("initial_state: '" + c.initial_state + "' is not a level of a " + std::to_string(g.n_atoms) +
                     "-atom system");
  }

  if (!finite(c.drive.omega_delta)) errors.push_back("drive.omega_delta: must be finite");
  for (std::size_t k = 0; k < c.drive.fields.size(); ++k) {
    const auto& f = c.drive.fields[k];
    const std::string fp = "drive.fields[" + std::to_string(k) + "]";
    if (!kWeights.count(f.weights)) {
      errors.push_back(fp + ".weights: must be symmetric, antisymmetric or plane_wave");
    }
    if (!finite(f.beta)) errors.push_back(fp + ".beta: must be finite");
    if (!finite(f.detuning)) errors.push_back(fp + ".detuning: must be finite");
    if (!kCarriers.count(f.carrier)) {
      errors.push_back(fp + ".carrier: unknown carrier '" + f.carrier + "'");
    } else if (f.carrier.rfind("two_atom", 0) == 0 && g.n_atoms != 2) {
      errors.push_back(fp + ".carrier: " + f.carrier + " needs n_atoms = 2");
    } else if (f.carrier.rfind("three_atom", 0) == 0 && g.n_atoms != 3) {
      errors.push_back(fp + ".carrier: " + f.carrier + " needs n_atoms = 3");
    }
    check_envelope(f.envelope, fp + ".envelope", false, errors);
  }
  if (c.ansatz) {
    if (g.n_atoms != 2 && g.n_atoms != 3) errors.push_back("ansatz: needs n_atoms = 2 or 3");
    check_envelope(*c.ansatz, "ansatz.omega", true, errors);
  }

  const auto& r = c.run;
  if (!finite(r.t_end) || r.t_end <= 0.0) errors.push_back("run.t_end: must be finite and > 0");
  if (!finite(r.record_step) || r.record_step <= 0.0) errors.push_back("run.record_step: must be > 0");
  else if (finite(r.t_end) && r.record_step > r.t_end) errors.push_back("run.record_step: must not exceed t_end");
  if (!finite(r.step) || r.step < 0.0) errors.push_back("run.step: must be >= 0 (0 selects the automatic step)");
  if (r.theta_points < 3 || r.theta_points % 2 == 0) errors.push_back("run.theta_points: must be odd and >= 3");
  if (r.n_traj < 0) errors.push_back("run.n_traj: must be >= 0");
  try {
    parse_normalization(r.normalization);
  } catch (const std::exception&) {
    errors.push_back("run.normalization: must be dicke_scale, unit_total or raw");
  }
  if (r.analytic != "none" && r.analytic != "phi_b" && r.analytic != "phi_c") {
    errors.push_back("run.analytic: must be none, phi_b or phi_c");
  } else if (r.analytic != "none" && g.n_atoms != 2) {
    errors.push_back("run.analytic: the closed forms are for n_atoms = 2");
  }
  const bool directional = c.outputs.distribution || c.outputs.events || r.n_traj > 0 || r.analytic != "none";
  if (directional && std::abs(g.alpha - kPi / 2) > 1e-12) {
    errors.push_back("geometry.alpha: directional outputs need alpha = pi/2");
  }
  if (c.outputs.events && r.n_traj == 0) errors.push_back("outputs.events: needs run.n_traj > 0");
  return errors;
}

ValidationResult validate_config(const std::string& text) {
  ValidationResult result;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    result.errors.push_back(std::string("<yaml>: ") + ex.what());
    return result;
  }
  Reader reader(result.errors);
  ScenarioConfig c = parse_config(root, reader);
  for (auto& e : check_config(c)) result.errors.push_back(std::move(e));
  if (result.errors.empty()) result.config = std::move(c);
  return result;
}

// ---------------------------------------------------------------------------
// Serialisation

namespace {

void emit_envelope(YAML::Emitter& out, const EnvelopeConfig& e) {
  out << YAML::BeginMap;
  out << YAML::Key << "type" << YAML::Value << e.type;
  if (e.type == "constant" || e.type == "tanh" || e.type == "sqrt_tanh") {
    out << YAML::Key << "amplitude" << YAML::Value << e.amplitude;
  }
  if (e.type == "train") {
    out << YAML::Key << "pulses" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : e.train.pulses) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "amplitude" << YAML::Value << p.amplitude;
      out << YAML::Key << "center" << YAML::Value << p.center;
      out << YAML::Key << "width" << YAML::Value << p.width;
      out << YAML::Key << "shape" << YAML::Value << p.shape;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (e.type == "schedule") {
    out << YAML::Key << "figure" << YAML::Value << e.figure;
    out << YAML::Key << "component" << YAML::Value << e.component;
  }
  out << YAML::EndMap;
}

}  // namespace

std::string serialize_config(const ScenarioConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << c.description;

  out << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_atoms" << YAML::Value << c.geometry.n_atoms;
  out << YAML::Key << "separation_convention" << YAML::Value << c.geometry.separation_convention;
  out << YAML::Key << "separation" << YAML::Value << c.geometry.separation;
  out << YAML::Key << "alpha" << YAML::Value << c.geometry.alpha;
  out << YAML::Key << "gamma" << YAML::Value << c.geometry.gamma;
  out << YAML::Key << "coupling" << YAML::Value << c.geometry.coupling;
  out << YAML::EndMap;

  out << YAML::Key << "system" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "decay" << YAML::Value << c.system.decay;
  out << YAML::Key << "cross_decay" << YAML::Value << c.system.cross_decay;
  out << YAML::Key << "dipole_shifts" << YAML::Value << c.system.dipole_shifts;
  out << YAML::EndMap;

  out << YAML::Key << "initial_state" << YAML::Value << YAML::DoubleQuoted << c.initial_state;

  out << YAML::Key << "drive" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "omega_delta" << YAML::Value << c.drive.omega_delta;
  out << YAML::Key << "fields" << YAML::Value << YAML::BeginSeq;
  for (const auto& f : c.drive.fields) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << f.name;
    out << YAML::Key << "weights" << YAML::Value << f.weights;
    out << YAML::Key << "beta" << YAML::Value << f.beta;
    out << YAML::Key << "carrier" << YAML::Value << f.carrier;
    out << YAML::Key << "detuning" << YAML::Value << f.detuning;
    out << YAML::Key << "envelope" << YAML::Value;
    emit_envelope(out, f.envelope);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;

  if (c.ansatz) {
    out << YAML::Key << "ansatz" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "omega" << YAML::Value;
    emit_envelope(out, *c.ansatz);
    out << YAML::EndMap;
  }

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t_end" << YAML::Value << c.run.t_end;
  out << YAML::Key << "record_step" << YAML::Value << c.run.record_step;
  out << YAML::Key << "step" << YAML::Value << c.run.step;
  out << YAML::Key << "theta_points" << YAML::Value << c.run.theta_points;
  out << YAML::Key << "n_traj" << YAML::Value << c.run.n_traj;
  out << YAML::Key << "seed" << YAML::Value << c.run.seed;
  out << YAML::Key << "normalization" << YAML::Value << c.run.normalization;
  out << YAML::Key << "conditional_populations" << YAML::Value << c.run.conditional_populations;
  out << YAML::Key << "compare_undriven" << YAML::Value << c.run.compare_undriven;
  out << YAML::Key << "analytic" << YAML::Value << c.run.analytic;
  out << YAML::EndMap;

  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "populations" << YAML::Value << c.outputs.populations;
  out << YAML::Key << "distribution" << YAML::Value << c.outputs.distribution;
  out << YAML::Key << "events" << YAML::Value << c.outputs.events;
  out << YAML::Key << "report" << YAML::Value << c.outputs.report;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

EnvelopeConfig constant_envelope(double a) {
  EnvelopeConfig e;
  e.type = "constant";
  e.amplitude = a;
  return e;
}

EnvelopeConfig schedule_envelope(const std::string& fig, const std::string& component) {
  EnvelopeConfig e;
  e.type = "schedule";
  e.figure = fig;
  e.component = component;
  return e;
}

FieldConfig field(std::string name, std::string weights, std::string carrier, EnvelopeConfig env) {
  FieldConfig f;
  f.name = std::move(name);
  f.weights = std::move(weights);
  f.carrier = std::move(carrier);
  f.envelope = std::move(env);
  return f;
}

// Collective Raman / STIRAP pair for two atoms: symmetric mu, standing-wave nu.
DriveConfig two_atom_pair(double omega_delta, EnvelopeConfig mu, EnvelopeConfig nu) {
  DriveConfig d;
  d.omega_delta = omega_delta;
  d.fields.push_back(field("mu", "symmetric", "two_atom_mu", std::move(mu)));
  d.fields.push_back(field("nu", "antisymmetric", "two_atom_nu", std::move(nu)));
  return d;
}

// Co-propagating pair along the chain resonant with c-g (mu) and b-g (nu).
DriveConfig three_atom_pair() {
  DriveConfig d;
  FieldConfig mu = field("mu", "plane_wave", "three_atom_cg", schedule_envelope("fig5", "pump"));
  FieldConfig nu = field("nu", "plane_wave", "three_atom_bg", schedule_envelope("fig5", "stokes"));
  d.fields = {mu, nu};
  return d;
}

const std::vector<BuiltinInfo>& builtin_table() {
  static const std::vector<BuiltinInfo> table = {
      {"fig1a", "Fig. 1(a): collective Raman b -> c, E_mu = E_nu = 3, omega_delta = 30, alpha = 0, xi = 0.2"},
      {"fig1b", "Fig. 1(b): entangled STIRAP b -> c with the Gaussian pair, alpha = 0, xi = 1.25"},
      {"fig2", "Fig. 2: STIRAP with pulse trains of amplitude 60, alpha = 0, xi = 0.2"},
      {"fig3", "Fig. 3: driven vs undriven emission from |c>, exact Raman model vs tanh ansatz"},
      {"fig5", "Fig. 5: three-atom STIRAP b -> c with pulse trains of amplitude 20, s = 0.2"},
      {"fig6", "Fig. 6: three-atom emission from |b> with and without the Fig. 5 pulses"},
      {"free", "Free decay of two atoms from |c> with trajectory sampling, s = 0.2"},
  };
  return table;
}

}  // namespace

std::vector<BuiltinInfo> list_builtins() { return builtin_table(); }

bool is_builtin(const std::string& name) {
  const auto& t = builtin_table();
  return std::any_of(t.begin(), t.end(), [&](const BuiltinInfo& b) { return b.name == name; });
}

ScenarioConfig builtin_config(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  for (const auto& b : builtin_table()) {
    if (b.name == name) c.description = b.description;
  }
  if (name == "fig1a") {
    c.geometry = {2, "k0r", 0.2, 0.0, 1.0, "chain"};
    // With decay the superradiant |c> empties long before the Raman half
    // period; the figure shows the coherent transfer.
    c.system.decay = false;
    c.initial_state = "b";
    c.drive = two_atom_pair(30.0, constant_envelope(3.0), constant_envelope(3.0));
    c.run.t_end = 30.0;
    c.run.record_step = 0.01;
  } else if (name == "fig1b") {
    c.geometry = {2, "k0r", 1.25, 0.0, 1.0, "chain"};
    c.system.decay = false;
    c.initial_state = "b";
    c.drive = two_atom_pair(0.0, schedule_envelope("fig1b", "pump"), schedule_envelope("fig1b", "stokes"));
    c.run.t_end = make_fig_schedule(FigureSchedule::fig1b).recommended_t_end();
    c.run.record_step = 0.01;
  } else if (name == "fig2") {
    c.geometry = {2, "k0r", 0.2, 0.0, 1.0, "chain"};
    c.system.decay = false;
    c.initial_state = "b";
    c.drive = two_atom_pair(0.0, schedule_envelope("fig2", "pump"), schedule_envelope("fig2", "stokes"));
    c.run.t_end = make_fig_schedule(FigureSchedule::fig2).recommended_t_end();
    c.run.record_step = 0.001;
  } else if (name == "fig3") {
    // xi = k0 r = 0.2: the ansatz is only a good approximation when the
    // dipole shift dwarfs the Raman coupling, which s = 0.2 does not give.
    c.geometry = {2, "k0r", 0.2, kPi / 2, 1.0, "chain"};
    c.initial_state = "c";
    // E_mu = E_nu = sqrt(2 omega_delta tanh t) gives E_eff = tanh t.
    const double omega_delta = 30.0;
    EnvelopeConfig e;
    e.type = "sqrt_tanh";
    e.amplitude = std::sqrt(2.0 * omega_delta);
    c.drive = two_atom_pair(omega_delta, e, e);
    EnvelopeConfig omega;
    omega.type = "tanh";
    omega.amplitude = -1.0;  // elimination through |d> with omega_delta > 0 flips the sign
    c.ansatz = omega;
    c.run.t_end = 20.0;
    c.run.record_step = 0.001;
    c.run.compare_undriven = true;
    c.run.analytic = "phi_c";
    c.outputs.distribution = true;
  } else if (name == "fig5") {
    c.geometry = {3, "wavelength", 0.2, kPi / 2, 1.0, "chain"};
    c.initial_state = "b";
    c.drive = three_atom_pair();
    c.run.t_end = make_fig_schedule(FigureSchedule::fig5).recommended_t_end();
    c.run.record_step = 0.01;
  } else if (name == "fig6") {
    c.geometry = {3, "wavelength", 0.2, kPi / 2, 1.0, "chain"};
    c.initial_state = "b";
    c.drive = three_atom_pair();
    c.run.t_end = 70.0;
    c.run.record_step = 0.01;
    c.run.normalization = "unit_total";
    c.run.compare_undriven = true;
    c.outputs.distribution = true;
  } else if (name == "free") {
    c.geometry = {2, "wavelength", 0.2, kPi / 2, 1.0, "chain"};
    c.initial_state = "c";
    c.run.t_end = 20.0;
    c.run.record_step = 0.01;
    c.run.n_traj = 10000;
    c.run.analytic = "phi_c";
    c.outputs.distribution = true;
    c.outputs.events = true;
  } else {
    throw std::invalid_argument("unknown builtin scenario '" + name + "'");
  }
  return c;
}

void apply_overrides(ScenarioConfig& config, const RunOverrides& o) {
  if (o.seed) config.run.seed = *o.seed;
  if (o.theta_points) config.run.theta_points = *o.theta_points;
  if (o.step) config.run.step = *o.step;
}

// ---------------------------------------------------------------------------
// Model construction

CouplingMatrix build_couplings(const ScenarioConfig& config) {
  const AtomGeometry geom = config.geometry.to_geometry();
  geom.validate();
  if (config.geometry.coupling == "uniform" && geom.n_atoms >= 2) {
    return uniform_coupling_matrix(geom.n_atoms, xi_coefficient(geom.xi_neighbour(), geom.alpha, geom.gamma),
                                   geom.gamma);
  }
  return coupling_matrix(geom);
}

Envelope build_envelope(const EnvelopeConfig& e) {
  const double a = e.amplitude;
  if (e.type == "zero") return [](double) { return 0.0; };
  if (e.type == "constant") return [a](double) { return a; };
  if (e.type == "tanh") return [a](double t) { return a * std::tanh(t); };
  if (e.type == "sqrt_tanh") return [a](double t) { return t > 0.0 ? a * std::sqrt(std::tanh(t)) : 0.0; };
  if (e.type == "train") {
    PulseTrain train = e.train;
    return [train](double t) { return train.value(t); };
  }
  if (e.type == "schedule") {
    const StirapSchedule s = make_fig_schedule(parse_figure_schedule(e.figure));
    PulseTrain train = e.component == "pump" ? s.pump : s.stokes;
    return [train](double t) { return train.value(t); };
  }
  throw std::invalid_argument("unknown envelope type '" + e.type + "'");
}

DriveSpec build_drive(const ScenarioConfig& config, const CouplingMatrix& couplings) {
  const int n = config.geometry.n_atoms;
  const AtomGeometry geom = config.geometry.to_geometry();
  DriveSpec drive;
  drive.omega_delta = config.drive.omega_delta;
  for (const auto& f : config.drive.fields) {
    DriveField df;
    df.name = f.name;
    df.envelope = build_envelope(f.envelope);
    if (f.weights == "symmetric") df.weights = symmetric_weights(n);
    else if (f.weights == "antisymmetric") df.weights = antisymmetric_weights(n);
    else df.weights = plane_wave_weights(n, geom.spacing, f.beta);

    if (f.carrier == "explicit") {
      df.detuning = f.detuning;
    } else if (f.carrier.rfind("two_atom", 0) == 0) {
      const double delta = couplings.delta(0, 1);
      const TwoAtomCarriers tc = two_atom_carriers(delta, config.drive.omega_delta);
      df.detuning = f.carrier == "two_atom_mu" ? tc.mu : f.carrier == "two_atom_nu" ? tc.nu : delta;
    } else {
      const ThreeAtomSpectrum sp = three_atom_spectrum(couplings.delta(0, 1), couplings.delta(0, 2));
      const ThreeAtomCarriers tc = three_atom_carriers(sp);
      df.detuning = f.carrier == "three_atom_ab" ? tc.ab : f.carrier == "three_atom_bg" ? tc.bg : tc.cg;
    }
    drive.fields.push_back(std::move(df));
  }
  return drive;
}

double shortest_pulse_width(const ScenarioConfig& config) {
  double w = 0.0;
  auto consider = [&w](const PulseTrain& t) {
    if (t.pulses.empty()) return;
    const double m = t.min_width();
    w = (w == 0.0) ? m : std::min(w, m);
  };
  for (const auto& f : config.drive.fields) {
    if (f.envelope.type == "train") consider(f.envelope.train);
    if (f.envelope.type == "schedule") {
      const StirapSchedule s = make_fig_schedule(parse_figure_schedule(f.envelope.figure));
      consider(f.envelope.component == "pump" ? s.pump : s.stokes);
    }
  }
  return w;
}

CVector initial_state(const ScenarioConfig& config, const CollectiveBasis& basis) {
  const std::string& label = config.initial_state;
  const int n = config.geometry.n_atoms;
  const int dim = product_dimension(n);
  if (n > 1 && static_cast<int>(label.size()) == n && label.find_first_not_of("01") == std::string::npos) {
    CVector v = CVector::Zero(dim);
    v(std::stoi(label, nullptr, 2)) = 1.0;
    return v;
  }
  if (n == 1) {
    CVector v = CVector::Zero(2);
    v((label == "e" || label == "1") ? 1 : 0) = 1.0;
    return v;
  }
  return basis.ket(label);
}

EffectiveHamiltonian build_hamiltonian(const ScenarioConfig& config, const CouplingMatrix& couplings,
                                       bool with_drive) {
  SystemOptions opts;
  opts.single_atom_decay = config.system.decay;
  opts.cross_decay = config.system.decay && config.system.cross_decay;
  opts.dipole_shifts = config.system.dipole_shifts;
  EffectiveHamiltonian h = system_hamiltonian(config.geometry.to_geometry(), couplings, opts);
  if (with_drive) add_drive(h, build_drive(config, couplings));
  return h;
}

// ---------------------------------------------------------------------------
// Running

double RunReport::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw std::out_of_range("no metric '" + key + "' in report");
}

bool RunReport::has_metric(const std::string& key) const {
  return std::any_of(metrics.begin(), metrics.end(), [&](const auto& kv) { return kv.first == key; });
}

namespace {

double max_abs_difference(const AngularDistribution& a, const AngularDistribution& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

void raman_warnings(const ScenarioConfig& config, const DriveSpec& drive, const std::vector<double>& grid,
                    std::vector<std::string>& warnings) {
  if (config.geometry.n_atoms != 2 || config.drive.omega_delta == 0.0) return;
  double e_mu = 0.0, e_nu = 0.0;
  for (std::size_t k = 0; k < config.drive.fields.size(); ++k) {
    double peak = 0.0;
    for (double t : grid) peak = std::max(peak, std::abs(drive.fields[k].envelope(t)));
    if (config.drive.fields[k].carrier == "two_atom_mu") e_mu = std::max(e_mu, peak);
    if (config.drive.fields[k].carrier == "two_atom_nu") e_nu = std::max(e_nu, peak);
  }
  if (e_mu > 0.0 && e_nu > 0.0) raman_effective_coupling(e_mu, e_nu, config.drive.omega_delta, &warnings);
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config, const std::optional<std::filesystem::path>& out_dir) {
  if (auto errors = check_config(config); !errors.empty()) {
    std::string msg = "invalid scenario config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  const auto start = std::chrono::steady_clock::now();

  RunReport report;
  report.scenario = config.name;
  const AtomGeometry geom = config.geometry.to_geometry();
  const CouplingMatrix cm = build_couplings(config);
  const CollectiveBasis basis = default_basis(cm);
  const CVector psi0 = initial_state(config, basis);
  const auto grid = grid_with_spacing(0.0, config.run.t_end, config.run.record_step);

  EvolveOptions eopts;
  eopts.step = config.run.step;
  eopts.shortest_pulse = shortest_pulse_width(config);

  const DriveSpec drive = build_drive(config, cm);
  raman_warnings(config, drive, grid, report.warnings);
  EffectiveHamiltonian h = build_hamiltonian(config, cm, false);
  add_drive(h, drive);
  report.trace = evolve(h, psi0, grid, eopts);
  report.trace.basis = config.geometry.n_atoms <= 3 && config.geometry.n_atoms >= 2 ? "collective" : "product";
  report.populations = populations(report.trace, basis, config.run.conditional_populations);

  auto& m = report.metrics;
  m.emplace_back("rk4_step", report.trace.step);
  const auto norms = report.trace.norm_squared();
  m.emplace_back("final_norm2", norms.back());
  const auto& tab = report.populations;
  for (std::size_t j = 0; j < tab.labels.size(); ++j) {
    std::size_t kmax = 0;
    for (std::size_t k = 0; k < tab.values.size(); ++k) {
      if (tab.values[k][j] > tab.values[kmax][j]) kmax = k;
    }
    m.emplace_back("peak_p_" + tab.labels[j], tab.values[kmax][j]);
    m.emplace_back("t_peak_p_" + tab.labels[j], tab.times[kmax]);
  }
  const CVector final_amp = basis.transform() * report.trace.states.back();
  for (std::size_t j = 0; j < tab.labels.size(); ++j) {
    m.emplace_back("final_p_" + tab.labels[j], std::norm(final_amp(j)));
  }
  if (norms.back() > 0.0) {
    for (std::size_t j = 0; j < tab.labels.size(); ++j) {
      m.emplace_back("final_p_" + tab.labels[j] + "_conditional", std::norm(final_amp(j)) / norms.back());
    }
  }
  if (config.geometry.n_atoms == 2 || config.geometry.n_atoms == 3) {
    const CMatrix u = basis.transform();
    const int ib = basis.index("b"), ic = basis.index("c");
    double leak = 0.0;
    for (const auto& s : report.trace.states) {
      const CVector amp = u * s;
      leak = std::max(leak, s.squaredNorm() - std::norm(amp(ib)) - std::norm(amp(ic)));
    }
    m.emplace_back("max_leak_outside_bc", leak);
  }
  {
    std::vector<double> t, y;
    for (std::size_t k = 0; k < norms.size(); ++k) {
      if (norms[k] > 1e-10) {
        t.push_back(report.trace.times[k]);
        y.push_back(norms[k]);
      }
    }
    if (t.size() >= 10) m.emplace_back("decay_rate_fit", fit_decay_rate(t, y));
  }

  const bool directional = config.outputs.distribution || config.run.compare_undriven || config.run.n_traj > 0 ||
                           config.run.analytic != "none" ||
                           (config.ansatz && std::abs(geom.alpha - kPi / 2) <= 1e-12);
  if (directional) {
    const AngularGrid agrid = make_angular_grid(config.run.theta_points);
    const NormalizationScheme norm = parse_normalization(config.run.normalization);
    AngularDistribution main = angular_distribution_numeric(report.trace, geom, agrid, norm);
    for (const auto& w : main.warnings) report.warnings.push_back("distribution: " + w);
    m.emplace_back("total_emission_probability", total_emission_probability(main));
    report.distributions.push_back({"phi_numeric", main});

    if (config.run.compare_undriven) {
      const EffectiveHamiltonian h0 = build_hamiltonian(config, cm, false);
      const StateTrace t0 = evolve(h0, psi0, grid, eopts);
      AngularDistribution d0 = angular_distribution_numeric(t0, geom, agrid, norm);
      m.emplace_back("max_abs_vs_undriven", max_abs_difference(main, d0));
      report.distributions.push_back({"phi_undriven", std::move(d0)});
    }
    if (config.ansatz) {
      const EffectiveHamiltonian ha = ansatz_hamiltonian(geom, cm, build_envelope(*config.ansatz));
      const StateTrace ta = evolve(ha, psi0, grid, eopts);
      AngularDistribution da = angular_distribution_numeric(ta, geom, agrid, norm);
      m.emplace_back("max_abs_vs_ansatz", max_abs_difference(main, da));
      const auto na = ta.norm_squared();
      std::vector<double> t, y;
      for (std::size_t k = 0; k < na.size(); ++k) {
        if (na[k] > 1e-10) {
          t.push_back(ta.times[k]);
          y.push_back(na[k]);
        }
      }
      if (t.size() >= 10) m.emplace_back("ansatz_decay_rate_fit", fit_decay_rate(t, y));
      report.distributions.push_back({"phi_ansatz", std::move(da)});
    }
    if (config.run.analytic != "none") {
      AngularDistribution dan = config.run.analytic == "phi_b"
                                    ? phi_b_distribution(agrid, geom.spacing, geom.gamma)
                                    : phi_c_distribution(agrid, geom.spacing, geom.gamma);
      if (norm == NormalizationScheme::unit_total) {
        const double total = agrid.integrate(dan.values);
        for (double& v : dan.values) v /= total;
        dan.factor /= total;
        dan.normalization = norm;
      }
      m.emplace_back("max_abs_vs_analytic", max_abs_difference(main, dan));
      report.distributions.push_back({"phi_" + config.run.analytic, std::move(dan)});
    }
    if (config.run.n_traj > 0) {
      TrajectoryOptions topts;
      topts.n_traj = config.run.n_traj;
      topts.seed = config.run.seed;
      TrajectoryResult tr = sample_trajectories(report.trace, geom, agrid, topts);
      for (const auto& w : tr.warnings) report.warnings.push_back("trajectories: " + w);
      m.emplace_back("n_trajectories", static_cast<double>(config.run.n_traj));
      m.emplace_back("n_emitted", static_cast<double>(tr.n_emitted));
      m.emplace_back("mean_emission_time", tr.mean_time);
      m.emplace_back("stderr_emission_time", tr.stderr_time);
      report.events = std::move(tr.events);
    }
  }

  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    if (config.outputs.populations) {
      write_populations_csv(*out_dir / "populations.csv", report.populations, report.trace);
      report.files.push_back("populations.csv");
    }
    if (config.outputs.distribution && !report.distributions.empty()) {
      write_distribution_csv(*out_dir / "distribution.csv", report.distributions);
      report.files.push_back("distribution.csv");
    }
    if (config.outputs.events) {
      write_events_csv(*out_dir / "events.csv", report.events);
      report.files.push_back("events.csv");
    }
    if (config.outputs.report) {
      report.files.push_back("report.txt");
      write_report(*out_dir / "report.txt", report);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::scientific << std::setprecision(16);
  return out;
}

}  // namespace

void write_populations_csv(const std::filesystem::path& path, const PopulationTable& table, const StateTrace& trace) {
  auto out = open_output(path);
  out << "# time t in units of 1/gamma; p_k = |<k|psi(t)>|^2 in the " << trace.basis << " basis ("
      << (table.conditional ? "conditional: renormalised no-jump state" : "raw: unnormalised no-jump state")
      << "); norm2 = ||psi(t)||^2 survival probability\n";
  out << "t";
  for (const auto& l : table.labels) out << ",p_" << l;
  out << ",norm2\n";
  for (std::size_t k = 0; k < table.times.size(); ++k) {
    out << table.times[k];
    for (double v : table.values[k]) out << ',' << v;
    out << ',' << trace.states[k].squaredNorm() << '\n';
  }
}

void write_distribution_csv(const std::filesystem::path& path, const std::vector<NamedDistribution>& dists) {
  auto out = open_output(path);
  out << "# theta in radians; Phi(theta) is a density against sin(theta) dtheta\n";
  for (const auto& d : dists) {
    out << "# " << d.column << ": provenance=" << to_string(d.dist.provenance) << "; "
        << d.dist.normalization_note() << "\n";
  }
  out << "theta";
  for (const auto& d : dists) out << ',' << d.column;
  out << '\n';
  const auto& grid = dists.front().dist.grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << grid.thetas[k];
    for (const auto& d : dists) out << ',' << d.dist.values[k];
    out << '\n';
  }
}

void write_events_csv(const std::filesystem::path& path, const std::vector<EmissionEvent>& events) {
  auto out = open_output(path);
  out << "# first photon per trajectory; t_jump in units of 1/gamma, theta in radians; "
         "trajectories without an emission before t_end are omitted\n";
  out << "traj_id,t_jump,theta\n";
  for (const auto& e : events) {
    if (e.emitted) out << e.id << ',' << e.time << ',' << e.theta << '\n';
  }
}

void write_report(const std::filesystem::path& path, const RunReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  out << "scenario = " << report.scenario << '\n';
  out << "wall_time_s = " << report.wall_time << '\n';
  out << "files =";
  for (const auto& f : report.files) out << ' ' << f;
  out << '\n';
  for (const auto& [k, v] : report.metrics) out << k << " = " << v << '\n';
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

}  // namespace ddemit
