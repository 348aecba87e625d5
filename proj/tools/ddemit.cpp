// ddemit command-line front end: run / list / validate scenarios.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ddemit/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

// A builtin name or a path to a YAML config.
int load(const std::string& target, ddemit::ScenarioConfig& config) {
  if (ddemit::is_builtin(target)) {
    config = ddemit::builtin_config(target);
    return kExitOk;
  }
  std::string text;
  if (!read_file(target, text)) {
    std::cerr << "error: '" << target << "' is neither a builtin scenario nor a readable file\n";
    return kExitInvalid;
  }
  auto result = ddemit::validate_config(text);
  if (!result.ok()) {
    for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
    return kExitInvalid;
  }
  config = *result.config;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emission and population transfer of dipole-coupled two-level atoms"};
  app.require_subcommand(1);

  std::string target;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> theta_points;
  std::optional<double> step;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a builtin scenario or a YAML config");
  run->add_option("scenario", target, "Builtin name or config path")->required();
  run->add_option("--out-dir", out_dir, "Directory for CSV and report output")->capture_default_str();
  run->add_option("--seed", seed, "Trajectory master seed");
  run->add_option("--theta-points", theta_points, "Number of theta grid points (odd)");
  run->add_option("--step", step, "Fixed RK4 step in 1/gamma (0 = automatic)");
  run->add_flag("--quiet", quiet, "Only print errors");

  auto* list = app.add_subcommand("list", "List builtin scenarios");
  std::string dump_name;
  auto* show = app.add_subcommand("show", "Print the YAML config of a builtin scenario");
  show->add_option("scenario", dump_name, "Builtin name")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a YAML config without running it");
  validate->add_option("file", validate_path, "Config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*list) {
      for (const auto& b : ddemit::list_builtins()) std::cout << b.name << "  " << b.description << '\n';
      return kExitOk;
    }
    if (*show) {
      if (!ddemit::is_builtin(dump_name)) {
        std::cerr << "error: unknown builtin '" << dump_name << "'\n";
        return kExitInvalid;
      }
      std::cout << ddemit::serialize_config(ddemit::builtin_config(dump_name));
      return kExitOk;
    }
    if (*validate) {
      std::string text;
      if (!read_file(validate_path, text)) {
        std::cerr << "error: cannot read '" << validate_path << "'\n";
        return kExitInvalid;
      }
      const auto result = ddemit::validate_config(text);
      for (const auto& e : result.errors) std::cerr << "error: " << e << '\n';
      if (!result.ok()) return kExitInvalid;
      std::cout << "ok: " << result.config->name << '\n';
      return kExitOk;
    }

    ddemit::ScenarioConfig config;
    if (int rc = load(target, config); rc != kExitOk) return rc;
    ddemit::apply_overrides(config, {seed, theta_points, step});
    if (auto errors = ddemit::check_config(config); !errors.empty()) {
      for (const auto& e : errors) std::cerr << "error: " << e << '\n';
      return kExitInvalid;
    }
    const auto report = ddemit::run_scenario(config, std::filesystem::path(out_dir));
    if (!quiet) {
      std::cout << "scenario " << report.scenario << " finished in " << report.wall_time << " s\n";
      std::cout.precision(10);
      for (const auto& [k, v] : report.metrics) std::cout << "  " << k << " = " << v << '\n';
      for (const auto& w : report.warnings) std::cout << "  warning: " << w << '\n';
      std::cout << "wrote";
      for (const auto& f : report.files) std::cout << ' ' << (std::filesystem::path(out_dir) / f).string();
      std::cout << '\n';
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
