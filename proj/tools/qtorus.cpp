#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "qtorus/experiment.hpp"
#include "qtorus/presets.hpp"

using namespace qtorus;

namespace {

struct CliOptions {
  std::string config_path;
  std::string preset_name;
  Overrides overrides;
};

void add_override_flags(CLI::App* cmd, CliOptions& opt) {
  auto* eps = cmd->add_option("--epsilon", "override perturbation.epsilon");
  eps->each([&opt](const std::string& v) { opt.overrides.epsilon = std::stod(v); });
  auto* mi = cmd->add_option("--max-iter", "override solver.max_iter");
  mi->each([&opt](const std::string& v) { opt.overrides.max_iter = std::stoi(v); });
  auto* seed = cmd->add_option("--seed", "override the run seed");
  seed->each([&opt](const std::string& v) {
    opt.overrides.seed = std::stoull(v);
  });
  cmd->add_flag_callback("--strict-conditions", [&opt] {
    opt.overrides.strict_conditions = true;
  });
  auto* out = cmd->add_option("--out", "override outputs.directory");
  out->each([&opt](const std::string& v) { opt.overrides.out_dir = v; });
}

int execute(ExperimentConfig cfg, const Overrides& overrides) {
  apply_overrides(cfg, overrides);
  RunSummary summary = run_experiment(cfg);
  std::cout << cfg.name << ": " << summary.termination << ", artifacts in "
            << summary.out_dir.string() << "\n";
  if (summary.exit_code == 2)
    std::cerr << "aborted: " << summary.detail << "\n";
  return summary.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-periodic torus solver and diagnostics"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config file");
  run_cmd->add_option("config", opt.config_path, "config path (flat text or json)")
      ->required();
  add_override_flags(run_cmd, opt);

  CLI::App* preset_cmd = app.add_subcommand("preset", "run a built-in experiment");
  preset_cmd->add_option("name", opt.preset_name, "preset name")->required();
  add_override_flags(preset_cmd, opt);

  CLI::App* list_cmd = app.add_subcommand("list", "list built-in experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    if (list_cmd->parsed()) {
      std::cout << list_presets();
      return 0;
    }
    if (run_cmd->parsed()) return execute(load_config(opt.config_path), opt.overrides);
    return execute(preset_config(opt.preset_name), opt.overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
