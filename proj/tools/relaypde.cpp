#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relaypde/experiments.hpp"
#include "relaypde/scenario.hpp"

namespace {

relaypde::ScenarioConfig load_with_overrides(const std::string& path, const std::string& out_dir, long long seed) {
  relaypde::ScenarioConfig cfg = relaypde::load_scenario(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion simulator with spatially distributed relay hysteresis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  long long seed = -1;
  unsigned threads = 1;
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--seed", seed, "Seed for perturbation generators (overrides the config)");
  app.add_option("--threads", threads, "Worker threads for independent runs")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Solve a scenario and write CSV output");
  run->add_option("config", config_path, "Scenario JSON")->required();
  auto* experiment = app.add_subcommand("experiment", "Run the scenario's experiment block");
  experiment->add_option("config", config_path, "Scenario JSON")->required();
  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario");
  validate->add_option("config", config_path, "Scenario JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const relaypde::ScenarioConfig cfg = load_with_overrides(config_path, out_dir, seed);
    if (validate->parsed()) {
      std::cout << "ok: " << cfg.name << '\n';
      return relaypde::exit_ok;
    }
    const std::filesystem::path dir = cfg.output_dir;
    int code = 0;
    if (run->parsed()) {
      code = relaypde::run_scenario(cfg, dir, threads);
    } else {
      code = relaypde::run_experiment(cfg, dir, threads);
    }
    std::ifstream summary(dir / "summary.txt");
    std::cout << summary.rdbuf();
    return code;
  } catch (const relaypde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return relaypde::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
