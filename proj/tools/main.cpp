// Command-line front end: plan a task open loop, run a closed-loop episode
// against the simulated plant, or measure solve-time scaling over horizons.
// Exit codes: 0 success, 1 usage/configuration error, 2 non-convergence.
// Set CSLQ_LOG=info or CSLQ_LOG=debug for progress output on stderr.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cslq/config.hpp"
#include "cslq/task.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Constrained continuous-time trajectory planner"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::vector<double> horizons;
  std::optional<unsigned> seed;

  CLI::App* plan = app.add_subcommand("plan", "Solve a task open loop");
  plan->add_option("config", config_path, "Task configuration file")->required();
  plan->add_option("--out", out_dir, "Output directory");

  CLI::App* mpc = app.add_subcommand("mpc", "Run a closed-loop episode on the simulated plant");
  mpc->add_option("config", config_path, "Task configuration file")->required();
  mpc->add_option("--out", out_dir, "Output directory");
  mpc->add_option("--seed", seed, "Override the disturbance seed");

  CLI::App* scaling = app.add_subcommand("scaling", "Re-solve at several horizons and time it");
  scaling->add_option("config", config_path, "Task configuration file")->required();
  scaling->add_option("--horizons", horizons, "Comma-separated horizon list (at least two)")
      ->required()
      ->delimiter(',');
  scaling->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help exits 0, any parse failure is a usage error
  }

  try {
    cslq::TaskConfig config = cslq::TaskConfig::load(config_path);
    if (plan->parsed()) {
      return cslq::run_plan(config, out_dir).exit_code;
    }
    if (mpc->parsed()) {
      if (!config.mpc.enabled) {
        std::cerr << "error: " << config_path << " has no [mpc] section\n";
        return 1;
      }
      if (seed.has_value()) config.mpc.seed = *seed;
      return cslq::run_mpc(config, out_dir).exit_code;
    }
    if (horizons.size() < 2) {
      std::cerr << "error: scaling needs at least two horizons\n";
      return 1;
    }
    return cslq::run_scaling(config, horizons, out_dir).exit_code;
  } catch (const cslq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;  // solver-side failure on a valid config
  }
}
