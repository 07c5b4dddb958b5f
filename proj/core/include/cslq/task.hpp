#pragma once

#include <string>
#include <vector>

#include "cslq/config.hpp"
#include "cslq/mpc.hpp"
#include "cslq/slq.hpp"

namespace cslq {

/// Runners behind the CLI subcommands. Each writes its artifacts into
/// `out_dir` (created if missing) and reports the process exit code:
/// 0 on success, 2 on non-convergence. Configuration errors propagate as
/// ConfigError and map to exit 1 at the CLI boundary.
///
/// Verbosity is controlled by the CSLQ_LOG environment variable:
/// "quiet" (default) emits nothing, "info" a per-run summary line on stderr,
/// "debug" additionally the per-iteration history.

struct PlanResult {
  int exit_code = 2;
  SolveReport report;
  double wall_time = 0.0;  // s, whole solve
};

/// Open-loop planning: solves the task over [0, horizon] from the zero
/// controller and writes trajectory.csv, convergence.csv and summary.txt.
PlanResult run_plan(const TaskConfig& config, const std::string& out_dir);

struct MpcRunResult {
  int exit_code = 2;
  EpisodeResult episode;
};

/// Closed-loop episode against the simulated plant; writes ticks.csv,
/// replans.csv and summary.txt. Exit 2 when the goal is not reached before
/// the timeout (summary flags the episode unconverged).
MpcRunResult run_mpc(const TaskConfig& config, const std::string& out_dir);

struct ScalingRow {
  double horizon = 0.0;
  std::size_t iterations = 0;
  double total_time = 0.0;          // s, whole solve
  double per_iteration_time = 0.0;  // s
};

struct ScalingResult {
  int exit_code = 0;
  std::vector<ScalingRow> rows;
};

/// Re-solves the task at each horizon and writes scaling.csv (analysis
/// artifact; always exit 0). Fewer than two horizons is a usage error and
/// throws ConfigError.
ScalingResult run_scaling(const TaskConfig& config, const std::vector<double>& horizons,
                          const std::string& out_dir);

}  // namespace cslq
