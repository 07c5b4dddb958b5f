#include "cslq/task.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace cslq {

namespace {

int log_level() {
  static const int level = [] {
    const char* v = std::getenv("CSLQ_LOG");
    if (v == nullptr) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

std::ofstream open_output(const std::string& out_dir, const std::string& file) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = std::filesystem::path(out_dir) / file;
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file '" + path.string() + "'");
  return os;
}

void log_history(const SolveReport& report) {
  if (log_level() < 2) return;
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    const IterationRecord& r = report.history[i];
    std::cerr << "  iter " << i << ": cost " << r.cost << ", ise " << r.constraint_ise
              << ", alpha " << r.alpha << "\n";
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PlanResult run_plan(const TaskConfig& config, const std::string& out_dir) {
  const TaskObjects task = build_task(config);
  const TimeVaryingController init = TimeVaryingController::zero(
      task.model->state_dim(), task.model->input_dim(), 0.0, config.horizon);

  PlanResult out;
  const auto t0 = std::chrono::steady_clock::now();
  out.report = solve(*task.model, *task.cost, task.x0, 0.0, config.horizon, init, config.solver);
  out.wall_time = seconds_since(t0);
  out.exit_code = out.report.converged ? 0 : 2;

  if (out.report.trajectory.has_value()) {
    auto os = open_output(out_dir, "trajectory.csv");
    out.report.trajectory->write_csv(os);
  }
  {
    auto os = open_output(out_dir, "convergence.csv");
    out.report.write_convergence_csv(os);
  }
  {
    auto os = open_output(out_dir, "summary.txt");
    out.report.write_summary(os);
    os << "wall_time = " << out.wall_time << "\n";
  }
  if (log_level() >= 1) {
    std::cerr << "plan '" << config.name << "': " << (out.report.converged ? "converged" : "NOT converged")
              << " in " << out.report.iterations << " iterations, cost " << out.report.final_cost
              << ", ise " << out.report.final_constraint_ise << ", " << out.wall_time << " s\n";
  }
  log_history(out.report);
  return out;
}

MpcRunResult run_mpc(const TaskConfig& config, const std::string& out_dir) {
  MpcRunResult out;
  out.episode = run_episode(config);
  out.exit_code = out.episode.reached_goal ? 0 : 2;

  {
    auto os = open_output(out_dir, "ticks.csv");
    out.episode.write_ticks_csv(os);
  }
  {
    auto os = open_output(out_dir, "replans.csv");
    out.episode.write_replans_csv(os);
  }
  {
    auto os = open_output(out_dir, "summary.txt");
    os.precision(17);
    os << "converged = " << (out.episode.reached_goal ? "true" : "false") << "\n";
    os << "terminal_error = " << out.episode.terminal_error << "\n";
    os << "max_ee_displacement = " << out.episode.max_ee_displacement << "\n";
    os << "replans = " << out.episode.replans.size() << "\n";
    os << "ticks = " << out.episode.ticks.size() << "\n";
  }
  if (log_level() >= 1) {
    std::cerr << "mpc '" << config.name << "': "
              << (out.episode.reached_goal ? "reached goal" : "TIMED OUT (unconverged)")
              << ", terminal error " << out.episode.terminal_error << " m, "
              << out.episode.replans.size() << " replans\n";
  }
  return out;
}

ScalingResult run_scaling(const TaskConfig& config, const std::vector<double>& horizons,
                          const std::string& out_dir) {
  if (horizons.size() < 2) {
    throw ConfigError("scaling: need at least two horizons to compare");
  }
  const TaskObjects task = build_task(config);

  ScalingResult out;
  for (const double horizon : horizons) {
    if (!(horizon > 0.0)) throw ConfigError("scaling: horizons must be positive");
    const TimeVaryingController init = TimeVaryingController::zero(
        task.model->state_dim(), task.model->input_dim(), 0.0, horizon);
    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport report =
        solve(*task.model, *task.cost, task.x0, 0.0, horizon, init, config.solver);
    const double elapsed = seconds_since(t0);
    const std::size_t iters = std::max<std::size_t>(report.iterations, 1);
    out.rows.push_back({horizon, report.iterations, elapsed, elapsed / iters});
    if (log_level() >= 1) {
      std::cerr << "scaling '" << config.name << "' T=" << horizon << ": " << report.iterations
                << " iterations, " << elapsed << " s total\n";
    }
  }

  auto os = open_output(out_dir, "scaling.csv");
  os.precision(17);
  os << "horizon,iterations,total_time,per_iteration_time\n";
  for (const ScalingRow& r : out.rows) {
    os << r.horizon << "," << r.iterations << "," << r.total_time << ","
       << r.per_iteration_time << "\n";
  }
  return out;
}

}  // namespace cslq
