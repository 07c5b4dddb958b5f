#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cslq/constrained_lqr.hpp"
#include "cslq/controller.hpp"
#include "cslq/cost.hpp"
#include "cslq/integrator.hpp"
#include "cslq/system_model.hpp"
#include "cslq/trajectory.hpp"

namespace cslq {

struct LineSearchSettings {
  double alpha_min = 1.0 / 64.0;
  double reduction = 0.5;
  double merit_constraint_weight = 10.0;  // nu in M = J + nu * ISE

  void validate() const;
  bool operator==(const LineSearchSettings&) const = default;
};

struct SolverSettings {
  std::size_t max_iterations = 30;
  double cost_rel_tol = 1e-4;
  double constraint_ise_tol = 1e-4;
  double divergence_bound = 1e6;  // state max-norm guard in rollouts
  LineSearchSettings line_search;
  // Cost and constraint integrals are trapezoid sums over the rollout nodes,
  // so the forward step is capped well below the horizon even when the error
  // controller would allow bigger steps; same for the backward grid that the
  // controller update interpolates from.
  IntegratorSettings forward{.max_step = 0.02};
  IntegratorSettings backward{.max_step = 0.02};

  void validate() const;
  bool operator==(const SolverSettings&) const = default;
};

struct IterationRecord {
  double cost = 0.0;
  double constraint_ise = 0.0;
  double merit = 0.0;
  double alpha = 0.0;
  double alpha_e = 0.0;
};

struct SolveReport {
  std::size_t iterations = 0;
  std::vector<IterationRecord> history;
  bool converged = false;
  bool line_search_failed = false;
  double final_cost = 0.0;
  double final_constraint_ise = 0.0;
  double predicted_cost = 0.0;  // scalar Riccati diagnostic of the last pass
  // Compliance residuals of the last controller update (full-rank nodes).
  double max_constraint_gain_residual = 0.0;
  double max_feedforward_residual = 0.0;
  double max_restoration_residual = 0.0;
  std::optional<Trajectory> trajectory;
  std::optional<TimeVaryingController> controller;

  void write_summary(std::ostream& os) const;
  void write_convergence_csv(std::ostream& os) const;
};

/// Full constrained SLQ iteration: rollout, LQ approximation, constrained LQR
/// backward pass, line search, controller update, convergence test.
/// Converged means relative cost decrease below cost_rel_tol AND constraint
/// ISE below constraint_ise_tol. The initial controller must stabilize the
/// rollout; for kinematic systems the zero controller qualifies.
SolveReport solve(const SystemModel& model, const CostFunction& cost, const Eigen::VectorXd& x0,
                  double t0, double tf, const TimeVaryingController& init_ctrl,
                  const SolverSettings& settings);

}  // namespace cslq
