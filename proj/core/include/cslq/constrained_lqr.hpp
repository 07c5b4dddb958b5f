#pragma once

#include <Eigen/Core>
#include <vector>

#include "cslq/cost.hpp"
#include "cslq/integrator.hpp"
#include "cslq/system_model.hpp"
#include "cslq/time_grid.hpp"
#include "cslq/trajectory.hpp"

namespace cslq {

/// Coefficients of the constraint-projected LQ subproblem at one node.
/// With m1 = 0 the projection degenerates: D_dag is empty, A_tilde = A,
/// Q_tilde = Q + F'F, R_tilde = R.
struct ProjectedCoefficients {
  Eigen::MatrixXd D_dag;    // n_u x m1
  Eigen::MatrixXd A_tilde;  // n_x x n_x
  Eigen::MatrixXd C_tilde;  // n_u x n_x
  Eigen::MatrixXd D_tilde;  // n_u x n_u
  Eigen::VectorXd e_tilde;  // n_u
  Eigen::MatrixXd Q_tilde;  // n_x x n_x, symmetric
  Eigen::VectorXd q_tilde;  // n_x
  Eigen::MatrixXd R_tilde;  // n_u x n_u, symmetric PSD
  // True when the eigendecomposition pseudo-inverse of D R^-1 D' had to drop
  // modes below the rank threshold (singular steering configurations).
  bool regularized = false;
};

ProjectedCoefficients project_coefficients(const LinearizedDynamics& lin, const CostNode& cost);

/// Per-node LQ data along a nominal trajectory grid.
struct LqNode {
  LinearizedDynamics lin;
  CostNode cost;
  ProjectedCoefficients proj;
};

struct LqProblemData {
  TimeGrid grid;  // the forward rollout grid
  std::vector<LqNode> nodes;
  TerminalCostNode terminal;

  /// Linear interpolation of the per-node data, clamped outside the grid.
  /// The forward and backward grids both come out of adaptive integrators,
  /// so an interpolation rule between them is mandatory.
  LqNode interpolate(double t) const;
  bool any_regularized() const;
};

/// Linearize, quadratize and project along the trajectory.
LqProblemData build_lq_data(const SystemModel& model, const CostFunction& cost,
                            const Trajectory& traj);

/// Solution of the final-value Riccati-like equations on the backward
/// integrator's (reversed, ascending) grid.
struct RiccatiSolution {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> S;
  std::vector<Eigen::VectorXd> s;
  std::vector<Eigen::VectorXd> s_e;
  std::vector<double> s_scalar;

  struct Value {
    Eigen::MatrixXd S;
    Eigen::VectorXd s;
    Eigen::VectorXd s_e;
  };
  Value at(double t) const;
  /// Predicted cost-to-go constant at t0 (diagnostic only).
  double predicted_cost() const { return s_scalar.front(); }
};

RiccatiSolution solve_riccati(const LqProblemData& data, const IntegratorSettings& settings);

/// Feedback/feedforward update terms on the forward grid, plus the constraint
/// compliance residuals of the printed identities C + D L = 0, D l = 0,
/// D l_e + e = 0 (taken over full-rank nodes only).
struct ControllerUpdate {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> L;
  std::vector<Eigen::VectorXd> l;
  std::vector<Eigen::VectorXd> l_e;
  double max_constraint_gain_residual = 0.0;   // max_k |C + D L|_inf
  double max_feedforward_residual = 0.0;       // max_k |D l|_inf
  double max_restoration_residual = 0.0;       // max_k |D l_e + e|_inf
};

ControllerUpdate controller_update(const LqProblemData& data, const RiccatiSolution& sol);

}  // namespace cslq
