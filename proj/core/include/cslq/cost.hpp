#pragma once

#include <Eigen/Core>
#include <vector>

#include "cslq/trajectory.hpp"

namespace cslq {

/// Taylor coefficients of the cost about a nominal (x, u), in deviation
/// variables and with explicit 1/2 factors on the second-order terms:
///   L ~ q + q_vec' dx + r' du + dx' P du + 1/2 dx' Q dx + 1/2 du' R du
struct CostNode {
  double q = 0.0;
  Eigen::VectorXd q_vec;
  Eigen::VectorXd r;
  Eigen::MatrixXd P;  // n_x x n_u
  Eigen::MatrixXd Q;  // n_x x n_x
  Eigen::MatrixXd R;  // n_u x n_u, positive definite
};

/// Terminal expansion: Phi ~ q + q_vec' dx + 1/2 dx' Q dx
struct TerminalCostNode {
  double q = 0.0;
  Eigen::VectorXd q_vec;
  Eigen::MatrixXd Q;
};

/// Abstract cost with derivative providers. The base class quadratizes with
/// finite differences; QuadraticCost overrides with exact coefficients.
class CostFunction {
public:
  virtual ~CostFunction() = default;

  virtual double intermediate(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                              double t) const = 0;
  virtual double terminal(const Eigen::VectorXd& x) const = 0;

  virtual CostNode quadratize_node(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                   double t) const;
  virtual TerminalCostNode quadratize_terminal(const Eigen::VectorXd& x) const;
};

/// The cost used by all shipped tasks:
///   integral of u'Ru + (x - x_r_intermediate)'Q(x - x_r_intermediate)
///   + (x(tf) - x_r)' Qf (x(tf) - x_r)
/// Q is zero in the reference tasks; intermediate states are unpenalized.
class QuadraticCost : public CostFunction {
public:
  QuadraticCost(Eigen::MatrixXd R, Eigen::MatrixXd Q, Eigen::MatrixXd Qf, Eigen::VectorXd x_r);

  double intermediate(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const override;
  double terminal(const Eigen::VectorXd& x) const override;
  CostNode quadratize_node(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           double t) const override;
  TerminalCostNode quadratize_terminal(const Eigen::VectorXd& x) const override;

  const Eigen::MatrixXd& input_weight() const { return R_; }
  const Eigen::MatrixXd& terminal_weight() const { return Qf_; }
  const Eigen::VectorXd& terminal_reference() const { return x_r_; }

private:
  Eigen::MatrixXd R_, Q_, Qf_;
  Eigen::VectorXd x_r_;
};

/// Per-node quadratization along a nominal trajectory.
struct CostQuadratization {
  std::vector<CostNode> nodes;  // one per trajectory grid node
  TerminalCostNode terminal;
};

/// Trapezoid-rule evaluation of the cost along a trajectory.
double evaluate_cost(const CostFunction& cost, const Trajectory& traj);

CostQuadratization quadratize(const CostFunction& cost, const Trajectory& traj);

}  // namespace cslq
