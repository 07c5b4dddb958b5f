#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "cslq/time_grid.hpp"

namespace cslq {

class SystemModel;

/// Time-stamped nominal state/input rollout. One state per grid node; the
/// input list may be one entry shorter than the grid (no input stored at the
/// final node).
struct Trajectory {
  Trajectory(TimeGrid grid, std::vector<Eigen::VectorXd> states,
             std::vector<Eigen::VectorXd> inputs);

  TimeGrid grid;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;

  Eigen::Index state_dim() const { return states.front().size(); }
  Eigen::Index input_dim() const { return inputs.front().size(); }

  /// Linear interpolation of the state, clamped outside [t0, tf].
  Eigen::VectorXd state_at(double t) const;
  /// Linear interpolation of the input; the (possibly missing) final node is
  /// treated as holding the last stored input.
  Eigen::VectorXd input_at(double t) const;

  /// CSV export: header `t, x0..x{n-1}, u0..u{m-1}`, one row per node.
  /// A missing final input row is padded with the last input.
  void write_csv(std::ostream& os) const;
};

/// Integrated square constraint error along the trajectory,
/// trapezoid rule on the trajectory grid. Zero for unconstrained models.
double constraint_ise(const Trajectory& traj, const SystemModel& model);

}  // namespace cslq
