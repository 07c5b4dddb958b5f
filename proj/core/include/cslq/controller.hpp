#pragma once

#include <Eigen/Core>
#include <vector>

#include "cslq/time_grid.hpp"

namespace cslq {

/// Affine time-varying feedback law u(x, t) = u_ff(t) + K(t) x on a
/// non-uniform time grid. Evaluation between nodes is element-wise linear
/// interpolation; evaluation outside [t0, tf] clamps to the nearest endpoint.
/// Immutable after construction; safe to share across threads.
class TimeVaryingController {
public:
  TimeVaryingController(TimeGrid grid, std::vector<Eigen::VectorXd> u_ff,
                        std::vector<Eigen::MatrixXd> K);

  /// Constant-zero controller (the initialization used for kinematic systems).
  static TimeVaryingController zero(Eigen::Index n_x, Eigen::Index n_u, double t0, double tf);

  struct Gains {
    Eigen::VectorXd u_ff;
    Eigen::MatrixXd K;
  };
  Gains interpolate(double t) const;

  /// u_ff(t) + K(t) x
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x, double t) const;

  const TimeGrid& grid() const { return grid_; }
  const std::vector<Eigen::VectorXd>& feedforward() const { return u_ff_; }
  const std::vector<Eigen::MatrixXd>& feedback() const { return K_; }
  Eigen::Index state_dim() const { return K_.front().cols(); }
  Eigen::Index input_dim() const { return u_ff_.front().size(); }

private:
  TimeGrid grid_;
  std::vector<Eigen::VectorXd> u_ff_;
  std::vector<Eigen::MatrixXd> K_;
};

}  // namespace cslq
