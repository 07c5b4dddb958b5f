#pragma once

#include <Eigen/Core>
#include <utility>

#include "cslq/system_model.hpp"

namespace cslq {

/// Planar tracked base reduced to a two-wheel model, optionally carrying
/// passive (unconstrained) arm joints. State (x_c, y_c, theta, arm...),
/// input = generalized velocities, flow is the identity map.
/// One nonholonomic constraint row:
///   yd cos(theta) - xd sin(theta) - thetad * d = 0
/// with d the offset between the center of rotation and the geometric center
/// of the two-wheel reduction.
class TrackedBaseModel : public SystemModel {
public:
  struct Params {
    double cor_offset = 0.0;   // d [m]
    double half_track = 0.3;   // b [m]
    int arm_joints = 0;        // extra unconstrained joints appended to the base
    bool nonholonomic = true;  // disable to model an omnidirectional base
  };

  explicit TrackedBaseModel(Params params);

  Eigen::Index state_dim() const override { return 3 + params_.arm_joints; }
  Eigen::Index input_dim() const override { return 3 + params_.arm_joints; }
  Eigen::Index g1_dim() const override { return params_.nonholonomic ? 1 : 0; }

  Eigen::VectorXd flow(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const override;
  Eigen::VectorXd g1(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const override;

  Eigen::MatrixXd flow_jacobian_x(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  double) const override;
  Eigen::MatrixXd flow_jacobian_u(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  double) const override;
  Eigen::MatrixXd g1_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                double t) const override;
  Eigen::MatrixXd g1_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                double t) const override;

  const Params& params() const { return params_; }

private:
  Params params_;
};

/// Real-world control inputs of the base: right and left track speeds
///   v_r = xd cos(theta) + yd sin(theta) + b * thetad
///   v_l = xd cos(theta) + yd sin(theta) - b * thetad
std::pair<double, double> track_speeds(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                       double half_track);

}  // namespace cslq
