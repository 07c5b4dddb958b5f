#pragma once

#include <Eigen/Core>
#include <array>

#include "cslq/system_model.hpp"

namespace cslq {

/// Reduced wheeled-legged base: a 6-DoF floating trunk with four legs, each a
/// steering yaw joint plus a wheel spin joint.
///
/// State (14): world position r_B (3), trunk orientation as z-y-x Euler
/// angles (yaw, pitch, roll), then per leg (steer angle, wheel angle) x 4.
/// Input (14): body-frame angular velocity omega_B (3), body-frame linear
/// velocity v_B (3), then per leg (steer rate, wheel rate) x 4.
///
/// Constraints (12): per wheel, the world velocity of the ground contact
/// point must vanish (rolling plus ground contact, 3 rows per leg). Wheels
/// are ideal thin discs on flat ground, the contact point sits a wheel
/// radius below the wheel center in the world frame.
class WheeledLeggedModel : public SystemModel {
public:
  struct Params {
    std::array<Eigen::Vector3d, 4> leg_mounts{
        Eigen::Vector3d(0.4, 0.3, 0.0), Eigen::Vector3d(0.4, -0.3, 0.0),
        Eigen::Vector3d(-0.4, 0.3, 0.0), Eigen::Vector3d(-0.4, -0.3, 0.0)};
    double wheel_drop = 0.15;    // wheel center below the mount point [m]
    double wheel_radius = 0.1;   // r [m]
  };

  WheeledLeggedModel();
  explicit WheeledLeggedModel(Params params);

  Eigen::Index state_dim() const override { return 14; }
  Eigen::Index input_dim() const override { return 14; }
  Eigen::Index g1_dim() const override { return 12; }

  Eigen::VectorXd flow(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const override;
  Eigen::VectorXd g1(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const override;

  Eigen::MatrixXd flow_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                  double t) const override;
  Eigen::MatrixXd flow_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                  double t) const override;
  Eigen::MatrixXd g1_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                double t) const override;
  Eigen::MatrixXd g1_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                double t) const override;

  /// World velocity of the contact point of one wheel (leg in 0..3).
  Eigen::Vector3d wheel_contact_velocity(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                         int leg) const;

  /// A level-trunk state with the given planar base pose and steer angles.
  Eigen::VectorXd nominal_state(double x_pos, double y_pos, double yaw) const;

  const Params& params() const { return params_; }

private:
  // Constraint stack is linear homogeneous in the input: g1(x, u) = D(x) u.
  Eigen::MatrixXd constraint_matrix(const Eigen::VectorXd& x) const;

  Params params_;
};

}  // namespace cslq
