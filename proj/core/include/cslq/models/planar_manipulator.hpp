#pragma once

#include <Eigen/Core>
#include <array>
#include <memory>

#include "cslq/models/reference_path.hpp"
#include "cslq/system_model.hpp"

namespace cslq {

// hold is the stabilized velocity constraint J(q) qd - v_ref + k (r_ee -
// r_ref) = 0: the end-effector velocity is constrained (hard, input-coupled)
// to decay accumulated placement error at rate hold_gain, so the hold
// recovers when the plant deviates from the plan instead of re-anchoring at
// the displaced position.
enum class EeConstraintMode { none, position, velocity, hold };

/// Tracked base carrying a 3R planar arm, with optional end-effector tracking
/// constraints in the world frame.
/// State (x_c, y_c, theta, phi1, phi2, phi3), input = generalized velocities.
/// Constraints:
///   g1 row 0          nonholonomic base constraint (see TrackedBaseModel)
///   g1 rows 1-2       velocity mode: J(q) qd - v_ref(t) = 0
///                     hold mode: additionally + hold_gain (r_ee - r_ref)
///   g2 rows 0-1       position mode: r_ee(q) - r_ref(t) = 0
class PlanarManipulatorModel : public SystemModel {
public:
  struct Params {
    double cor_offset = 0.0;                      // d [m]
    double half_track = 0.3;                      // b [m]
    double arm_mount_offset = 0.3;                // shoulder ahead of base center [m]
    std::array<double, 3> link_lengths{1.0, 0.8, 0.5};
    EeConstraintMode ee_mode = EeConstraintMode::none;
    double hold_gain = 2.0;                       // 1/s, error decay rate in hold mode
    std::shared_ptr<const ReferencePath> ee_reference;  // required unless mode == none
  };

  explicit PlanarManipulatorModel(Params params);

  Eigen::Index state_dim() const override { return 6; }
  Eigen::Index input_dim() const override { return 6; }
  Eigen::Index g1_dim() const override { return has_velocity_rows() ? 3 : 1; }
  Eigen::Index g2_dim() const override { return has_position_rows() ? 2 : 0; }

  Eigen::VectorXd flow(const Eigen::VectorXd&, const Eigen::VectorXd& u, double) const override;
  Eigen::VectorXd g1(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const override;
  Eigen::VectorXd g2(const Eigen::VectorXd& x, double t) const override;

  Eigen::MatrixXd flow_jacobian_x(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  double) const override;
  Eigen::MatrixXd flow_jacobian_u(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  double) const override;
  Eigen::MatrixXd g1_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                double t) const override;
  Eigen::MatrixXd g1_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                double t) const override;
  Eigen::MatrixXd g2_jacobian_x(const Eigen::VectorXd& x, double t) const override;

  /// World-frame end-effector position.
  Eigen::Vector2d ee_position(const Eigen::VectorXd& x) const;
  /// 2 x 6 Jacobian of ee_position with respect to the full state.
  Eigen::MatrixXd ee_jacobian(const Eigen::VectorXd& x) const;
  /// 2 x 3 Jacobian with respect to the arm joints only (singularity metric).
  Eigen::MatrixXd arm_jacobian(const Eigen::VectorXd& x) const;
  /// Smallest singular value of arm_jacobian.
  double arm_singular_value(const Eigen::VectorXd& x) const;

  double max_reach() const;
  const Params& params() const { return params_; }

private:
  bool has_velocity_rows() const {
    return params_.ee_mode == EeConstraintMode::velocity ||
           params_.ee_mode == EeConstraintMode::hold;
  }
  bool has_position_rows() const { return params_.ee_mode == EeConstraintMode::position; }

  // Partial link-vector sums T_j = sum_{i >= j} l_i (cos, sin)(theta + s_i);
  // T_0 additionally includes the mount offset vector.
  std::array<Eigen::Vector2d, 4> tail_sums(const Eigen::VectorXd& x) const;

  Params params_;
};

}  // namespace cslq
