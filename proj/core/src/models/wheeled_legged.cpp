#include "cslq/models/wheeled_legged.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cslq {

namespace {

Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

Eigen::Matrix3d rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

Eigen::Matrix3d drot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << -s, -c, 0, c, -s, 0, 0, 0, 0;
  return R;
}

Eigen::Matrix3d drot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << -s, 0, c, 0, 0, 0, -c, 0, -s;
  return R;
}

Eigen::Matrix3d drot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d R;
  R << 0, 0, 0, 0, -s, -c, 0, c, -s;
  return R;
}

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& v) {
  Eigen::Matrix3d M;
  M << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return M;
}

// Trunk rotation R = Rz(yaw) Ry(pitch) Rx(roll) and its angle partials.
struct TrunkRotation {
  Eigen::Matrix3d R;
  std::array<Eigen::Matrix3d, 3> dR;  // d/dyaw, d/dpitch, d/droll
};

TrunkRotation trunk_rotation(const Eigen::Vector3d& euler) {
  const Eigen::Matrix3d Z = rot_z(euler(0)), Y = rot_y(euler(1)), X = rot_x(euler(2));
  return {Z * Y * X,
          {drot_z(euler(0)) * Y * X, Z * drot_y(euler(1)) * X, Z * Y * drot_x(euler(2))}};
}

// Body angular velocity map: omega_body = W(pitch, roll) * (yawd, pitchd, rolld).
struct EulerRateMap {
  Eigen::Matrix3d W;
  Eigen::Matrix3d E;                  // W^-1, Euler rates from body rates
  std::array<Eigen::Matrix3d, 3> dE;  // partials w.r.t. (yaw, pitch, roll)
};

EulerRateMap euler_rate_map(const Eigen::Vector3d& euler) {
  const double p = euler(1), r = euler(2);
  const double cp = std::cos(p), sp = std::sin(p), cr = std::cos(r), sr = std::sin(r);
  EulerRateMap m;
  m.W << -sp, 0, 1, cp * sr, cr, 0, cp * cr, -sr, 0;
  m.E = m.W.inverse();
  Eigen::Matrix3d dW_p, dW_r;
  dW_p << -cp, 0, 0, -sp * sr, 0, 0, -sp * cr, 0, 0;
  dW_r << 0, 0, 0, cp * cr, -sr, 0, -cp * sr, -cr, 0;
  m.dE = {Eigen::Matrix3d::Zero(), -m.E * dW_p * m.E, -m.E * dW_r * m.E};
  return m;
}

void check_pitch(double pitch) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (std::abs(std::abs(pitch) - half_pi) < 1e-3) {
    throw std::runtime_error("WheeledLeggedModel: pitch within 1e-3 rad of the Euler singularity");
  }
}

// Wheel joint frame in the trunk frame: steer yaw, then the axle along the
// steering frame's lateral axis (the wheel spins about z of this frame).
Eigen::Matrix3d wheel_frame(double steer) {
  static const Eigen::Matrix3d tilt = rot_x(-std::numbers::pi / 2.0);
  return rot_z(steer) * tilt;
}

Eigen::Matrix3d dwheel_frame(double steer) {
  static const Eigen::Matrix3d tilt = rot_x(-std::numbers::pi / 2.0);
  return drot_z(steer) * tilt;
}

}  // namespace

WheeledLeggedModel::WheeledLeggedModel() : WheeledLeggedModel(Params{}) {}

WheeledLeggedModel::WheeledLeggedModel(Params params) : params_(params) {
  if (!(params_.wheel_radius > 0.0)) {
    throw std::invalid_argument("WheeledLeggedModel: wheel radius must be positive");
  }
  validate_dimensions();
}

Eigen::VectorXd WheeledLeggedModel::nominal_state(double x_pos, double y_pos, double yaw) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(14);
  x(0) = x_pos;
  x(1) = y_pos;
  x(2) = params_.wheel_drop + params_.wheel_radius;
  x(3) = yaw;
  return x;
}

Eigen::VectorXd WheeledLeggedModel::flow(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                         double) const {
  check_pitch(x(4));
  const auto rot = trunk_rotation(x.segment<3>(3));
  const auto rates = euler_rate_map(x.segment<3>(3));
  Eigen::VectorXd dx(14);
  dx.head<3>() = rot.R * u.segment<3>(3);
  dx.segment<3>(3) = rates.E * u.head<3>();
  dx.tail<8>() = u.tail<8>();
  return dx;
}

Eigen::MatrixXd WheeledLeggedModel::constraint_matrix(const Eigen::VectorXd& x) const {
  const auto rot = trunk_rotation(x.segment<3>(3));
  const Eigen::Vector3d down(0.0, 0.0, -params_.wheel_radius);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(12, 14);
  for (int leg = 0; leg < 4; ++leg) {
    const double steer = x(6 + 2 * leg);
    const Eigen::Vector3d center = params_.leg_mounts[leg] + Eigen::Vector3d(0, 0, -params_.wheel_drop);
    const Eigen::Vector3d r_bp = center + rot.R.transpose() * down;
    const Eigen::Matrix3d J = wheel_frame(steer);
    const Eigen::Vector3d spin_dir =
        J * Eigen::Vector3d::UnitZ().cross(J.transpose() * (rot.R.transpose() * down));
    D.block<3, 3>(3 * leg, 0) = -rot.R * cross_matrix(r_bp);
    D.block<3, 3>(3 * leg, 3) = rot.R;
    D.block<3, 1>(3 * leg, 7 + 2 * leg) = rot.R * spin_dir;
  }
  return D;
}

Eigen::VectorXd WheeledLeggedModel::g1(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                       double) const {
  return constraint_matrix(x) * u;
}

Eigen::Vector3d WheeledLeggedModel::wheel_contact_velocity(const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& u,
                                                           int leg) const {
  if (leg < 0 || leg > 3) throw std::invalid_argument("wheel_contact_velocity: leg out of range");
  return constraint_matrix(x).middleRows<3>(3 * leg) * u;
}

Eigen::MatrixXd WheeledLeggedModel::flow_jacobian_x(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& u, double) const {
  check_pitch(x(4));
  const auto rot = trunk_rotation(x.segment<3>(3));
  const auto rates = euler_rate_map(x.segment<3>(3));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(14, 14);
  for (int k = 0; k < 3; ++k) {
    A.block<3, 1>(0, 3 + k) = rot.dR[k] * u.segment<3>(3);
    A.block<3, 1>(3, 3 + k) = rates.dE[k] * u.head<3>();
  }
  return A;
}

Eigen::MatrixXd WheeledLeggedModel::flow_jacobian_u(const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd&, double) const {
  check_pitch(x(4));
  const auto rot = trunk_rotation(x.segment<3>(3));
  const auto rates = euler_rate_map(x.segment<3>(3));
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(14, 14);
  B.block<3, 3>(0, 3) = rot.R;
  B.block<3, 3>(3, 0) = rates.E;
  B.block<8, 8>(6, 6).setIdentity();
  return B;
}

Eigen::MatrixXd WheeledLeggedModel::g1_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                                                  double) const {
  return constraint_matrix(x);
}

Eigen::MatrixXd WheeledLeggedModel::g1_jacobian_x(const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& u, double) const {
  const auto rot = trunk_rotation(x.segment<3>(3));
  const Eigen::Vector3d down(0.0, 0.0, -params_.wheel_radius);
  const Eigen::Vector3d omega = u.head<3>();
  const Eigen::Vector3d v_b = u.segment<3>(3);
  const Eigen::Vector3d zhat = Eigen::Vector3d::UnitZ();

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(12, 14);
  for (int leg = 0; leg < 4; ++leg) {
    const double steer = x(6 + 2 * leg);
    const double wheel_rate = u(7 + 2 * leg);
    const Eigen::Vector3d center =
        params_.leg_mounts[leg] + Eigen::Vector3d(0, 0, -params_.wheel_drop);
    const Eigen::Vector3d g_vec = rot.R.transpose() * down;
    const Eigen::Vector3d r_bp = center + g_vec;
    const Eigen::Matrix3d J = wheel_frame(steer);
    const Eigen::Matrix3d dJ = dwheel_frame(steer);
    const Eigen::Vector3d spin_dir = J * zhat.cross(J.transpose() * g_vec);
    const Eigen::Vector3d base_term = v_b + omega.cross(r_bp) + spin_dir * wheel_rate;

    // Trunk orientation columns.
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d dg = rot.dR[k].transpose() * down;
      const Eigen::Vector3d dspin = J * zhat.cross(J.transpose() * dg);
      C.block<3, 1>(3 * leg, 3 + k) =
          rot.dR[k] * base_term + rot.R * (omega.cross(dg) + dspin * wheel_rate);
    }
    // Steering angle column.
    const Eigen::Vector3d dspin_steer =
        dJ * zhat.cross(J.transpose() * g_vec) + J * zhat.cross(dJ.transpose() * g_vec);
    C.block<3, 1>(3 * leg, 6 + 2 * leg) = rot.R * dspin_steer * wheel_rate;
  }
  return C;
}

}  // namespace cslq
