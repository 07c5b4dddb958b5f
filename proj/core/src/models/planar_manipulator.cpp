#include "cslq/models/planar_manipulator.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace cslq {

namespace {

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

}  // namespace

PlanarManipulatorModel::PlanarManipulatorModel(Params params) : params_(std::move(params)) {
  if (params_.ee_mode != EeConstraintMode::none && !params_.ee_reference) {
    throw std::invalid_argument("PlanarManipulatorModel: ee_reference required for EE constraint");
  }
  for (double l : params_.link_lengths) {
    if (!(l > 0.0)) throw std::invalid_argument("PlanarManipulatorModel: link lengths must be > 0");
  }
  validate_dimensions();
}

std::array<Eigen::Vector2d, 4> PlanarManipulatorModel::tail_sums(const Eigen::VectorXd& x) const {
  const double theta = x(2);
  std::array<Eigen::Vector2d, 4> T;
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  double angle = theta;
  std::array<Eigen::Vector2d, 3> links;
  for (int i = 0; i < 3; ++i) {
    angle += x(3 + i);
    links[i] = params_.link_lengths[i] * Eigen::Vector2d(std::cos(angle), std::sin(angle));
  }
  for (int j = 2; j >= 0; --j) {
    acc += links[j];
    T[j + 1] = acc;
  }
  T[0] = T[1] + params_.arm_mount_offset * Eigen::Vector2d(std::cos(theta), std::sin(theta));
  return T;
}

Eigen::VectorXd PlanarManipulatorModel::flow(const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                             double) const {
  return u;
}

Eigen::Vector2d PlanarManipulatorModel::ee_position(const Eigen::VectorXd& x) const {
  return x.head<2>() + tail_sums(x)[0];
}

Eigen::MatrixXd PlanarManipulatorModel::ee_jacobian(const Eigen::VectorXd& x) const {
  const auto T = tail_sums(x);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 6);
  J(0, 0) = 1.0;
  J(1, 1) = 1.0;
  J.col(2) = perp(T[0]);
  for (int j = 0; j < 3; ++j) J.col(3 + j) = perp(T[j + 1]);
  return J;
}

Eigen::MatrixXd PlanarManipulatorModel::arm_jacobian(const Eigen::VectorXd& x) const {
  return ee_jacobian(x).rightCols<3>();
}

double PlanarManipulatorModel::arm_singular_value(const Eigen::VectorXd& x) const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(arm_jacobian(x));
  return svd.singularValues().minCoeff();
}

double PlanarManipulatorModel::max_reach() const {
  return params_.arm_mount_offset + params_.link_lengths[0] + params_.link_lengths[1] +
         params_.link_lengths[2];
}

Eigen::VectorXd PlanarManipulatorModel::g1(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                           double t) const {
  Eigen::VectorXd g(g1_dim());
  g(0) = u(1) * std::cos(x(2)) - u(0) * std::sin(x(2)) - u(2) * params_.cor_offset;
  if (has_velocity_rows()) {
    g.segment<2>(1) = ee_jacobian(x) * u - params_.ee_reference->velocity(t);
    if (params_.ee_mode == EeConstraintMode::hold) {
      g.segment<2>(1) += params_.hold_gain * (ee_position(x) - params_.ee_reference->position(t));
    }
  }
  return g;
}

Eigen::VectorXd PlanarManipulatorModel::g2(const Eigen::VectorXd& x, double t) const {
  if (!has_position_rows()) return Eigen::VectorXd::Zero(0);
  return ee_position(x) - params_.ee_reference->position(t);
}

Eigen::MatrixXd PlanarManipulatorModel::flow_jacobian_x(const Eigen::VectorXd&,
                                                        const Eigen::VectorXd&, double) const {
  return Eigen::MatrixXd::Zero(6, 6);
}

Eigen::MatrixXd PlanarManipulatorModel::flow_jacobian_u(const Eigen::VectorXd&,
                                                        const Eigen::VectorXd&, double) const {
  return Eigen::MatrixXd::Identity(6, 6);
}

Eigen::MatrixXd PlanarManipulatorModel::g1_jacobian_x(const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd& u, double) const {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(g1_dim(), 6);
  C(0, 2) = -u(1) * std::sin(x(2)) - u(0) * std::cos(x(2));
  if (has_velocity_rows()) {
    // d(J(q) u)/dq: every column of J rotates with the angles it depends on,
    // so the derivative of perp(T) is -T.
    const auto T = tail_sums(x);
    Eigen::Vector2d dtheta = -u(2) * T[0];
    for (int j = 0; j < 3; ++j) dtheta -= u(3 + j) * T[j + 1];
    C.block<2, 1>(1, 2) = dtheta;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector2d dphi = -u(2) * T[k + 1];
      for (int j = 0; j < 3; ++j) dphi -= u(3 + j) * T[std::max(j, k) + 1];
      C.block<2, 1>(1, 3 + k) = dphi;
    }
    if (params_.ee_mode == EeConstraintMode::hold) {
      C.bottomRows<2>() += params_.hold_gain * ee_jacobian(x);
    }
  }
  return C;
}

Eigen::MatrixXd PlanarManipulatorModel::g1_jacobian_u(const Eigen::VectorXd& x,
                                                      const Eigen::VectorXd&, double) const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g1_dim(), 6);
  D(0, 0) = -std::sin(x(2));
  D(0, 1) = std::cos(x(2));
  D(0, 2) = -params_.cor_offset;
  if (has_velocity_rows()) {
    D.bottomRows<2>() = ee_jacobian(x);
  }
  return D;
}

Eigen::MatrixXd PlanarManipulatorModel::g2_jacobian_x(const Eigen::VectorXd& x, double) const {
  if (!has_position_rows()) return Eigen::MatrixXd::Zero(0, 6);
  return ee_jacobian(x);
}

}  // namespace cslq
