#include "cslq/models/tracked_base.hpp"

#include <cmath>
#include <stdexcept>

namespace cslq {

TrackedBaseModel::TrackedBaseModel(Params params) : params_(params) {
  if (params_.arm_joints < 0) {
    throw std::invalid_argument("TrackedBaseModel: arm_joints must be non-negative");
  }
  if (!(params_.half_track > 0.0)) {
    throw std::invalid_argument("TrackedBaseModel: half_track must be positive");
  }
  validate_dimensions();
}

Eigen::VectorXd TrackedBaseModel::flow(const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                       double) const {
  return u;
}

Eigen::VectorXd TrackedBaseModel::g1(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                     double) const {
  if (!params_.nonholonomic) return Eigen::VectorXd(0);
  Eigen::VectorXd g(1);
  g(0) = u(1) * std::cos(x(2)) - u(0) * std::sin(x(2)) - u(2) * params_.cor_offset;
  return g;
}

Eigen::MatrixXd TrackedBaseModel::flow_jacobian_x(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                                  double) const {
  return Eigen::MatrixXd::Zero(state_dim(), state_dim());
}

Eigen::MatrixXd TrackedBaseModel::flow_jacobian_u(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                                  double) const {
  return Eigen::MatrixXd::Identity(state_dim(), input_dim());
}

Eigen::MatrixXd TrackedBaseModel::g1_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                                double) const {
  if (!params_.nonholonomic) return Eigen::MatrixXd::Zero(0, state_dim());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, state_dim());
  C(0, 2) = -u(1) * std::sin(x(2)) - u(0) * std::cos(x(2));
  return C;
}

Eigen::MatrixXd TrackedBaseModel::g1_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                                                double) const {
  if (!params_.nonholonomic) return Eigen::MatrixXd::Zero(0, input_dim());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(1, input_dim());
  D(0, 0) = -std::sin(x(2));
  D(0, 1) = std::cos(x(2));
  D(0, 2) = -params_.cor_offset;
  return D;
}

std::pair<double, double> track_speeds(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                       double half_track) {
  const double forward = u(0) * std::cos(x(2)) + u(1) * std::sin(x(2));
  return {forward + half_track * u(2), forward - half_track * u(2)};
}

}  // namespace cslq
