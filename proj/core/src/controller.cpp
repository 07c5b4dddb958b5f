#include "cslq/controller.hpp"

#include <stdexcept>
#include <string>

namespace cslq {

TimeVaryingController::TimeVaryingController(TimeGrid grid, std::vector<Eigen::VectorXd> u_ff,
                                             std::vector<Eigen::MatrixXd> K)
    : grid_(std::move(grid)), u_ff_(std::move(u_ff)), K_(std::move(K)) {
  if (u_ff_.size() != grid_.size() || K_.size() != grid_.size()) {
    throw std::invalid_argument("TimeVaryingController: feedforward/feedback length (" +
                                std::to_string(u_ff_.size()) + "/" + std::to_string(K_.size()) +
                                ") must match grid size " + std::to_string(grid_.size()));
  }
  const Eigen::Index nu = u_ff_.front().size();
  const Eigen::Index nx = K_.front().cols();
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    if (u_ff_[k].size() != nu || K_[k].rows() != nu || K_[k].cols() != nx) {
      throw std::invalid_argument("TimeVaryingController: inconsistent dimensions at node " +
                                  std::to_string(k));
    }
  }
}

TimeVaryingController TimeVaryingController::zero(Eigen::Index n_x, Eigen::Index n_u, double t0,
                                                 double tf) {
  TimeGrid grid({t0, tf});
  std::vector<Eigen::VectorXd> u_ff(2, Eigen::VectorXd::Zero(n_u));
  std::vector<Eigen::MatrixXd> K(2, Eigen::MatrixXd::Zero(n_u, n_x));
  return TimeVaryingController(std::move(grid), std::move(u_ff), std::move(K));
}

TimeVaryingController::Gains TimeVaryingController::interpolate(double t) const {
  const auto b = grid_.bracket(t);
  const double a = 1.0 - b.lambda;
  return {a * u_ff_[b.index] + b.lambda * u_ff_[b.index + 1],
          a * K_[b.index] + b.lambda * K_[b.index + 1]};
}

Eigen::VectorXd TimeVaryingController::evaluate(const Eigen::VectorXd& x, double t) const {
  if (x.size() != state_dim()) {
    throw std::invalid_argument("TimeVaryingController::evaluate: state dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(state_dim()));
  }
  const auto g = interpolate(t);
  return g.u_ff + g.K * x;
}

}  // namespace cslq
