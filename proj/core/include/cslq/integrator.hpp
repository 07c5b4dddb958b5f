#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "cslq/controller.hpp"
#include "cslq/system_model.hpp"
#include "cslq/trajectory.hpp"

namespace cslq {

struct IntegratorSettings {
  double abs_tol = 1e-6;
  double rel_tol = 1e-6;
  double max_step = 1.0;
  double min_step = 1e-10;
  std::size_t max_steps = 100000;

  void validate() const;
  bool operator==(const IntegratorSettings&) const = default;
};

struct IntegrationResult {
  // Accepted-step times including both endpoints. Strictly monotone in the
  // integration direction (decreasing when t0 > tf).
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
};

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
using PostStepHook = std::function<void(Eigen::VectorXd&)>;

/// Dormand-Prince 4(5) embedded pair with an element-wise scaled error norm.
/// Backward integration (t0 > tf) runs with negative steps directly.
/// `post_step` runs on every accepted state (used to re-symmetrize the
/// Riccati matrix between steps).
IntegrationResult integrate_adaptive(const OdeRhs& rhs, const Eigen::VectorXd& y0, double t0,
                                     double tf, const IntegratorSettings& settings,
                                     const PostStepHook& post_step = nullptr);

/// Closed-loop forward rollout of dx/dt = f(x, u_ff(t) + K(t) x, t), recording
/// state and applied input at every accepted node.
/// `state_bound` guards against divergence (max-norm of the state).
Trajectory rollout(const SystemModel& model, const TimeVaryingController& ctrl,
                   const Eigen::VectorXd& x0, double t0, double tf,
                   const IntegratorSettings& settings, double state_bound = 1e6);

}  // namespace cslq
