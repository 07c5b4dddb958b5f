#include "cslq/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cslq {

namespace {

// Dormand-Prince 4(5) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 4th-order embedded weights (k7 = f at the 5th-order solution).
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

void IntegratorSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("IntegratorSettings: tolerances must be positive");
  }
  if (!(min_step > 0.0) || !(min_step <= max_step)) {
    throw std::invalid_argument("IntegratorSettings: need 0 < min_step <= max_step");
  }
}

IntegrationResult integrate_adaptive(const OdeRhs& rhs, const Eigen::VectorXd& y0, double t0,
                                     double tf, const IntegratorSettings& settings,
                                     const PostStepHook& post_step) {
  settings.validate();
  if (t0 == tf) {
    throw std::invalid_argument("integrate_adaptive: t0 == tf");
  }
  const double dir = (tf > t0) ? 1.0 : -1.0;
  const double span = std::abs(tf - t0);

  IntegrationResult out;
  out.times.push_back(t0);
  out.values.push_back(y0);

  double t = t0;
  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1 = rhs(t, y);  // FSAL
  double h = dir * std::min(settings.max_step, span / 10.0);

  std::size_t steps = 0;
  while (dir * (tf - t) > 0.0) {
    if (++steps > settings.max_steps) {
      throw std::runtime_error("integrate_adaptive: max_steps (" +
                               std::to_string(settings.max_steps) + ") exceeded at t = " +
                               std::to_string(t));
    }
    if (dir * (t + h) > dir * tf) h = tf - t;

    const Eigen::VectorXd k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    const Eigen::VectorXd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 =
        rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = rhs(t + h, y5);
    const Eigen::VectorXd y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    // Element-wise scaled max norm, robust against mixed units.
    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          settings.abs_tol + settings.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      err = std::max(err, std::abs(y5(i) - y4(i)) / scale);
    }
    if (!std::isfinite(err)) err = 2.0;

    if (err <= 1.0) {
      t += h;
      y = y5;
      if (post_step) post_step(y);
      k1 = (post_step) ? rhs(t, y) : k7;  // FSAL invalid if the hook modified y
      out.times.push_back(t);
      out.values.push_back(y);
    }

    double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    factor = std::clamp(factor, 0.2, 5.0);
    h *= factor;
    if (std::abs(h) > settings.max_step) h = dir * settings.max_step;
    if (std::abs(h) < settings.min_step) {
      if (err > 1.0) {
        throw std::runtime_error("integrate_adaptive: step underflow at t = " + std::to_string(t));
      }
      h = dir * settings.min_step;
    }
  }
  return out;
}

Trajectory rollout(const SystemModel& model, const TimeVaryingController& ctrl,
                   const Eigen::VectorXd& x0, double t0, double tf,
                   const IntegratorSettings& settings, double state_bound) {
  if (x0.size() != model.state_dim() || ctrl.state_dim() != model.state_dim() ||
      ctrl.input_dim() != model.input_dim()) {
    throw std::invalid_argument("rollout: dimension mismatch between model, controller and x0");
  }
  const OdeRhs rhs = [&](double t, const Eigen::VectorXd& x) {
    if (x.cwiseAbs().maxCoeff() > state_bound) {
      throw std::runtime_error("rollout: state max-norm exceeded divergence bound " +
                               std::to_string(state_bound) + " at t = " + std::to_string(t));
    }
    return model.flow(x, ctrl.evaluate(x, t), t);
  };
  IntegrationResult r = integrate_adaptive(rhs, x0, t0, tf, settings);
  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(r.times.size());
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    inputs.push_back(ctrl.evaluate(r.values[k], r.times[k]));
  }
  return Trajectory(TimeGrid(std::move(r.times)), std::move(r.values), std::move(inputs));
}

}  // namespace cslq
