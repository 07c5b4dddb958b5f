#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cslq/integrator.hpp"

using namespace cslq;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd scalar(double v) {
  VectorXd x(1);
  x << v;
  return x;
}

}  // namespace

TEST_CASE("settings validation") {
  IntegratorSettings s;
  CHECK_NOTHROW(s.validate());
  s.abs_tol = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.min_step = 2.0;  // larger than max_step
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("exponential decay matches the closed form") {
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-10;
  const auto res = integrate_adaptive(
      [](double, const VectorXd& y) { return VectorXd(-y); }, scalar(1.0), 0.0, 2.0, s);
  CHECK(res.times.front() == 0.0);
  CHECK(res.times.back() == doctest::Approx(2.0));
  CHECK(res.values.back()(0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("harmonic oscillator conserves energy to the requested tolerance") {
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-9;
  Eigen::Vector2d y0(1.0, 0.0);
  const auto res = integrate_adaptive(
      [](double, const VectorXd& y) { return VectorXd(Eigen::Vector2d(y(1), -y(0))); },
      y0, 0.0, 20.0, s);
  const VectorXd yf = res.values.back();
  CHECK(yf(0) == doctest::Approx(std::cos(20.0)).epsilon(1e-6));
  CHECK(yf(1) == doctest::Approx(-std::sin(20.0)).epsilon(1e-6));
  CHECK(yf.squaredNorm() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("backward integration reverses a forward pass") {
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-10;
  const OdeRhs rhs = [](double t, const VectorXd& y) {
    return VectorXd(scalar(std::sin(t) * y(0)));
  };
  const auto fwd = integrate_adaptive(rhs, scalar(1.0), 0.0, 3.0, s);
  const auto bwd = integrate_adaptive(rhs, fwd.values.back(), 3.0, 0.0, s);
  CHECK(bwd.times.front() == 3.0);
  CHECK(bwd.times.back() == doctest::Approx(0.0));
  // Times strictly decreasing.
  for (std::size_t i = 1; i < bwd.times.size(); ++i) CHECK(bwd.times[i] < bwd.times[i - 1]);
  CHECK(bwd.values.back()(0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("adaptive steps concentrate where the solution moves fast") {
  // Stiff-ish ramp: y' = 50 (cos(5 t^2) - y). The early transient plus the
  // oscillatory forcing needs many more steps than the same rhs frozen.
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-8;
  const auto hard = integrate_adaptive(
      [](double t, const VectorXd& y) {
        return VectorXd(scalar(50.0 * (std::cos(5.0 * t * t) - y(0))));
      },
      scalar(0.0), 0.0, 2.0, s);
  const auto easy = integrate_adaptive(
      [](double, const VectorXd& y) { return VectorXd(-y); }, scalar(1.0), 0.0, 2.0, s);
  CHECK(hard.times.size() > 3 * easy.times.size());
}

TEST_CASE("step budget overflow reports the time reached") {
  IntegratorSettings s;
  s.max_steps = 5;
  try {
    integrate_adaptive([](double, const VectorXd& y) { return VectorXd(-y); }, scalar(1.0), 0.0,
                       1e6, s);
    FAIL("expected std::runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("t =") != std::string::npos);
  }
}

TEST_CASE("post_step hook is applied to every accepted state") {
  IntegratorSettings s;
  int calls = 0;
  const auto res = integrate_adaptive(
      [](double, const VectorXd& y) { return VectorXd(-y); }, scalar(1.0), 0.0, 1.0, s,
      [&](VectorXd& y) {
        ++calls;
        y(0) = std::min(y(0), 0.9);
      });
  CHECK(calls == static_cast<int>(res.times.size()) - 1);
  for (std::size_t i = 1; i < res.values.size(); ++i) CHECK(res.values[i](0) <= 0.9);
}

TEST_CASE("rollout of a double integrator under constant force") {
  // x = (p, v), u = a = 1: p(t) = t^2/2, v(t) = t.
  struct DoubleIntegrator : SystemModel {
    Eigen::Index state_dim() const override { return 2; }
    Eigen::Index input_dim() const override { return 1; }
    VectorXd flow(const VectorXd& x, const VectorXd& u, double) const override {
      return Eigen::Vector2d(x(1), u(0));
    }
  } model;
  TimeVaryingController ctrl(TimeGrid({0.0, 2.0}), {scalar(1.0), scalar(1.0)},
                             {MatrixXd::Zero(1, 2), MatrixXd::Zero(1, 2)});
  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-10;
  const Trajectory traj = rollout(model, ctrl, Eigen::Vector2d::Zero(), 0.0, 2.0, s);
  CHECK(traj.states.back()(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(traj.states.back()(1) == doctest::Approx(2.0).epsilon(1e-8));
  // Inputs recorded at the nodes are the applied controls.
  for (const auto& u : traj.inputs) CHECK(u(0) == doctest::Approx(1.0));
}

TEST_CASE("rollout rejects divergence with the configured bound") {
  struct Unstable : SystemModel {
    Eigen::Index state_dim() const override { return 1; }
    Eigen::Index input_dim() const override { return 1; }
    VectorXd flow(const VectorXd& x, const VectorXd&, double) const override {
      return VectorXd(10.0 * x);
    }
  } model;
  const auto ctrl = TimeVaryingController::zero(1, 1, 0.0, 5.0);
  IntegratorSettings s;
  CHECK_THROWS_AS(rollout(model, ctrl, scalar(1.0), 0.0, 5.0, s, 100.0), std::runtime_error);
}

TEST_CASE("closed-loop rollout tracks the stabilized equilibrium") {
  // x' = u with u = 1 - x converges to 1.
  struct Integrator1D : SystemModel {
    Eigen::Index state_dim() const override { return 1; }
    Eigen::Index input_dim() const override { return 1; }
    VectorXd flow(const VectorXd&, const VectorXd& u, double) const override { return u; }
  } model;
  TimeGrid grid({0.0, 10.0});
  TimeVaryingController ctrl(grid, {scalar(1.0), scalar(1.0)},
                             {MatrixXd::Constant(1, 1, -1.0), MatrixXd::Constant(1, 1, -1.0)});
  IntegratorSettings s;
  const Trajectory traj = rollout(model, ctrl, scalar(0.0), 0.0, 10.0, s);
  CHECK(traj.states.back()(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(traj.inputs.back()(0) == doctest::Approx(0.0).epsilon(1e-3));
}
