#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "cslq/derivatives.hpp"
#include "cslq/models/planar_manipulator.hpp"
#include "cslq/models/reference_path.hpp"
#include "cslq/models/tracked_base.hpp"
#include "cslq/models/wheeled_legged.hpp"

using namespace cslq;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

std::vector<std::tuple<VectorXd, VectorXd, double>> random_samples(int n, Eigen::Index nx,
                                                                   Eigen::Index nu, unsigned seed,
                                                                   double range = 1.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-range, range);
  std::vector<std::tuple<VectorXd, VectorXd, double>> samples;
  for (int i = 0; i < n; ++i) {
    samples.emplace_back(VectorXd::NullaryExpr(nx, [&](Eigen::Index) { return dist(rng); }),
                         VectorXd::NullaryExpr(nu, [&](Eigen::Index) { return dist(rng); }),
                         dist(rng));
  }
  return samples;
}

}  // namespace

// ---------------------------------------------------------------- tracked base

TEST_CASE("tracked base rolling constraint at hand-checked poses") {
  TrackedBaseModel straight({});
  // Heading 0, pure lateral velocity: violation equals the lateral speed.
  CHECK(straight.g1(Vector3d(0, 0, 0), Vector3d(0, 1, 0), 0.0)(0) == doctest::Approx(1.0));
  // Heading pi/2, pure x velocity: -sin(pi/2) * 1 = -1.
  CHECK(straight.g1(Vector3d(0, 0, M_PI / 2), Vector3d(1, 0, 0), 0.0)(0) == doctest::Approx(-1.0));
  // Driving along the heading is always feasible.
  CHECK(straight.g1(Vector3d(0, 0, 0.7), Vector3d(std::cos(0.7), std::sin(0.7), 0.0), 0.0)(0) ==
        doctest::Approx(0.0));

  TrackedBaseModel offset({.cor_offset = 0.3});
  // Turning in place with an offset center of rotation: violation -d thetad.
  CHECK(offset.g1(Vector3d::Zero(), Vector3d(0, 0, 1), 0.0)(0) == doctest::Approx(-0.3));
}

TEST_CASE("tracked base flow is the identity on the inputs") {
  TrackedBaseModel model({.cor_offset = 0.1, .half_track = 0.25, .arm_joints = 2});
  CHECK(model.state_dim() == 5);
  const VectorXd u = (VectorXd(5) << 1, 2, 3, 4, 5).finished();
  CHECK((model.flow(VectorXd::Zero(5), u, 0.0) - u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("track speed conversion") {
  const double b = 0.3;
  SUBCASE("straight drive at heading 0") {
    auto [vr, vl] = track_speeds(Vector3d(0, 0, 0), Vector3d(1, 0, 0), b);
    CHECK(vr == doctest::Approx(1.0));
    CHECK(vl == doctest::Approx(1.0));
  }
  SUBCASE("forward plus turn splits across the tracks") {
    auto [vr, vl] = track_speeds(Vector3d(0, 0, 0), Vector3d(1, 0, 2), b);
    CHECK(vr == doctest::Approx(1.6));
    CHECK(vl == doctest::Approx(0.4));
  }
  SUBCASE("heading pi/2 uses the rotated forward direction") {
    auto [vr, vl] = track_speeds(Vector3d(0, 0, M_PI / 2), Vector3d(0, 1, 0), b);
    CHECK(vr == doctest::Approx(1.0));
    CHECK(vl == doctest::Approx(1.0));
  }
  SUBCASE("turn in place is antisymmetric") {
    auto [vr, vl] = track_speeds(Vector3d::Zero(), Vector3d(0, 0, 1.0), b);
    CHECK(vr == doctest::Approx(0.3));
    CHECK(vl == doctest::Approx(-0.3));
  }
}

TEST_CASE("tracked base analytic derivatives pass the finite-difference audit") {
  TrackedBaseModel model({.cor_offset = 0.2, .half_track = 0.3, .arm_joints = 1});
  CHECK(verify_derivatives(model, random_samples(100, 4, 4, 21), 1e-6).passed);
}

// --------------------------------------------------------- planar manipulator

TEST_CASE("end-effector forward kinematics") {
  PlanarManipulatorModel model({});
  SUBCASE("stretched arm at the origin") {
    // mount 0.3 + links 1.0 + 0.8 + 0.5 along x.
    const Vector2d p = model.ee_position(VectorXd::Zero(6));
    CHECK(p.x() == doctest::Approx(2.6));
    CHECK(p.y() == doctest::Approx(0.0));
  }
  SUBCASE("base pose rotates and translates the whole chain") {
    VectorXd x = VectorXd::Zero(6);
    x << 1.0, 2.0, M_PI / 2, 0.0, 0.0, 0.0;
    const Vector2d p = model.ee_position(x);
    CHECK(p.x() == doctest::Approx(1.0));
    CHECK(p.y() == doctest::Approx(4.6));
  }
  SUBCASE("first joint folds the arm upward") {
    VectorXd x = VectorXd::Zero(6);
    x(3) = M_PI / 2;
    const Vector2d p = model.ee_position(x);
    CHECK(p.x() == doctest::Approx(0.3));
    CHECK(p.y() == doctest::Approx(2.3));
  }
  // Mount offset plus the full arm span.
  CHECK(model.max_reach() == doctest::Approx(2.6));
}

TEST_CASE("end-effector Jacobian matches finite differences of the kinematics") {
  PlanarManipulatorModel model({.cor_offset = 0.1});
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-1.2, 1.2);
  for (int i = 0; i < 30; ++i) {
    const VectorXd x = VectorXd::NullaryExpr(6, [&](Eigen::Index) { return dist(rng); });
    const MatrixXd fd = finite_difference_jacobian(
        [&](const VectorXd& q) { return VectorXd(model.ee_position(q)); }, x);
    CHECK((model.ee_jacobian(x) - fd).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("arm singularity metric vanishes exactly at full extension") {
  PlanarManipulatorModel model({});
  VectorXd stretched = VectorXd::Zero(6);
  CHECK(model.arm_singular_value(stretched) < 1e-12);
  VectorXd bent = VectorXd::Zero(6);
  bent(4) = M_PI / 2;  // elbow at 90 degrees
  CHECK(model.arm_singular_value(bent) > 0.1);
}

TEST_CASE("velocity-mode constraint rows are the operational-space tracking error") {
  auto path = std::make_shared<FixedPoint>(Vector2d(1.5, 0.5));
  PlanarManipulatorModel model(
      {.ee_mode = EeConstraintMode::velocity, .ee_reference = path});
  REQUIRE(model.g1_dim() == 3);
  const VectorXd x = VectorXd::Zero(6);
  SUBCASE("at rest against a fixed reference the rows vanish") {
    CHECK(model.g1(x, VectorXd::Zero(6), 0.0).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("pure base translation shows up one-to-one in the end effector") {
    VectorXd u = VectorXd::Zero(6);
    u(0) = 1.0;
    const VectorXd g = model.g1(x, u, 0.0);
    CHECK(g(0) == doctest::Approx(0.0));  // driving forward is feasible for the base
    CHECK(g(1) == doctest::Approx(1.0));  // but drags the held end effector along x
    CHECK(g(2) == doctest::Approx(0.0));
  }
  SUBCASE("moving reference enters with a negative sign") {
    auto moving = std::make_shared<CirclePath>(Vector2d::Zero(), 1.0, 2.0);
    PlanarManipulatorModel m2(
        {.ee_mode = EeConstraintMode::velocity, .ee_reference = moving});
    const VectorXd g = m2.g1(x, VectorXd::Zero(6), 0.0);
    const Vector2d v = moving->velocity(0.0);
    CHECK(g(1) == doctest::Approx(-v.x()));
    CHECK(g(2) == doctest::Approx(-v.y()));
  }
}

TEST_CASE("position-mode constraint is the end-effector placement error") {
  auto path = std::make_shared<FixedPoint>(Vector2d(2.0, 0.5));
  PlanarManipulatorModel model(
      {.ee_mode = EeConstraintMode::position, .ee_reference = path});
  REQUIRE(model.g2_dim() == 2);
  const VectorXd x = VectorXd::Zero(6);
  const VectorXd g = model.g2(x, 0.0);
  CHECK(g(0) == doctest::Approx(2.6 - 2.0));
  CHECK(g(1) == doctest::Approx(-0.5));
}

TEST_CASE("hold-mode constraint restores accumulated placement error") {
  auto path = std::make_shared<FixedPoint>(Vector2d(2.0, 0.5));
  PlanarManipulatorModel model(
      {.ee_mode = EeConstraintMode::hold, .hold_gain = 4.0, .ee_reference = path});
  REQUIRE(model.g1_dim() == 3);
  // Hold mode carries the placement error inside the hard velocity rows, so
  // no soft position rows remain.
  REQUIRE(model.g2_dim() == 0);
  const VectorXd x = VectorXd::Zero(6);  // ee at (2.6, 0), off the hold point
  SUBCASE("at zero input the rows equal gain times the placement error") {
    const VectorXd g = model.g1(x, VectorXd::Zero(6), 0.0);
    CHECK(g(1) == doctest::Approx(4.0 * (2.6 - 2.0)));
    CHECK(g(2) == doctest::Approx(4.0 * (0.0 - 0.5)));
  }
  SUBCASE("satisfying the rows means the error decays at the hold gain rate") {
    // Choose the base-translation input that zeroes the rows: ee velocity
    // must equal -gain * error, so the error contracts exponentially.
    VectorXd u = VectorXd::Zero(6);
    u(0) = -4.0 * (2.6 - 2.0);
    u(1) = -4.0 * (0.0 - 0.5);
    const VectorXd g = model.g1(x, u, 0.0);
    CHECK(g(1) == doctest::Approx(0.0));
    CHECK(g(2) == doctest::Approx(0.0));
  }
}

TEST_CASE("manipulator analytic derivatives pass the finite-difference audit") {
  auto path = std::make_shared<CirclePath>(Vector2d(0.5, 0.0), 1.0, 0.7);
  SUBCASE("velocity mode") {
    PlanarManipulatorModel model({.cor_offset = 0.15, .ee_mode = EeConstraintMode::velocity,
                                  .ee_reference = path});
    CHECK(verify_derivatives(model, random_samples(100, 6, 6, 33, 1.2), 1e-6).passed);
  }
  SUBCASE("position mode") {
    PlanarManipulatorModel model({.cor_offset = 0.15, .ee_mode = EeConstraintMode::position,
                                  .ee_reference = path});
    CHECK(verify_derivatives(model, random_samples(100, 6, 6, 34, 1.2), 1e-6).passed);
  }
  SUBCASE("hold mode") {
    PlanarManipulatorModel model({.cor_offset = 0.15,
                                  .ee_mode = EeConstraintMode::hold,
                                  .hold_gain = 3.0,
                                  .ee_reference = path});
    CHECK(verify_derivatives(model, random_samples(100, 6, 6, 35, 1.2), 1e-6).passed);
  }
}

TEST_CASE("constraint modes need a reference path") {
  CHECK_THROWS_AS(PlanarManipulatorModel({.ee_mode = EeConstraintMode::velocity}),
                  std::invalid_argument);
}

// -------------------------------------------------------------- wheeled-legged

TEST_CASE("wheeled-legged nominal state stands on its contact points") {
  WheeledLeggedModel model;
  const VectorXd x = model.nominal_state(1.0, -2.0, 0.3);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(-2.0));
  // Trunk height = wheel drop + wheel radius above flat ground.
  CHECK(x(2) == doctest::Approx(0.25));
  CHECK(x(3) == doctest::Approx(0.3));
  // At rest every contact point is stationary.
  for (int leg = 0; leg < 4; ++leg) {
    CHECK(model.wheel_contact_velocity(x, VectorXd::Zero(14), leg).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("constraint stack equals the stacked contact-point velocities") {
  WheeledLeggedModel model;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  for (int i = 0; i < 10; ++i) {
    const VectorXd x = VectorXd::NullaryExpr(14, [&](Eigen::Index) { return dist(rng); });
    const VectorXd u = VectorXd::NullaryExpr(14, [&](Eigen::Index) { return dist(rng); });
    const VectorXd g = model.g1(x, u, 0.0);
    REQUIRE(g.size() == 12);
    for (int leg = 0; leg < 4; ++leg) {
      const Vector3d v = model.wheel_contact_velocity(x, u, leg);
      CHECK((g.segment<3>(3 * leg) - v).cwiseAbs().maxCoeff() < 1e-12);
    }
    // Linear homogeneous in the input.
    CHECK((model.g1(x, 2.0 * u, 0.0) - 2.0 * g).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sliding forward without spinning the wheels violates rolling") {
  WheeledLeggedModel model;
  const VectorXd x = model.nominal_state(0.0, 0.0, 0.0);
  VectorXd u = VectorXd::Zero(14);
  u(3) = 1.0;  // body-frame forward velocity
  for (int leg = 0; leg < 4; ++leg) {
    const Vector3d v = model.wheel_contact_velocity(x, u, leg);
    CHECK(v.x() == doctest::Approx(1.0));
    CHECK(v.y() == doctest::Approx(0.0));
    CHECK(v.z() == doctest::Approx(0.0));
  }
}

TEST_CASE("vertical trunk velocity lifts every contact point") {
  WheeledLeggedModel model;
  const VectorXd x = model.nominal_state(0.0, 0.0, 0.0);
  VectorXd u = VectorXd::Zero(14);
  u(5) = 0.5;  // body-frame z velocity
  for (int leg = 0; leg < 4; ++leg) {
    CHECK(model.wheel_contact_velocity(x, u, leg).z() == doctest::Approx(0.5));
  }
}

TEST_CASE("rolling forward is feasible with wheel rate v / r") {
  WheeledLeggedModel model;
  const VectorXd x = model.nominal_state(0.0, 0.0, 0.0);
  const double v = 0.7, r = model.params().wheel_radius;
  // One spin sign cancels the forward slide on every wheel.
  double best = 1e9;
  for (double sign : {1.0, -1.0}) {
    VectorXd u = VectorXd::Zero(14);
    u(3) = v;
    for (int leg = 0; leg < 4; ++leg) u(7 + 2 * leg) = sign * v / r;
    double worst = 0.0;
    for (int leg = 0; leg < 4; ++leg) {
      worst = std::max(worst, model.wheel_contact_velocity(x, u, leg).norm());
    }
    best = std::min(best, worst);
  }
  CHECK(best < 1e-12);
}

TEST_CASE("steer rate never moves the contact point") {
  // The wheel center sits on the steering axis, so steering is constraint-free.
  WheeledLeggedModel model;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  const VectorXd x = VectorXd::NullaryExpr(14, [&](Eigen::Index) { return dist(rng); });
  VectorXd u = VectorXd::Zero(14);
  for (int leg = 0; leg < 4; ++leg) u(6 + 2 * leg) = dist(rng);
  CHECK(model.g1(x, u, 0.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pitch close to the Euler singularity is rejected with a diagnostic") {
  WheeledLeggedModel model;
  VectorXd x = model.nominal_state(0.0, 0.0, 0.0);
  x(4) = M_PI / 2 - 1e-4;
  CHECK_THROWS_AS(model.flow(x, VectorXd::Zero(14), 0.0), std::runtime_error);
}

TEST_CASE("wheeled-legged analytic derivatives pass the finite-difference audit") {
  WheeledLeggedModel model;
  // Pitch is kept clear of the Euler singularity at pi/2.
  CHECK(verify_derivatives(model, random_samples(100, 14, 14, 55, 1.0), 1e-6).passed);
}

// ------------------------------------------------------------ reference paths

TEST_CASE("line segment path: smooth start-stop timing") {
  LineSegmentPath path(Vector2d(0.0, 0.0), Vector2d(2.0, -1.0), 1.0, 3.0);
  CHECK((path.position(1.0) - Vector2d(0.0, 0.0)).norm() == doctest::Approx(0.0));
  CHECK((path.position(3.0) - Vector2d(2.0, -1.0)).norm() == doctest::Approx(0.0));
  CHECK((path.position(2.0) - Vector2d(1.0, -0.5)).norm() == doctest::Approx(0.0));
  CHECK(path.velocity(1.0).norm() == doctest::Approx(0.0));
  CHECK(path.velocity(3.0).norm() == doctest::Approx(0.0));
  // Peak speed of smoothstep timing: 1.5 * length / duration.
  CHECK(path.velocity(2.0).norm() == doctest::Approx(1.5 * std::sqrt(5.0) / 2.0));
  // Clamped outside the active window.
  CHECK((path.position(0.0) - Vector2d(0.0, 0.0)).norm() == doctest::Approx(0.0));
  CHECK((path.position(10.0) - Vector2d(2.0, -1.0)).norm() == doctest::Approx(0.0));
  CHECK(path.velocity(0.5).norm() == doctest::Approx(0.0));
}

TEST_CASE("path velocities are the derivatives of the positions") {
  const auto check_consistency = [](const ReferencePath& p) {
    for (double t = 0.1; t < 4.0; t += 0.37) {
      const Vector2d fd = (p.position(t + 5e-7) - p.position(t - 5e-7)) / 1e-6;
      CHECK((p.velocity(t) - fd).norm() < 1e-6);
    }
  };
  check_consistency(CirclePath(Vector2d(1.0, 2.0), 0.8, 1.3, 0.4));
  check_consistency(FigureEightPath(Vector2d(-0.5, 0.0), 1.2, 0.9));
  check_consistency(LineSegmentPath(Vector2d(0, 0), Vector2d(1, 1), 0.5, 3.5));
}

TEST_CASE("circle path geometry") {
  CirclePath path(Vector2d(0.0, 0.0), 2.0, 1.0);
  for (double t = 0.0; t < 6.0; t += 0.5) {
    CHECK(path.position(t).norm() == doctest::Approx(2.0));
    // Velocity tangential: orthogonal to the radius, speed = r * omega.
    CHECK(std::abs(path.position(t).dot(path.velocity(t))) < 1e-12);
    CHECK(path.velocity(t).norm() == doctest::Approx(2.0));
  }
}
