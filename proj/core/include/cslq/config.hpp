#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cslq/cost.hpp"
#include "cslq/slq.hpp"
#include "cslq/system_model.hpp"

namespace cslq {

/// Raised for malformed or inconsistent configuration input. The message
/// carries the origin (file or stream name), line number where applicable,
/// and the offending section/key.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// End-effector reference path selection for the manipulator model.
struct EePathConfig {
  std::string type = "fixed";  // fixed | line | circle | figure_eight
  std::vector<double> point{0.0, 0.0};              // fixed
  std::vector<double> from{0.0, 0.0};               // line
  std::vector<double> to{0.0, 0.0};                 // line
  double t_start = 0.0;                             // line
  double t_end = 1.0;                               // line
  std::vector<double> center{0.0, 0.0};             // circle, figure_eight
  double radius = 1.0;                              // circle
  double rate = 1.0;                                // circle, figure_eight
  double phase = 0.0;                               // circle
  double amplitude = 1.0;                           // figure_eight

  bool operator==(const EePathConfig&) const = default;
};

/// Receding-horizon runtime and disturbance parameters; present only when the
/// config carries an [mpc] section.
struct MpcConfig {
  bool enabled = false;
  double horizon = 15.0;          // s, fixed moving horizon
  double inner_rate = 250.0;      // Hz, feedback loop
  double outer_rate = 20.0;       // Hz, replanning target
  double estimator_rate = 20.0;   // Hz, zero-order-hold state updates
  bool warm_start = true;
  std::size_t warm_iteration_cap = 3;
  bool replanning = true;         // disable for the feedforward-only baseline
  double goal_tolerance = 0.02;   // m
  double timeout = 60.0;          // simulated seconds
  double slip_right = 1.0;        // multiplicative track slip factors
  double slip_left = 1.0;
  double jump_magnitude = 0.0;    // m, estimate jump injection
  double jump_rate = 0.0;         // Hz, expected jumps per simulated second
  double ee_displacement_bound = 0.10;  // m, pass bound on |ee - reference|
  double track_speed_limit = 2.0;       // m/s, plant actuator saturation
  unsigned seed = 0;

  bool operator==(const MpcConfig&) const = default;
};

/// Complete description of a bundled task. Parses from / serializes to a flat
/// sectioned key = value format; parse(serialize(c)) == c for any valid c.
struct TaskConfig {
  std::string name;
  std::string model;   // tracked_base | planar_manipulator | wheeled_legged
  double horizon = 5.0;

  // Model parameters (only those relevant to `model` are serialized).
  double cor_offset = 0.0;
  double half_track = 0.3;
  int arm_joints = 0;
  bool nonholonomic = true;
  double arm_mount_offset = 0.3;
  std::vector<double> link_lengths{1.0, 0.8, 0.5};
  std::string ee_mode = "none";  // none | position | velocity | hold
  double ee_hold_gain = 2.0;     // 1/s, hold-mode error decay rate
  EePathConfig ee_path;
  double wheel_drop = 0.15;
  double wheel_radius = 0.1;

  std::vector<double> initial_state;
  std::vector<double> x_ref;
  std::vector<double> r_diag;
  std::vector<double> q_diag;
  std::vector<double> qf_diag;

  SolverSettings solver;
  MpcConfig mpc;

  static TaskConfig load(const std::string& path);
  static TaskConfig parse(std::istream& is, const std::string& origin = "<stream>");
  void serialize(std::ostream& os) const;

  bool operator==(const TaskConfig&) const = default;
};

/// Model, cost and initial state instantiated from a config.
struct TaskObjects {
  std::shared_ptr<SystemModel> model;
  std::shared_ptr<CostFunction> cost;
  Eigen::VectorXd x0;
};

/// Builds the solveable objects, validating dimensional consistency. Throws
/// ConfigError naming the offending field.
TaskObjects build_task(const TaskConfig& config);

}  // namespace cslq
