#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "cslq/config.hpp"
#include "cslq/controller.hpp"
#include "cslq/slq.hpp"
#include "cslq/system_model.hpp"

namespace cslq {

/// Receding-horizon runtime parameters. The outer loop re-solves over a fixed
/// moving horizon with warm starts and loosened integrator tolerances; the
/// inner loop applies the interpolated controller at a higher rate.
struct MpcSettings {
  double horizon = 15.0;         // s
  double inner_rate = 250.0;     // Hz
  double outer_rate = 20.0;      // Hz
  double estimator_rate = 20.0;  // Hz
  bool warm_start = true;
  bool replanning = true;        // false: keep the initial plan (baseline mode)
  double goal_tolerance = 0.02;  // m, planar base position error
  double timeout = 60.0;         // simulated s
  SolverSettings cold_solver;    // first plan, tight tolerances
  SolverSettings warm_solver;    // replans, loosened tolerances + iteration cap

  /// Settings derived from a task config: cold at 1e-6, warm at 1e-4 with the
  /// configured iteration cap.
  static MpcSettings from_config(const TaskConfig& config);
  void validate() const;
};

/// Simulated tracked-base plant with per-track multiplicative slip and a
/// zero-order-hold estimator with seeded jump injection. Supports the
/// tracked-base model family (base plus optional arm joints); commanded base
/// velocities are converted to track speeds before slip is applied, so the
/// disturbance acts in the actuation space like on the real robot.
class PlantSimulation {
public:
  struct Disturbance {
    double slip_right = 1.0;
    double slip_left = 1.0;
    double jump_magnitude = 0.0;  // m, planar estimate jump
    double jump_rate = 0.0;       // Hz, expected jumps per simulated second
    double track_speed_limit = 2.0;  // m/s, actuator saturation per track
    unsigned seed = 0;
  };

  PlantSimulation(Eigen::VectorXd initial_state, double half_track, double cor_offset,
                  double estimator_rate, Disturbance disturbance);

  /// Advances the true state by dt under the model-space input u (RK4 on the
  /// slipping two-wheel kinematics; arm joints integrate their rates exactly).
  void advance(const Eigen::VectorXd& u, double dt);

  /// Zero-order-hold state estimate, refreshed at the estimator rate from the
  /// true state; an injected jump corrupts single samples of the planar base
  /// position.
  const Eigen::VectorXd& estimate(double t);

  const Eigen::VectorXd& true_state() const { return x_; }

private:
  Eigen::VectorXd x_;
  Eigen::VectorXd estimate_;
  double half_track_, cor_offset_, estimator_period_;
  double next_sample_time_ = 0.0;
  Disturbance dist_;
  std::mt19937_64 rng_;
};

/// Single-writer / single-reader exchange of immutable controller snapshots.
/// The inner loop always observes either the previous or the new plan, never
/// a partial update.
class ControllerSlot {
public:
  void store(std::shared_ptr<const TimeVaryingController> c);
  std::shared_ptr<const TimeVaryingController> load() const;

private:
  mutable std::mutex mutex_;
  std::shared_ptr<const TimeVaryingController> controller_;
};

/// One outer-loop replan over [t_now, t_now + horizon]. Warm starts from the
/// previous controller (clamped past its horizon); on solve failure the
/// previous controller is retained and the report flags the failure.
struct MpcStepResult {
  std::shared_ptr<const TimeVaryingController> controller;
  SolveReport report;
  bool replaced = false;  // false when the previous plan was retained
};

MpcStepResult mpc_step(const SystemModel& model, const CostFunction& cost,
                       const Eigen::VectorXd& estimate, double t_now,
                       const std::shared_ptr<const TimeVaryingController>& previous,
                       const MpcSettings& settings);

/// Inner-loop control law: interpolates the snapshot at (estimate, t). For
/// tracked bases the applied base velocities go through the track-speed
/// conversion inside the plant, keeping the nonholonomic identity intact.
Eigen::VectorXd inner_loop_tick(const TimeVaryingController& snapshot,
                                const Eigen::VectorXd& estimate, double t);

struct TickRecord {
  double t;
  Eigen::VectorXd true_state;
  Eigen::VectorXd estimate;
  Eigen::VectorXd input;
};

struct ReplanRecord {
  double t;
  std::size_t iterations;
  double cost;
  double constraint_ise;
  double solve_time;  // wall seconds; 0 in the deterministic episode driver
};

struct EpisodeResult {
  bool reached_goal = false;
  double terminal_error = 0.0;        // planar base position error at episode end
  double max_ee_displacement = 0.0;   // manipulator tasks: max |ee - reference|
  std::vector<TickRecord> ticks;
  std::vector<ReplanRecord> replans;

  void write_ticks_csv(std::ostream& os) const;
  void write_replans_csv(std::ostream& os) const;
};

/// Deterministic virtual-clock episode: plant, estimator, inner and outer
/// loops interleaved at their configured rates until the goal tolerance holds
/// or the timeout elapses. Identical configs and seeds produce identical logs.
EpisodeResult run_episode(const TaskConfig& config);

}  // namespace cslq
