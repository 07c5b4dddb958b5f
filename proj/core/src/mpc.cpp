#include "cslq/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cslq/models/planar_manipulator.hpp"
#include "cslq/models/tracked_base.hpp"

namespace cslq {

MpcSettings MpcSettings::from_config(const TaskConfig& config) {
  MpcSettings s;
  s.horizon = config.mpc.horizon;
  s.inner_rate = config.mpc.inner_rate;
  s.outer_rate = config.mpc.outer_rate;
  s.estimator_rate = config.mpc.estimator_rate;
  s.warm_start = config.mpc.warm_start;
  s.replanning = config.mpc.replanning;
  s.goal_tolerance = config.mpc.goal_tolerance;
  s.timeout = config.mpc.timeout;

  s.cold_solver = config.solver;
  s.cold_solver.forward.abs_tol = s.cold_solver.forward.rel_tol = 1e-6;
  s.cold_solver.backward.abs_tol = s.cold_solver.backward.rel_tol = 1e-6;

  s.warm_solver = config.solver;
  s.warm_solver.max_iterations = config.mpc.warm_iteration_cap;
  s.warm_solver.forward.abs_tol = s.warm_solver.forward.rel_tol = 1e-4;
  s.warm_solver.backward.abs_tol = s.warm_solver.backward.rel_tol = 1e-4;
  return s;
}

void MpcSettings::validate() const {
  if (!(inner_rate > outer_rate) || !(outer_rate > 0.0)) {
    throw std::invalid_argument("MpcSettings: need inner_rate > outer_rate > 0");
  }
  if (!(estimator_rate > 0.0) || !(horizon > 0.0) || !(timeout > 0.0) ||
      !(goal_tolerance > 0.0)) {
    throw std::invalid_argument("MpcSettings: rates, horizon, timeout and tolerance must be positive");
  }
  cold_solver.validate();
  warm_solver.validate();
}

PlantSimulation::PlantSimulation(Eigen::VectorXd initial_state, double half_track,
                                 double cor_offset, double estimator_rate,
                                 Disturbance disturbance)
    : x_(std::move(initial_state)),
      estimate_(x_),
      half_track_(half_track),
      cor_offset_(cor_offset),
      estimator_period_(1.0 / estimator_rate),
      dist_(disturbance),
      rng_(disturbance.seed) {
  if (x_.size() < 3) {
    throw std::invalid_argument("PlantSimulation: state must be at least (x, y, theta)");
  }
  if (!(dist_.slip_right >= 0.0) || !(dist_.slip_left >= 0.0)) {
    throw std::invalid_argument("PlantSimulation: slip factors must be non-negative");
  }
}

void PlantSimulation::advance(const Eigen::VectorXd& u, double dt) {
  // The commanded base velocities turn into track speeds first, so the slip
  // disturbance acts where the real actuation happens; the resulting plant
  // motion automatically satisfies the nonholonomic geometry.
  const auto [vr_cmd, vl_cmd] = track_speeds(x_, u, half_track_);
  const double cap = dist_.track_speed_limit;
  const double vr = dist_.slip_right * std::clamp(vr_cmd, -cap, cap);
  const double vl = dist_.slip_left * std::clamp(vl_cmd, -cap, cap);
  const double forward = 0.5 * (vr + vl);
  const double omega = (vr - vl) / (2.0 * half_track_);

  const auto rhs = [&](const Eigen::Vector3d& b) {
    return Eigen::Vector3d(forward * std::cos(b(2)) - omega * cor_offset_ * std::sin(b(2)),
                           forward * std::sin(b(2)) + omega * cor_offset_ * std::cos(b(2)),
                           omega);
  };
  const Eigen::Vector3d b0 = x_.head<3>();
  const Eigen::Vector3d k1 = rhs(b0);
  const Eigen::Vector3d k2 = rhs(b0 + 0.5 * dt * k1);
  const Eigen::Vector3d k3 = rhs(b0 + 0.5 * dt * k2);
  const Eigen::Vector3d k4 = rhs(b0 + dt * k3);
  x_.head<3>() = b0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  // Arm joints track their commanded rates exactly.
  x_.tail(x_.size() - 3) += dt * u.tail(u.size() - 3);
}

const Eigen::VectorXd& PlantSimulation::estimate(double t) {
  if (t + 1e-12 >= next_sample_time_) {
    estimate_ = x_;
    if (dist_.jump_rate > 0.0 && dist_.jump_magnitude > 0.0) {
      std::uniform_real_distribution<double> prob(0.0, 1.0);
      if (prob(rng_) < dist_.jump_rate * estimator_period_) {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        const double a = angle(rng_);
        estimate_(0) += dist_.jump_magnitude * std::cos(a);
        estimate_(1) += dist_.jump_magnitude * std::sin(a);
      }
    }
    next_sample_time_ += estimator_period_;
  }
  return estimate_;
}

void ControllerSlot::store(std::shared_ptr<const TimeVaryingController> c) {
  std::lock_guard<std::mutex> lock(mutex_);
  controller_ = std::move(c);
}

std::shared_ptr<const TimeVaryingController> ControllerSlot::load() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return controller_;
}

MpcStepResult mpc_step(const SystemModel& model, const CostFunction& cost,
                       const Eigen::VectorXd& estimate, double t_now,
                       const std::shared_ptr<const TimeVaryingController>& previous,
                       const MpcSettings& settings) {
  const double tf = t_now + settings.horizon;
  const bool warm = settings.warm_start && previous != nullptr;
  // The previous controller clamps past its horizon end, which is exactly the
  // warm-start shift rule: re-indexed to the new window, tail held constant.
  const TimeVaryingController init =
      warm ? *previous
           : TimeVaryingController::zero(model.state_dim(), model.input_dim(), t_now, tf);

  MpcStepResult out;
  out.controller = previous;
  try {
    out.report = solve(model, cost, estimate, t_now, tf, init,
                       warm ? settings.warm_solver : settings.cold_solver);
  } catch (const std::runtime_error&) {
    return out;  // diverged solve: keep the previous plan, inner loop goes on
  }
  if (out.report.controller.has_value()) {
    out.controller =
        std::make_shared<const TimeVaryingController>(std::move(*out.report.controller));
    out.report.controller.reset();
    out.replaced = true;
  }
  return out;
}

Eigen::VectorXd inner_loop_tick(const TimeVaryingController& snapshot,
                                const Eigen::VectorXd& estimate, double t) {
  return snapshot.evaluate(estimate, t);
}

namespace {

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << "," << v(i);
}

}  // namespace

void EpisodeResult::write_ticks_csv(std::ostream& os) const {
  if (ticks.empty()) return;
  os << "t";
  for (Eigen::Index i = 0; i < ticks.front().true_state.size(); ++i) os << ",x" << i;
  for (Eigen::Index i = 0; i < ticks.front().estimate.size(); ++i) os << ",e" << i;
  for (Eigen::Index i = 0; i < ticks.front().input.size(); ++i) os << ",u" << i;
  os << "\n";
  const auto old_precision = os.precision(17);
  for (const TickRecord& r : ticks) {
    os << r.t;
    write_vector(os, r.true_state);
    write_vector(os, r.estimate);
    write_vector(os, r.input);
    os << "\n";
  }
  os.precision(old_precision);
}

void EpisodeResult::write_replans_csv(std::ostream& os) const {
  os << "t,iterations,cost,constraint_ise,solve_time\n";
  const auto old_precision = os.precision(17);
  for (const ReplanRecord& r : replans) {
    os << r.t << "," << r.iterations << "," << r.cost << "," << r.constraint_ise << ","
       << r.solve_time << "\n";
  }
  os.precision(old_precision);
}

EpisodeResult run_episode(const TaskConfig& config) {
  if (!config.mpc.enabled) {
    throw ConfigError("run_episode: config has no [mpc] section");
  }
  TaskObjects task = build_task(config);
  MpcSettings settings = MpcSettings::from_config(config);
  settings.validate();

  // The simulated plant is the tracked two-wheel reduction, so the model must
  // belong to the tracked-base family.
  double half_track = 0.0, cor_offset = 0.0;
  const PlanarManipulatorModel* manip = nullptr;
  if (const auto* tb = dynamic_cast<const TrackedBaseModel*>(task.model.get())) {
    half_track = tb->params().half_track;
    cor_offset = tb->params().cor_offset;
  } else if ((manip = dynamic_cast<const PlanarManipulatorModel*>(task.model.get()))) {
    half_track = manip->params().half_track;
    cor_offset = manip->params().cor_offset;
  } else {
    throw ConfigError("run_episode: MPC runtime supports tracked-base models only");
  }

  PlantSimulation plant(task.x0, half_track, cor_offset, settings.estimator_rate,
                        {config.mpc.slip_right, config.mpc.slip_left, config.mpc.jump_magnitude,
                         config.mpc.jump_rate, config.mpc.track_speed_limit, config.mpc.seed});

  EpisodeResult episode;
  ControllerSlot slot;
  std::shared_ptr<const TimeVaryingController> current;

  const double dt = 1.0 / settings.inner_rate;
  const double replan_period = 1.0 / settings.outer_rate;
  double next_replan = 0.0;
  const long ticks = std::lround(settings.timeout * settings.inner_rate);

  for (long n = 0; n < ticks; ++n) {
    const double t = n * dt;
    const Eigen::VectorXd& est = plant.estimate(t);

    const bool initial_plan = (current == nullptr);
    if ((initial_plan || settings.replanning) && t + 1e-12 >= next_replan) {
      MpcStepResult step = mpc_step(*task.model, *task.cost, est, t, current, settings);
      if (step.replaced) {
        current = step.controller;
        slot.store(current);
      }
      episode.replans.push_back({t, step.report.iterations, step.report.final_cost,
                                 step.report.final_constraint_ise, 0.0});
      next_replan = t + replan_period;
      if (current == nullptr) break;  // cold start failed: nothing to apply
    }

    const std::shared_ptr<const TimeVaryingController> snapshot = slot.load();
    const Eigen::VectorXd u = inner_loop_tick(*snapshot, est, t);
    episode.ticks.push_back({t, plant.true_state(), est, u});

    if (manip != nullptr && manip->params().ee_reference != nullptr) {
      const double err =
          (manip->ee_position(plant.true_state()) - manip->params().ee_reference->position(t))
              .norm();
      episode.max_ee_displacement = std::max(episode.max_ee_displacement, err);
    }

    plant.advance(u, dt);
  }

  const Eigen::Vector2d goal(config.x_ref[0], config.x_ref[1]);
  episode.terminal_error = (plant.true_state().head<2>() - goal).norm();
  episode.reached_goal = episode.terminal_error < settings.goal_tolerance;
  return episode;
}

}  // namespace cslq
