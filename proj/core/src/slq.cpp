#include "cslq/slq.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <ostream>
#include <stdexcept>

namespace cslq {

namespace {

struct Candidate {
  double alpha;
  double alpha_e;
  Trajectory traj;
  double cost;
  double ise;
  double merit;
};

struct EvaluatedRollout {
  Trajectory traj;
  double cost;
  double ise;
};

// Closed-loop rollout with the running cost and the squared constraint
// violation integrated as augmented states. Sharing the integrator's error
// control keeps the metrics reproducible to the integration tolerance, which
// trapezoid sums over a changing adaptive grid are not; the line search
// compares merits far below trapezoid noise.
EvaluatedRollout rollout_with_metrics(const SystemModel& model, const CostFunction& cost,
                                      const TimeVaryingController& ctrl, const Eigen::VectorXd& x0,
                                      double t0, double tf, const IntegratorSettings& settings,
                                      double state_bound) {
  if (x0.size() != model.state_dim() || ctrl.state_dim() != model.state_dim() ||
      ctrl.input_dim() != model.input_dim()) {
    throw std::invalid_argument("solve: dimension mismatch between model, controller and x0");
  }
  const Eigen::Index n_x = model.state_dim();
  const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y) {
    const Eigen::VectorXd x = y.head(n_x);
    if (x.cwiseAbs().maxCoeff() > state_bound) {
      throw std::runtime_error("solve: state max-norm exceeded divergence bound " +
                               std::to_string(state_bound) + " at t = " + std::to_string(t));
    }
    const Eigen::VectorXd u = ctrl.evaluate(x, t);
    Eigen::VectorXd dy(n_x + 2);
    dy.head(n_x) = model.flow(x, u, t);
    dy(n_x) = cost.intermediate(x, u, t);
    dy(n_x + 1) = model.g1(x, u, t).squaredNorm() + model.g2(x, t).squaredNorm();
    return dy;
  };
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n_x + 2);
  y0.head(n_x) = x0;
  IntegrationResult r = integrate_adaptive(rhs, y0, t0, tf, settings);

  const std::size_t N = r.times.size();
  std::vector<Eigen::VectorXd> states(N), inputs(N);
  for (std::size_t k = 0; k < N; ++k) {
    states[k] = r.values[k].head(n_x);
    inputs[k] = ctrl.evaluate(states[k], r.times[k]);
  }
  EvaluatedRollout out{Trajectory(TimeGrid(std::move(r.times)), std::move(states),
                                  std::move(inputs)),
                       r.values.back()(n_x) + cost.terminal(r.values.back().head(n_x)),
                       r.values.back()(n_x + 1)};
  return out;
}

TimeVaryingController make_candidate_controller(const Trajectory& nominal,
                                                const ControllerUpdate& up, double alpha,
                                                double alpha_e) {
  const std::size_t N = nominal.grid.size();
  std::vector<Eigen::VectorXd> u_ff(N);
  std::vector<Eigen::MatrixXd> K(N);
  for (std::size_t k = 0; k < N; ++k) {
    const auto& u_bar = (k < nominal.inputs.size()) ? nominal.inputs[k] : nominal.inputs.back();
    u_ff[k] = u_bar + alpha * up.l[k] + alpha_e * up.l_e[k] - up.L[k] * nominal.states[k];
    K[k] = up.L[k];
  }
  return TimeVaryingController(nominal.grid, std::move(u_ff), std::move(K));
}

bool debug_logging() {
  static const bool on = [] {
    const char* v = std::getenv("CSLQ_LOG");
    return v != nullptr && std::strcmp(v, "debug") == 0;
  }();
  return on;
}

}  // namespace

void LineSearchSettings::validate() const {
  if (!(alpha_min > 0.0) || !(alpha_min < 1.0)) {
    throw std::invalid_argument("LineSearchSettings: need 0 < alpha_min < 1");
  }
  if (!(reduction > 0.0) || !(reduction < 1.0)) {
    throw std::invalid_argument("LineSearchSettings: need 0 < reduction < 1");
  }
  if (!(merit_constraint_weight > 0.0)) {
    throw std::invalid_argument("LineSearchSettings: merit weight must be positive");
  }
}

void SolverSettings::validate() const {
  if (max_iterations == 0) throw std::invalid_argument("SolverSettings: max_iterations == 0");
  if (!(cost_rel_tol > 0.0) || !(constraint_ise_tol > 0.0) || !(divergence_bound > 0.0)) {
    throw std::invalid_argument("SolverSettings: tolerances must be positive");
  }
  line_search.validate();
  forward.validate();
  backward.validate();
}

SolveReport solve(const SystemModel& model, const CostFunction& cost, const Eigen::VectorXd& x0,
                  double t0, double tf, const TimeVaryingController& init_ctrl,
                  const SolverSettings& settings) {
  settings.validate();
  const double nu = settings.line_search.merit_constraint_weight;

  SolveReport report;
  TimeVaryingController ctrl = init_ctrl;
  EvaluatedRollout nominal = rollout_with_metrics(model, cost, ctrl, x0, t0, tf, settings.forward,
                                                  settings.divergence_bound);
  Trajectory traj = std::move(nominal.traj);
  double J = nominal.cost;
  double ise = nominal.ise;
  double merit = J + nu * ise;

  for (std::size_t iter = 0; iter < settings.max_iterations; ++iter) {
    LqProblemData lq = build_lq_data(model, cost, traj);
    RiccatiSolution riccati = solve_riccati(lq, settings.backward);
    ControllerUpdate update = controller_update(lq, riccati);

    report.predicted_cost = riccati.predicted_cost();
    report.max_constraint_gain_residual = update.max_constraint_gain_residual;
    report.max_feedforward_residual = update.max_feedforward_residual;
    report.max_restoration_residual = update.max_restoration_residual;

    // Line search: alpha_e pinned at 1 drives constraint restoration; if no
    // alpha improves the merit, retry with coupled decay alpha_e = alpha.
    std::optional<Candidate> accepted;
    // Slack above the discretization noise of the trapezoid cost estimate, so
    // a stationary iterate is accepted instead of failing the line search.
    const double slack = 1e-8 * (1.0 + std::abs(merit));
    for (int coupled = 0; coupled < 2 && !accepted; ++coupled) {
      for (double alpha = 1.0; alpha >= settings.line_search.alpha_min;
           alpha *= settings.line_search.reduction) {
        const double alpha_e = coupled ? alpha : 1.0;
        TimeVaryingController cand_ctrl =
            make_candidate_controller(traj, update, alpha, alpha_e);
        std::optional<EvaluatedRollout> cand;
        try {
          cand = rollout_with_metrics(model, cost, cand_ctrl, x0, t0, tf, settings.forward,
                                      settings.divergence_bound);
        } catch (const std::runtime_error&) {
          continue;  // diverged rollout, shrink the step
        }
        const double cand_merit = cand->cost + nu * cand->ise;
        if (debug_logging()) {
          std::cerr << "  candidate alpha=" << alpha << " alpha_e=" << alpha_e
                    << " cost=" << cand->cost << " ise=" << cand->ise
                    << " merit=" << cand_merit << " (current " << merit << ")\n";
        }
        if (cand_merit <= merit + slack) {
          accepted = Candidate{alpha, alpha_e, std::move(cand->traj), cand->cost, cand->ise,
                               cand_merit};
          ctrl = std::move(cand_ctrl);
          break;
        }
      }
    }

    if (!accepted) {
      report.line_search_failed = true;
      break;
    }

    const double prev_cost = J;
    traj = std::move(accepted->traj);
    J = accepted->cost;
    ise = accepted->ise;
    merit = accepted->merit;
    report.history.push_back({J, ise, merit, accepted->alpha, accepted->alpha_e});
    report.iterations = report.history.size();

    const double rel_decrease = std::abs(J - prev_cost) / std::max(1.0, std::abs(prev_cost));
    if (rel_decrease < settings.cost_rel_tol && ise < settings.constraint_ise_tol) {
      report.converged = true;
      break;
    }
  }

  report.final_cost = J;
  report.final_constraint_ise = ise;
  report.trajectory = std::move(traj);
  report.controller = std::move(ctrl);
  return report;
}

void SolveReport::write_summary(std::ostream& os) const {
  os << "converged: " << (converged ? "yes" : "no") << "\n"
     << "iterations: " << iterations << "\n"
     << "final_cost: " << final_cost << "\n"
     << "final_constraint_ise: " << final_constraint_ise << "\n"
     << "predicted_cost: " << predicted_cost << "\n"
     << "max_constraint_gain_residual: " << max_constraint_gain_residual << "\n"
     << "max_feedforward_residual: " << max_feedforward_residual << "\n"
     << "max_restoration_residual: " << max_restoration_residual << "\n";
  if (line_search_failed) os << "line_search_failed: yes\n";
}

void SolveReport::write_convergence_csv(std::ostream& os) const {
  os << "iteration,cost,constraint_ise,merit,alpha,alpha_e\n";
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    os << i + 1 << "," << h.cost << "," << h.constraint_ise << "," << h.merit << "," << h.alpha
       << "," << h.alpha_e << "\n";
  }
  os.precision(old_precision);
}

}  // namespace cslq
