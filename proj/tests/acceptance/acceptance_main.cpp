// End-to-end acceptance suite: one PASS/FAIL line per criterion, exit 0 only
// when every criterion holds. Heavy solves are cached and shared between
// criteria; artifacts land under ./acceptance-artifacts in the working
// directory for post-mortem inspection.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cslq/config.hpp"
#include "cslq/constrained_lqr.hpp"
#include "cslq/cost.hpp"
#include "cslq/models/planar_manipulator.hpp"
#include "cslq/models/tracked_base.hpp"
#include "cslq/models/wheeled_legged.hpp"
#include "cslq/mpc.hpp"
#include "cslq/slq.hpp"
#include "cslq/system_model.hpp"
#include "cslq/task.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace cslq;
namespace fs = std::filesystem;

namespace {

const char* kConfigDir = CSLQ_CONFIG_DIR;
const fs::path kOutRoot = "acceptance-artifacts";

int failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

TaskConfig load_config(const std::string& name) {
  return TaskConfig::load(std::string(kConfigDir) + "/" + name + ".cfg");
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool files_identical(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

// ------------------------------------------------------------------------
// Criterion 1: the solver trajectory on a random time-invariant constrained
// LQ problem must match the KKT solution of its Euler direct transcription.

struct LtiModel : SystemModel {
  MatrixXd A, B, C, D;
  LtiModel(MatrixXd a, MatrixXd b, MatrixXd c, MatrixXd d)
      : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    validate_dimensions();
  }
  Eigen::Index state_dim() const override { return A.rows(); }
  Eigen::Index input_dim() const override { return B.cols(); }
  Eigen::Index g1_dim() const override { return C.rows(); }
  VectorXd flow(const VectorXd& x, const VectorXd& u, double) const override {
    return A * x + B * u;
  }
  VectorXd g1(const VectorXd& x, const VectorXd& u, double) const override {
    return C * x + D * u;
  }
  MatrixXd flow_jacobian_x(const VectorXd&, const VectorXd&, double) const override { return A; }
  MatrixXd flow_jacobian_u(const VectorXd&, const VectorXd&, double) const override { return B; }
  MatrixXd g1_jacobian_x(const VectorXd&, const VectorXd&, double) const override { return C; }
  MatrixXd g1_jacobian_u(const VectorXd&, const VectorXd&, double) const override { return D; }
};

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto draw = [&](Eigen::Index r, Eigen::Index c) {
    return MatrixXd::NullaryExpr(r, c, [&](Eigen::Index, Eigen::Index) { return unit(rng); });
  };
  // Mild dynamics keep the first-order transcription bias well inside the
  // comparison tolerance.
  const MatrixXd A = 0.4 * draw(2, 2);
  const MatrixXd B = draw(2, 1);
  const MatrixXd C = draw(1, 2);
  MatrixXd D = draw(1, 1);
  D(0, 0) += (D(0, 0) < 0.0 ? -1.0 : 1.0);  // keep the input coupling well-conditioned
  const VectorXd x0 = draw(2, 1);

  const MatrixXd R = MatrixXd::Identity(1, 1);
  const MatrixXd Q = 0.5 * MatrixXd::Identity(2, 2);
  const MatrixXd Qf = MatrixXd::Identity(2, 2);
  const double tf = 1.0;

  LtiModel model(A, B, C, D);
  QuadraticCost cost(R, Q, Qf, VectorXd::Zero(2));
  SolverSettings settings;
  settings.forward.abs_tol = settings.forward.rel_tol = 1e-8;
  settings.backward.abs_tol = settings.backward.rel_tol = 1e-8;
  const SolveReport rep = solve(model, cost, x0, 0.0, tf,
                                TimeVaryingController::zero(2, 1, 0.0, tf), settings);

  // Euler direct transcription: variables x_1..x_N (2 each) then u_0..u_N-1.
  const int N = 200;
  const double h = tf / N;
  const int nz = 2 * N + N;
  const int nc = 2 * N + N;  // dynamics rows + constraint rows
  const auto xi = [&](int k) { return 2 * (k - 1); };   // k = 1..N
  const auto ui = [&](int k) { return 2 * N + k; };     // k = 0..N-1

  MatrixXd H = MatrixXd::Zero(nz, nz);
  for (int k = 1; k < N; ++k) H.block<2, 2>(xi(k), xi(k)) = h * Q;
  H.block<2, 2>(xi(N), xi(N)) = h * Q;  // not summed (k < N), terminal below
  H.block<2, 2>(xi(N), xi(N)) = Qf;
  for (int k = 0; k < N; ++k) H(ui(k), ui(k)) = h * R(0, 0);

  MatrixXd G = MatrixXd::Zero(nc, nz);
  VectorXd b = VectorXd::Zero(nc);
  const MatrixXd Ad = MatrixXd::Identity(2, 2) + h * A;
  for (int k = 0; k < N; ++k) {
    G.block<2, 2>(2 * k, xi(k + 1)) = MatrixXd::Identity(2, 2);
    G.block<2, 1>(2 * k, ui(k)) = -h * B;
    if (k == 0) {
      b.segment<2>(0) = Ad * x0;
    } else {
      G.block<2, 2>(2 * k, xi(k)) = -Ad;
    }
    const int row = 2 * N + k;
    G(row, ui(k)) = D(0, 0);
    if (k == 0) {
      b(row) = -(C * x0)(0);
    } else {
      G.block<1, 2>(row, xi(k)) = C;
    }
  }

  MatrixXd kkt = MatrixXd::Zero(nz + nc, nz + nc);
  kkt.topLeftCorner(nz, nz) = 2.0 * H;
  kkt.topRightCorner(nz, nc) = G.transpose();
  kkt.bottomLeftCorner(nc, nz) = G;
  VectorXd rhs = VectorXd::Zero(nz + nc);
  rhs.tail(nc) = b;
  const VectorXd z = kkt.partialPivLu().solve(rhs).head(nz);

  double max_err = 0.0;
  if (rep.trajectory.has_value()) {
    for (int k = 0; k <= N; ++k) {
      const VectorXd xk = (k == 0) ? x0 : VectorXd(z.segment<2>(xi(k)));
      const VectorXd xs = rep.trajectory->state_at(k * h);
      max_err = std::max(max_err, (xk - xs).cwiseAbs().maxCoeff());
    }
  }
  const double elapsed = seconds_since(t0);
  const bool ok = rep.converged && rep.trajectory.has_value() && max_err < 1e-3 && elapsed < 1.0;
  std::ostringstream d;
  d << "max state gap " << max_err << ", " << elapsed << " s";
  report(1, ok, "constrained-LQ solution matches the transcription KKT oracle", d.str());
}

// ------------------------------------------------------------------------
// Criterion 2: scalar final-value equation against the closed form 1/(2 - t).

void criterion_2() {
  LinearizedDynamics lin;
  lin.A = MatrixXd::Zero(1, 1);
  lin.B = MatrixXd::Ones(1, 1);
  lin.C = MatrixXd::Zero(0, 1);
  lin.D = MatrixXd::Zero(0, 1);
  lin.e = VectorXd::Zero(0);
  lin.F = MatrixXd::Zero(0, 1);
  lin.h = VectorXd::Zero(0);
  CostNode cost;
  cost.q = 0.0;
  cost.q_vec = VectorXd::Zero(1);
  cost.r = VectorXd::Zero(1);
  cost.P = MatrixXd::Zero(1, 1);
  cost.Q = MatrixXd::Zero(1, 1);
  cost.R = MatrixXd::Identity(1, 1);
  TerminalCostNode terminal{0.0, VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
  LqNode node{lin, cost, project_coefficients(lin, cost)};
  const LqProblemData data{TimeGrid({0.0, 1.0}), {node, node}, terminal};

  IntegratorSettings s;
  s.abs_tol = s.rel_tol = 1e-10;
  const RiccatiSolution sol = solve_riccati(data, s);
  const double s0 = sol.at(0.0).S(0, 0);
  const bool ok = std::abs(s0 - 0.5) < 1e-6;
  std::ostringstream d;
  d << "S(0) = " << s0;
  report(2, ok, "unconstrained scalar backward pass matches 1/(2 - t)", d.str());
}

// ------------------------------------------------------------------------
// Shared plan-task cache for criteria 3, 4, 8 and 10.

const std::vector<std::string> kPlanTasks = {
    "tracked-reposition", "tracked-ee-hold",   "if2a-reduced",
    "if2b-reduced",       "singularity-reach", "ee-figure-eight"};
const std::vector<std::string> kMpcTasks = {"mpc-base-slip", "mpc-ee-hold"};

std::map<std::string, PlanResult> plan_results;
std::map<std::string, MpcRunResult> mpc_results;

void run_cached_tasks() {
  for (const auto& name : kPlanTasks) {
    plan_results[name] = run_plan(load_config(name), (kOutRoot / name / "run1").string());
  }
  for (const auto& name : kMpcTasks) {
    mpc_results[name] = run_mpc(load_config(name), (kOutRoot / name / "run1").string());
  }
}

void criterion_3() {
  bool ok = true;
  double worst = 0.0;
  std::string worst_task = "none";
  for (const auto& [name, res] : plan_results) {
    if (!res.report.converged) {
      ok = false;
      worst_task = name + " unconverged";
      continue;
    }
    const double r = std::max({res.report.max_constraint_gain_residual,
                               res.report.max_feedforward_residual,
                               res.report.max_restoration_residual});
    if (r > worst) {
      worst = r;
      worst_task = name;
    }
    if (r > 1e-8) ok = false;
  }
  std::ostringstream d;
  d << "worst residual " << worst << " on " << worst_task;
  report(3, ok, "controller compliance identities hold on every converged task", d.str());
}

void criterion_4() {
  const auto& hold = plan_results.at("tracked-ee-hold");
  const auto& a = plan_results.at("if2a-reduced");
  const auto& b = plan_results.at("if2b-reduced");
  const bool hold_ok = hold.report.converged && hold.report.iterations <= 8 &&
                       hold.report.final_constraint_ise < 1e-4;
  const bool a_ok = a.report.converged && a.report.iterations <= 20 &&
                    a.report.final_constraint_ise < 1e-3 && a.wall_time < 60.0;
  const bool b_ok = b.report.converged && b.report.iterations <= 20 &&
                    b.report.final_constraint_ise < 1e-3 && b.wall_time < 60.0;
  std::ostringstream d;
  d << "ee-hold " << hold.report.iterations << " it/ise " << hold.report.final_constraint_ise
    << "; if2a " << a.report.iterations << " it/" << a.wall_time << " s; if2b "
    << b.report.iterations << " it/" << b.wall_time << " s";
  report(4, hold_ok && a_ok && b_ok, "benchmark tasks converge within iteration and time budgets",
         d.str());
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& closed = mpc_results.at("mpc-base-slip");
  TaskConfig open_cfg = load_config("mpc-base-slip");
  open_cfg.mpc.replanning = false;
  const MpcRunResult open = run_mpc(open_cfg, (kOutRoot / "mpc-base-slip" / "open").string());
  const double elapsed = seconds_since(t0);
  const double e_closed = closed.episode.terminal_error;
  const double e_open = open.episode.terminal_error;
  const bool ok = closed.episode.reached_goal && e_closed < 0.02 &&
                  e_open >= 5.0 * e_closed && elapsed < 120.0;
  std::ostringstream d;
  d << "closed " << e_closed << " m, open " << e_open << " m, " << elapsed << " s";
  report(5, ok, "replanning rejects track slip at least 5x better than open loop", d.str());
}

void criterion_6() {
  const auto& res = mpc_results.at("mpc-ee-hold");
  const TaskConfig cfg = load_config("mpc-ee-hold");
  const bool ok = res.episode.reached_goal &&
                  res.episode.max_ee_displacement < cfg.mpc.ee_displacement_bound;
  std::ostringstream d;
  d << "max displacement " << res.episode.max_ee_displacement << " m, bound "
    << cfg.mpc.ee_displacement_bound << " m";
  report(6, ok, "end effector stays within the hold bound under slip", d.str());
}

void criterion_7() {
  const TaskConfig cfg = load_config("tracked-reposition");
  // Best of two timing passes: the solve is deterministic, so the minimum
  // wall time per horizon is the measurement least polluted by scheduler
  // noise.
  const ScalingResult pass1 =
      run_scaling(cfg, {5.0, 10.0, 20.0}, (kOutRoot / "scaling").string());
  const ScalingResult pass2 =
      run_scaling(cfg, {5.0, 10.0, 20.0}, (kOutRoot / "scaling2").string());
  bool ok = pass1.rows.size() == 3 && pass2.rows.size() == 3;
  double r1 = 0.0, r2 = 0.0;
  if (ok) {
    std::vector<double> per(3);
    for (int i = 0; i < 3; ++i) {
      per[i] = std::min(pass1.rows[i].per_iteration_time, pass2.rows[i].per_iteration_time);
    }
    r1 = per[1] / per[0];
    r2 = per[2] / per[1];
    ok = r1 >= 1.4 && r1 <= 2.8 && r2 >= 1.4 && r2 <= 2.8;
  }
  std::ostringstream d;
  d << "per-iteration ratios " << r1 << " (10/5), " << r2 << " (20/10)";
  report(7, ok, "per-iteration solve time scales linearly with the horizon", d.str());
}

void criterion_8() {
  const auto& res = plan_results.at("singularity-reach");
  const TaskConfig cfg = load_config("singularity-reach");
  const TaskObjects objs = build_task(cfg);
  const auto* manip = dynamic_cast<const PlanarManipulatorModel*>(objs.model.get());
  double min_sigma = 1e9;
  if (manip != nullptr && res.report.trajectory.has_value()) {
    for (const auto& x : res.report.trajectory->states) {
      min_sigma = std::min(min_sigma, manip->arm_singular_value(x));
    }
  }
  const bool ok = res.report.converged && res.report.final_constraint_ise < 1e-4 &&
                  min_sigma < 1e-3;
  std::ostringstream d;
  d << "min arm singular value " << min_sigma << ", ise "
    << res.report.final_constraint_ise;
  report(8, ok, "tracking stays feasible through the arm singularity", d.str());
}

void criterion_9() {
  bool ok = true;
  std::ostringstream d;

  const auto samples = [](int n, Eigen::Index nx, Eigen::Index nu, unsigned seed, double range) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-range, range);
    std::vector<std::tuple<VectorXd, VectorXd, double>> out;
    for (int i = 0; i < n; ++i) {
      out.emplace_back(VectorXd::NullaryExpr(nx, [&](Eigen::Index) { return dist(rng); }),
                       VectorXd::NullaryExpr(nu, [&](Eigen::Index) { return dist(rng); }),
                       dist(rng));
    }
    return out;
  };

  {
    TrackedBaseModel model({.cor_offset = 0.2, .half_track = 0.3, .arm_joints = 1});
    ok &= verify_derivatives(model, samples(100, 4, 4, 101, 1.5), 1e-6).passed;
  }
  auto path = std::make_shared<CirclePath>(Eigen::Vector2d(0.5, 0.0), 1.0, 0.7);
  for (const EeConstraintMode mode :
       {EeConstraintMode::none, EeConstraintMode::velocity, EeConstraintMode::position,
        EeConstraintMode::hold}) {
    PlanarManipulatorModel model({.cor_offset = 0.15,
                                  .ee_mode = mode,
                                  .hold_gain = 3.0,
                                  .ee_reference = mode == EeConstraintMode::none ? nullptr : path});
    ok &= verify_derivatives(model, samples(100, 6, 6, 102, 1.2), 1e-6).passed;
  }
  {
    WheeledLeggedModel model;
    // Random pitch within +-1 rad stays clear of the Euler singularity.
    ok &= verify_derivatives(model, samples(100, 14, 14, 103, 1.0), 1e-6).passed;
  }

  // Quadratization of a quadratic cost must reproduce the cost exactly.
  {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const MatrixXd R = 1.5 * MatrixXd::Identity(3, 3);
    const MatrixXd Q = 0.3 * MatrixXd::Identity(4, 4);
    const MatrixXd Qf = 7.0 * MatrixXd::Identity(4, 4);
    const VectorXd xr = VectorXd::NullaryExpr(4, [&](Eigen::Index) { return dist(rng); });
    QuadraticCost cost(R, Q, Qf, xr);
    const VectorXd x0 = VectorXd::NullaryExpr(4, [&](Eigen::Index) { return dist(rng); });
    const VectorXd u0 = VectorXd::NullaryExpr(3, [&](Eigen::Index) { return dist(rng); });
    const CostNode n = cost.quadratize_node(x0, u0, 0.0);
    const TerminalCostNode tn = cost.quadratize_terminal(x0);
    double max_gap = 0.0;
    for (int i = 0; i < 100; ++i) {
      const VectorXd dx = VectorXd::NullaryExpr(4, [&](Eigen::Index) { return dist(rng); });
      const VectorXd du = VectorXd::NullaryExpr(3, [&](Eigen::Index) { return dist(rng); });
      const double taylor = n.q + n.q_vec.dot(dx) + n.r.dot(du) + dx.dot(n.P * du) +
                            0.5 * dx.dot(n.Q * dx) + 0.5 * du.dot(n.R * du);
      max_gap = std::max(max_gap,
                         std::abs(taylor - cost.intermediate(x0 + dx, u0 + du, 0.0)));
      const double taylor_t = tn.q + tn.q_vec.dot(dx) + 0.5 * dx.dot(tn.Q * dx);
      max_gap = std::max(max_gap, std::abs(taylor_t - cost.terminal(x0 + dx)));
    }
    ok &= max_gap < 1e-8;
    d << "quadratization gap " << max_gap;
  }
  report(9, ok, "analytic derivatives and cost quadratization verify numerically", d.str());
}

void criterion_10() {
  bool ok = true;
  std::string first_bad;
  const auto check = [&](const std::string& name, const std::vector<std::string>& files) {
    for (const auto& f : files) {
      if (!files_identical(kOutRoot / name / "run1" / f, kOutRoot / name / "run2" / f)) {
        ok = false;
        if (first_bad.empty()) first_bad = name + "/" + f;
      }
    }
  };
  for (const auto& name : kPlanTasks) {
    run_plan(load_config(name), (kOutRoot / name / "run2").string());
    check(name, {"trajectory.csv", "convergence.csv"});
  }
  for (const auto& name : kMpcTasks) {
    run_mpc(load_config(name), (kOutRoot / name / "run2").string());
    check(name, {"ticks.csv", "replans.csv"});
  }
  report(10, ok, "fixed-seed reruns of every bundled task produce identical CSVs",
         ok ? "8 tasks byte-identical" : "first mismatch " + first_bad);
}

}  // namespace

int main() {
  fs::create_directories(kOutRoot);
  criterion_1();
  criterion_2();
  run_cached_tasks();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures == 0) {
    std::printf("all 10 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", failures);
  return 1;
}
