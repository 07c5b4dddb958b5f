// Microbenchmarks for the solver's hot path: adaptive rollout, per-node
// constraint projection, LQ data construction, the Riccati backward pass, and
// the full solve on a reference task.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <memory>

#include "cslq/constrained_lqr.hpp"
#include "cslq/cost.hpp"
#include "cslq/integrator.hpp"
#include "cslq/models/planar_manipulator.hpp"
#include "cslq/models/tracked_base.hpp"
#include "cslq/slq.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace cslq;

namespace {

// Shared fixture data: a manipulator with the hard end-effector tracking
// constraint (3 g1 rows) on a 5 s horizon, which exercises every block.
struct Fixture {
  std::shared_ptr<PlanarManipulatorModel> model;
  std::unique_ptr<QuadraticCost> cost;
  VectorXd x0;
  double tf = 5.0;
  Trajectory nominal;

  Fixture()
      : model(std::make_shared<PlanarManipulatorModel>(PlanarManipulatorModel::Params{
            .ee_mode = EeConstraintMode::velocity,
            .ee_reference = std::make_shared<FixedPoint>(Eigen::Vector2d(2.0, 0.3))})),
        nominal(make_nominal()) {
    VectorXd x_ref = VectorXd::Zero(6);
    x_ref(0) = 1.0;
    cost = std::make_unique<QuadraticCost>(MatrixXd::Identity(6, 6), MatrixXd::Zero(6, 6),
                                           100.0 * MatrixXd::Identity(6, 6), x_ref);
    x0 = VectorXd::Zero(6);
    x0(3) = 0.6;
    x0(4) = -1.2;
    x0(5) = 0.6;
  }

  Trajectory make_nominal() const {
    VectorXd start = VectorXd::Zero(6);
    start(3) = 0.6;
    start(4) = -1.2;
    start(5) = 0.6;
    IntegratorSettings s;
    s.max_step = 0.02;
    return rollout(*model, TimeVaryingController::zero(6, 6, 0.0, tf), start, 0.0, tf, s);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_AdaptiveRollout(benchmark::State& state) {
  auto& f = fixture();
  IntegratorSettings s;
  s.max_step = 0.02;
  const auto ctrl = TimeVaryingController::zero(6, 6, 0.0, f.tf);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rollout(*f.model, ctrl, f.x0, 0.0, f.tf, s));
  }
}
BENCHMARK(BM_AdaptiveRollout);

void BM_ConstraintProjection(benchmark::State& state) {
  auto& f = fixture();
  const VectorXd u = VectorXd::Constant(6, 0.1);
  const LinearizedDynamics lin = f.model->linearize(f.x0, u, 0.0);
  const CostNode node = f.cost->quadratize_node(f.x0, u, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_coefficients(lin, node));
  }
}
BENCHMARK(BM_ConstraintProjection);

void BM_BuildLqData(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_lq_data(*f.model, *f.cost, f.nominal));
  }
}
BENCHMARK(BM_BuildLqData);

void BM_RiccatiBackwardPass(benchmark::State& state) {
  auto& f = fixture();
  const LqProblemData data = build_lq_data(*f.model, *f.cost, f.nominal);
  IntegratorSettings s;
  s.max_step = 0.02;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_riccati(data, s));
  }
}
BENCHMARK(BM_RiccatiBackwardPass);

void BM_FullSolveTrackedReposition(benchmark::State& state) {
  TrackedBaseModel model({});
  QuadraticCost cost(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3),
                     100.0 * MatrixXd::Identity(3, 3), Eigen::Vector3d(1.0, 0.0, 0.0));
  SolverSettings settings;
  const double tf = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(model, cost, Eigen::Vector3d::Zero(), 0.0, tf,
                                   TimeVaryingController::zero(3, 3, 0.0, tf), settings));
  }
}
BENCHMARK(BM_FullSolveTrackedReposition);

}  // namespace
