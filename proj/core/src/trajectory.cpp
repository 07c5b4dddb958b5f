#include "cslq/trajectory.hpp"

#include <ostream>
#include <stdexcept>

#include "cslq/system_model.hpp"

namespace cslq {

Trajectory::Trajectory(TimeGrid grid_, std::vector<Eigen::VectorXd> states_,
                       std::vector<Eigen::VectorXd> inputs_)
    : grid(std::move(grid_)), states(std::move(states_)), inputs(std::move(inputs_)) {
  if (states.size() != grid.size()) {
    throw std::invalid_argument("Trajectory: " + std::to_string(states.size()) +
                                " states for " + std::to_string(grid.size()) + " grid nodes");
  }
  if (inputs.size() != grid.size() && inputs.size() + 1 != grid.size()) {
    throw std::invalid_argument("Trajectory: " + std::to_string(inputs.size()) +
                                " inputs for " + std::to_string(grid.size()) + " grid nodes");
  }
  const Eigen::Index nx = states.front().size();
  for (const auto& x : states) {
    if (x.size() != nx) throw std::invalid_argument("Trajectory: inconsistent state dimensions");
  }
  const Eigen::Index nu = inputs.front().size();
  for (const auto& u : inputs) {
    if (u.size() != nu) throw std::invalid_argument("Trajectory: inconsistent input dimensions");
  }
}

Eigen::VectorXd Trajectory::state_at(double t) const {
  const auto b = grid.bracket(t);
  return (1.0 - b.lambda) * states[b.index] + b.lambda * states[b.index + 1];
}

Eigen::VectorXd Trajectory::input_at(double t) const {
  const auto b = grid.bracket(t);
  const auto& lo = inputs[b.index];
  const auto& hi = (b.index + 1 < inputs.size()) ? inputs[b.index + 1] : inputs.back();
  return (1.0 - b.lambda) * lo + b.lambda * hi;
}

void Trajectory::write_csv(std::ostream& os) const {
  const Eigen::Index nx = state_dim();
  const Eigen::Index nu = input_dim();
  os << "t";
  for (Eigen::Index i = 0; i < nx; ++i) os << ",x" << i;
  for (Eigen::Index i = 0; i < nu; ++i) os << ",u" << i;
  os << "\n";
  const auto old_precision = os.precision(17);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << grid[k];
    for (Eigen::Index i = 0; i < nx; ++i) os << "," << states[k](i);
    const auto& u = (k < inputs.size()) ? inputs[k] : inputs.back();
    for (Eigen::Index i = 0; i < nu; ++i) os << "," << u(i);
    os << "\n";
  }
  os.precision(old_precision);
}

double constraint_ise(const Trajectory& traj, const SystemModel& model) {
  if (model.g1_dim() == 0 && model.g2_dim() == 0) return 0.0;
  const std::size_t n = traj.grid.size();
  std::vector<double> sq(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = traj.grid[k];
    const auto& x = traj.states[k];
    const auto& u = (k < traj.inputs.size()) ? traj.inputs[k] : traj.inputs.back();
    double v = 0.0;
    if (model.g1_dim() > 0) v += model.g1(x, u, t).squaredNorm();
    if (model.g2_dim() > 0) v += model.g2(x, t).squaredNorm();
    sq[k] = v;
  }
  double ise = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    ise += 0.5 * (sq[k] + sq[k + 1]) * (traj.grid[k + 1] - traj.grid[k]);
  }
  return ise;
}

}  // namespace cslq
