#include "cslq/time_grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace cslq {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) {
    throw std::invalid_argument("TimeGrid: need at least 2 nodes, got " +
                                std::to_string(nodes_.size()));
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("TimeGrid: nodes must be strictly increasing at index " +
                                  std::to_string(i));
    }
  }
}

TimeGrid::Bracket TimeGrid::bracket(double t) const {
  if (t <= nodes_.front()) return {0, 0.0};
  if (t >= nodes_.back()) return {nodes_.size() - 2, 1.0};
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double h = nodes_[i + 1] - nodes_[i];
  return {i, (t - nodes_[i]) / h};
}

}  // namespace cslq
