#pragma once

#include <Eigen/Core>
#include <functional>

namespace cslq {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian of a vector map. The step for coordinate i is
/// epsilon * (1 + |point(i)|), balancing truncation against rounding error.
/// Entry error is O(epsilon^2) for smooth maps.
Eigen::MatrixXd finite_difference_jacobian(const VectorMap& map, const Eigen::VectorXd& point,
                                           double epsilon = 1e-6);

}  // namespace cslq
