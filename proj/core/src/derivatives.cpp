#include "cslq/derivatives.hpp"

#include <cmath>
#include <stdexcept>

namespace cslq {

Eigen::MatrixXd finite_difference_jacobian(const VectorMap& map, const Eigen::VectorXd& point,
                                           double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("finite_difference_jacobian: epsilon must be positive");
  }
  Eigen::VectorXd p = point;
  Eigen::MatrixXd jac;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double h = epsilon * (1.0 + std::abs(point(i)));
    p(i) = point(i) + h;
    const Eigen::VectorXd fp = map(p);
    p(i) = point(i) - h;
    const Eigen::VectorXd fm = map(p);
    p(i) = point(i);
    if (jac.size() == 0) jac.resize(fp.size(), point.size());
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  if (jac.size() == 0) {
    // Zero-dimensional input: still need the output dimension.
    jac.resize(map(point).size(), 0);
  }
  return jac;
}

}  // namespace cslq
