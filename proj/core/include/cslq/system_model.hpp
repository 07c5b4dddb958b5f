#pragma once

#include <Eigen/Core>
#include <string>
#include <tuple>
#include <vector>

namespace cslq {

/// Linear approximation of dynamics and constraints at a common (x, u, t):
///   d(dx)/dt = A dx + B du
///   C dx + D du + e = 0
///   F dx + h = 0
struct LinearizedDynamics {
  Eigen::MatrixXd A;  // n_x x n_x
  Eigen::MatrixXd B;  // n_x x n_u
  Eigen::MatrixXd C;  // m1 x n_x
  Eigen::MatrixXd D;  // m1 x n_u
  Eigen::VectorXd e;  // m1
  Eigen::MatrixXd F;  // m2 x n_x
  Eigen::VectorXd h;  // m2
};

/// Abstract constrained kinematic system: flow map f(x, u, t), state-input
/// constraints g1(x, u, t) = 0 and pure-state constraints g2(x, t) = 0.
/// The base class supplies central finite-difference Jacobians; concrete
/// models override them with analytic expressions where available.
/// Models are immutable and reentrant.
class SystemModel {
public:
  virtual ~SystemModel() = default;

  virtual Eigen::Index state_dim() const = 0;
  virtual Eigen::Index input_dim() const = 0;
  virtual Eigen::Index g1_dim() const { return 0; }
  virtual Eigen::Index g2_dim() const { return 0; }

  virtual Eigen::VectorXd flow(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               double t) const = 0;
  virtual Eigen::VectorXd g1(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const;
  virtual Eigen::VectorXd g2(const Eigen::VectorXd& x, double t) const;

  virtual Eigen::MatrixXd flow_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                          double t) const;
  virtual Eigen::MatrixXd flow_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                          double t) const;
  virtual Eigen::MatrixXd g1_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                        double t) const;
  virtual Eigen::MatrixXd g1_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                        double t) const;
  virtual Eigen::MatrixXd g2_jacobian_x(const Eigen::VectorXd& x, double t) const;

  /// Full first-order approximation at (x, u, t). Throws if any derivative
  /// entry is non-finite, naming the offending map.
  LinearizedDynamics linearize(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const;

  /// Throws unless m1 <= n_u (required for the constraint projection) and the
  /// stated dimensions are positive. Concrete models call this once.
  void validate_dimensions() const;

protected:
  double fd_epsilon() const { return 1e-6; }
};

/// Analytic-vs-finite-difference comparison at a set of sample points.
struct DerivativeCheckReport {
  struct Entry {
    std::string map;        // e.g. "flow/dx"
    double max_discrepancy;  // element-wise, over all samples
  };
  std::vector<Entry> entries;
  double tolerance = 0.0;
  bool passed = false;
  std::string summary() const;
};

DerivativeCheckReport verify_derivatives(
    const SystemModel& model,
    const std::vector<std::tuple<Eigen::VectorXd, Eigen::VectorXd, double>>& samples, double tol);

}  // namespace cslq
