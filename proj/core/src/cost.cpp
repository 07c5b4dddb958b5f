#include "cslq/cost.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "cslq/derivatives.hpp"

namespace cslq {

namespace {

void require_symmetric_psd(const Eigen::MatrixXd& M, const char* name, bool strict) {
  if (M.rows() != M.cols()) throw std::invalid_argument(std::string(name) + " must be square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + M.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  if (strict && !(min_ev > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be positive definite (min eigenvalue " +
                                std::to_string(min_ev) + ")");
  }
  if (!strict && min_ev < -1e-10 * (1.0 + M.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
  }
}

// Finite-difference gradient of a scalar function, central.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& p, double eps) {
  Eigen::VectorXd g(p.size());
  Eigen::VectorXd q = p;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double h = eps * (1.0 + std::abs(p(i)));
    q(i) = p(i) + h;
    const double fp = f(q);
    q(i) = p(i) - h;
    const double fm = f(q);
    q(i) = p(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Central-difference Hessian of a scalar function of (a, b), evaluated as the
// mixed block d2f/da db. Direct second differences (not differences of a
// finite-difference gradient) keep the truncation error zero on quadratics,
// so the roundoff floor (~1e-10 relative) is all that remains.
Eigen::MatrixXd fd_hessian_block(const std::function<double(const Eigen::VectorXd&,
                                                            const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& a, const Eigen::VectorXd& b, double eps) {
  Eigen::MatrixXd H(a.size(), b.size());
  Eigen::VectorXd ap = a, bp = b;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double hi = eps * (1.0 + std::abs(a(i)));
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const double hj = eps * (1.0 + std::abs(b(j)));
      ap(i) = a(i) + hi;
      bp(j) = b(j) + hj;
      const double fpp = f(ap, bp);
      bp(j) = b(j) - hj;
      const double fpm = f(ap, bp);
      ap(i) = a(i) - hi;
      const double fmm = f(ap, bp);
      bp(j) = b(j) + hj;
      const double fmp = f(ap, bp);
      ap(i) = a(i);
      bp(j) = b(j);
      H(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  return H;
}

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& p, double eps) {
  Eigen::MatrixXd H(p.size(), p.size());
  const double f0 = f(p);
  Eigen::VectorXd q = p;
  // Diagonal via the three-point stencil, off-diagonal via the four-point one.
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double hi = eps * (1.0 + std::abs(p(i)));
    q(i) = p(i) + hi;
    const double fp = f(q);
    q(i) = p(i) - hi;
    const double fm = f(q);
    q(i) = p(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (Eigen::Index j = i + 1; j < p.size(); ++j) {
      const double hj = eps * (1.0 + std::abs(p(j)));
      q(i) = p(i) + hi;
      q(j) = p(j) + hj;
      const double fpp = f(q);
      q(j) = p(j) - hj;
      const double fpm = f(q);
      q(i) = p(i) - hi;
      const double fmm = f(q);
      q(j) = p(j) + hj;
      const double fmp = f(q);
      q(i) = p(i);
      q(j) = p(j);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  return H;
}

}  // namespace

CostNode CostFunction::quadratize_node(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                       double t) const {
  // Gradients via central differences, Hessian blocks via direct central
  // second differences. Quadratic costs should still override with exact
  // coefficients; this path is for general smooth costs.
  const double eps = 1e-6;
  const double heps = 1e-3;
  CostNode n;
  n.q = intermediate(x, u, t);
  n.q_vec = fd_gradient([&](const Eigen::VectorXd& xx) { return intermediate(xx, u, t); }, x, eps);
  n.r = fd_gradient([&](const Eigen::VectorXd& uu) { return intermediate(x, uu, t); }, u, eps);
  n.Q = fd_hessian([&](const Eigen::VectorXd& xx) { return intermediate(xx, u, t); }, x, heps);
  n.R = fd_hessian([&](const Eigen::VectorXd& uu) { return intermediate(x, uu, t); }, u, heps);
  n.P = fd_hessian_block(
      [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& uu) { return intermediate(xx, uu, t); },
      x, u, heps);
  return n;
}

TerminalCostNode CostFunction::quadratize_terminal(const Eigen::VectorXd& x) const {
  TerminalCostNode n;
  n.q = terminal(x);
  n.q_vec = fd_gradient([&](const Eigen::VectorXd& xx) { return terminal(xx); }, x, 1e-6);
  n.Q = fd_hessian([&](const Eigen::VectorXd& xx) { return terminal(xx); }, x, 1e-3);
  return n;
}

QuadraticCost::QuadraticCost(Eigen::MatrixXd R, Eigen::MatrixXd Q, Eigen::MatrixXd Qf,
                             Eigen::VectorXd x_r)
    : R_(std::move(R)), Q_(std::move(Q)), Qf_(std::move(Qf)), x_r_(std::move(x_r)) {
  require_symmetric_psd(R_, "input weight R", /*strict=*/true);
  require_symmetric_psd(Q_, "intermediate state weight Q", /*strict=*/false);
  require_symmetric_psd(Qf_, "terminal weight Qf", /*strict=*/false);
  if (x_r_.size() != Qf_.rows() || Q_.rows() != Qf_.rows()) {
    throw std::invalid_argument("QuadraticCost: inconsistent state dimensions");
  }
}

double QuadraticCost::intermediate(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                   double) const {
  double v = u.dot(R_ * u);
  if (!Q_.isZero(0.0)) {
    const Eigen::VectorXd dx = x - x_r_;
    v += dx.dot(Q_ * dx);
  }
  return v;
}

double QuadraticCost::terminal(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd dx = x - x_r_;
  return dx.dot(Qf_ * dx);
}

CostNode QuadraticCost::quadratize_node(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                        double t) const {
  CostNode n;
  const Eigen::VectorXd dx = x - x_r_;
  n.q = intermediate(x, u, t);
  n.q_vec = 2.0 * Q_ * dx;
  n.r = 2.0 * R_ * u;
  n.P = Eigen::MatrixXd::Zero(x.size(), u.size());
  n.Q = 2.0 * Q_;
  n.R = 2.0 * R_;
  return n;
}

TerminalCostNode QuadraticCost::quadratize_terminal(const Eigen::VectorXd& x) const {
  TerminalCostNode n;
  const Eigen::VectorXd dx = x - x_r_;
  n.q = terminal(x);
  n.q_vec = 2.0 * Qf_ * dx;
  n.Q = 2.0 * Qf_;
  return n;
}

double evaluate_cost(const CostFunction& cost, const Trajectory& traj) {
  const std::size_t n = traj.grid.size();
  std::vector<double> l(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& u = (k < traj.inputs.size()) ? traj.inputs[k] : traj.inputs.back();
    l[k] = cost.intermediate(traj.states[k], u, traj.grid[k]);
  }
  double J = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    J += 0.5 * (l[k] + l[k + 1]) * (traj.grid[k + 1] - traj.grid[k]);
  }
  return J + cost.terminal(traj.states.back());
}

CostQuadratization quadratize(const CostFunction& cost, const Trajectory& traj) {
  CostQuadratization q;
  q.nodes.reserve(traj.grid.size());
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const auto& u = (k < traj.inputs.size()) ? traj.inputs[k] : traj.inputs.back();
    q.nodes.push_back(cost.quadratize_node(traj.states[k], u, traj.grid[k]));
  }
  q.terminal = cost.quadratize_terminal(traj.states.back());
  return q;
}

}  // namespace cslq
