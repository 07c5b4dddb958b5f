#include "cslq/system_model.hpp"

#include <sstream>
#include <stdexcept>

#include "cslq/derivatives.hpp"

namespace cslq {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* name) {
  if (!m.allFinite()) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (!std::isfinite(m(i, j))) {
          std::ostringstream os;
          os << "linearize: non-finite entry in " << name << " at (" << i << ", " << j << ")";
          throw std::runtime_error(os.str());
        }
      }
    }
  }
}

}  // namespace

Eigen::VectorXd SystemModel::g1(const Eigen::VectorXd&, const Eigen::VectorXd&, double) const {
  return Eigen::VectorXd::Zero(0);
}

Eigen::VectorXd SystemModel::g2(const Eigen::VectorXd&, double) const {
  return Eigen::VectorXd::Zero(0);
}

Eigen::MatrixXd SystemModel::flow_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                             double t) const {
  return finite_difference_jacobian([&](const Eigen::VectorXd& xx) { return flow(xx, u, t); }, x,
                                    fd_epsilon());
}

Eigen::MatrixXd SystemModel::flow_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                             double t) const {
  return finite_difference_jacobian([&](const Eigen::VectorXd& uu) { return flow(x, uu, t); }, u,
                                    fd_epsilon());
}

Eigen::MatrixXd SystemModel::g1_jacobian_x(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                           double t) const {
  if (g1_dim() == 0) return Eigen::MatrixXd::Zero(0, state_dim());
  return finite_difference_jacobian([&](const Eigen::VectorXd& xx) { return g1(xx, u, t); }, x,
                                    fd_epsilon());
}

Eigen::MatrixXd SystemModel::g1_jacobian_u(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                           double t) const {
  if (g1_dim() == 0) return Eigen::MatrixXd::Zero(0, input_dim());
  return finite_difference_jacobian([&](const Eigen::VectorXd& uu) { return g1(x, uu, t); }, u,
                                    fd_epsilon());
}

Eigen::MatrixXd SystemModel::g2_jacobian_x(const Eigen::VectorXd& x, double t) const {
  if (g2_dim() == 0) return Eigen::MatrixXd::Zero(0, state_dim());
  return finite_difference_jacobian([&](const Eigen::VectorXd& xx) { return g2(xx, t); }, x,
                                    fd_epsilon());
}

LinearizedDynamics SystemModel::linearize(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                          double t) const {
  if (x.size() != state_dim() || u.size() != input_dim()) {
    throw std::invalid_argument("linearize: dimension mismatch (x: " + std::to_string(x.size()) +
                                "/" + std::to_string(state_dim()) + ", u: " +
                                std::to_string(u.size()) + "/" + std::to_string(input_dim()) + ")");
  }
  LinearizedDynamics lin;
  lin.A = flow_jacobian_x(x, u, t);
  lin.B = flow_jacobian_u(x, u, t);
  lin.C = g1_jacobian_x(x, u, t);
  lin.D = g1_jacobian_u(x, u, t);
  lin.e = g1(x, u, t);
  lin.F = g2_jacobian_x(x, t);
  lin.h = g2(x, t);
  check_finite(lin.A, "flow/dx");
  check_finite(lin.B, "flow/du");
  check_finite(lin.C, "g1/dx");
  check_finite(lin.D, "g1/du");
  check_finite(lin.e, "g1");
  check_finite(lin.F, "g2/dx");
  check_finite(lin.h, "g2");
  return lin;
}

void SystemModel::validate_dimensions() const {
  if (state_dim() <= 0 || input_dim() <= 0) {
    throw std::invalid_argument("SystemModel: state and input dimensions must be positive");
  }
  if (g1_dim() > input_dim()) {
    throw std::invalid_argument("SystemModel: m1 = " + std::to_string(g1_dim()) +
                                " state-input constraints exceed n_u = " +
                                std::to_string(input_dim()));
  }
}

std::string DerivativeCheckReport::summary() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " (tol " << tolerance << ")\n";
  for (const auto& e : entries) {
    os << "  " << e.map << ": max discrepancy " << e.max_discrepancy << "\n";
  }
  return os.str();
}

DerivativeCheckReport verify_derivatives(
    const SystemModel& model,
    const std::vector<std::tuple<Eigen::VectorXd, Eigen::VectorXd, double>>& samples, double tol) {
  if (samples.empty()) {
    throw std::invalid_argument("verify_derivatives: need at least one sample");
  }
  DerivativeCheckReport report;
  report.tolerance = tol;
  report.entries = {{"flow/dx", 0.0}, {"flow/du", 0.0}, {"g1/dx", 0.0},
                    {"g1/du", 0.0},   {"g2/dx", 0.0}};
  for (const auto& [x, u, t] : samples) {
    auto track = [&](std::size_t idx, const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd) {
      if (analytic.size() == 0) return;
      const double d = (analytic - fd).cwiseAbs().maxCoeff();
      report.entries[idx].max_discrepancy = std::max(report.entries[idx].max_discrepancy, d);
    };
    track(0, model.flow_jacobian_x(x, u, t),
          finite_difference_jacobian([&](const Eigen::VectorXd& xx) { return model.flow(xx, u, t); },
                                     x));
    track(1, model.flow_jacobian_u(x, u, t),
          finite_difference_jacobian([&](const Eigen::VectorXd& uu) { return model.flow(x, uu, t); },
                                     u));
    if (model.g1_dim() > 0) {
      track(2, model.g1_jacobian_x(x, u, t),
            finite_difference_jacobian([&](const Eigen::VectorXd& xx) { return model.g1(xx, u, t); },
                                       x));
      track(3, model.g1_jacobian_u(x, u, t),
            finite_difference_jacobian([&](const Eigen::VectorXd& uu) { return model.g1(x, uu, t); },
                                       u));
    }
    if (model.g2_dim() > 0) {
      track(4, model.g2_jacobian_x(x, t),
            finite_difference_jacobian([&](const Eigen::VectorXd& xx) { return model.g2(xx, t); },
                                       x));
    }
  }
  report.passed = true;
  for (const auto& e : report.entries) {
    if (e.max_discrepancy > tol) report.passed = false;
  }
  return report;
}

}  // namespace cslq
