#include "cslq/constrained_lqr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

namespace cslq {

namespace {

constexpr double kRankThreshold = 1e-9;  // relative to the largest eigenvalue
constexpr double kAsymmetryTol = 1e-6;

Eigen::MatrixXd lerp(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lambda) {
  return (1.0 - lambda) * a + lambda * b;
}

Eigen::VectorXd lerp(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double lambda) {
  return (1.0 - lambda) * a + lambda * b;
}

}  // namespace

ProjectedCoefficients project_coefficients(const LinearizedDynamics& lin, const CostNode& cost) {
  const Eigen::Index n_x = lin.A.rows();
  const Eigen::Index n_u = lin.B.cols();
  const Eigen::Index m1 = lin.C.rows();

  ProjectedCoefficients p;
  Eigen::LLT<Eigen::MatrixXd> R_llt(cost.R);
  if (R_llt.info() != Eigen::Success) {
    throw std::invalid_argument("project_coefficients: R is not positive definite");
  }

  if (m1 == 0) {
    p.D_dag = Eigen::MatrixXd::Zero(n_u, 0);
    p.C_tilde = Eigen::MatrixXd::Zero(n_u, n_x);
    p.D_tilde = Eigen::MatrixXd::Zero(n_u, n_u);
    p.e_tilde = Eigen::VectorXd::Zero(n_u);
    p.A_tilde = lin.A;
    p.Q_tilde = cost.Q;
    p.q_tilde = cost.q_vec;
    p.R_tilde = cost.R;
  } else {
    const Eigen::MatrixXd RinvDt = R_llt.solve(lin.D.transpose());  // n_u x m1
    const Eigen::MatrixXd M = lin.D * RinvDt;                       // m1 x m1, symmetric PSD
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = ev.cwiseAbs().maxCoeff() * kRankThreshold;
    Eigen::VectorXd inv_ev(m1);
    for (Eigen::Index i = 0; i < m1; ++i) {
      if (ev(i) > cutoff) {
        inv_ev(i) = 1.0 / ev(i);
      } else {
        inv_ev(i) = 0.0;
        p.regularized = true;
      }
    }
    const Eigen::MatrixXd M_pinv =
        es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();
    p.D_dag = RinvDt * M_pinv;
    p.C_tilde = p.D_dag * lin.C;
    p.D_tilde = p.D_dag * lin.D;
    p.e_tilde = p.D_dag * lin.e;
    p.A_tilde = lin.A - lin.B * p.C_tilde;
    p.Q_tilde = cost.Q + p.C_tilde.transpose() * cost.R * p.C_tilde - cost.P * p.C_tilde -
                (cost.P * p.C_tilde).transpose();
    p.q_tilde = cost.q_vec - p.C_tilde.transpose() * cost.r;
    const Eigen::MatrixXd ImD = Eigen::MatrixXd::Identity(n_u, n_u) - p.D_tilde;
    p.R_tilde = ImD.transpose() * cost.R * ImD;
  }
  if (lin.F.rows() > 0) {
    p.Q_tilde += lin.F.transpose() * lin.F;
    p.q_tilde += lin.F.transpose() * lin.h;
  }
  p.Q_tilde = (0.5 * (p.Q_tilde + p.Q_tilde.transpose())).eval();
  p.R_tilde = (0.5 * (p.R_tilde + p.R_tilde.transpose())).eval();
  return p;
}

LqNode LqProblemData::interpolate(double t) const {
  const auto b = grid.bracket(t);
  const LqNode& lo = nodes[b.index];
  const LqNode& hi = nodes[b.index + 1];
  const double lam = b.lambda;
  if (lam == 0.0) return lo;
  if (lam == 1.0) return hi;
  LqNode n;
  n.lin.A = lerp(lo.lin.A, hi.lin.A, lam);
  n.lin.B = lerp(lo.lin.B, hi.lin.B, lam);
  n.lin.C = lerp(lo.lin.C, hi.lin.C, lam);
  n.lin.D = lerp(lo.lin.D, hi.lin.D, lam);
  n.lin.e = lerp(lo.lin.e, hi.lin.e, lam);
  n.lin.F = lerp(lo.lin.F, hi.lin.F, lam);
  n.lin.h = lerp(lo.lin.h, hi.lin.h, lam);
  n.cost.q = (1.0 - lam) * lo.cost.q + lam * hi.cost.q;
  n.cost.q_vec = lerp(lo.cost.q_vec, hi.cost.q_vec, lam);
  n.cost.r = lerp(lo.cost.r, hi.cost.r, lam);
  n.cost.P = lerp(lo.cost.P, hi.cost.P, lam);
  n.cost.Q = lerp(lo.cost.Q, hi.cost.Q, lam);
  n.cost.R = lerp(lo.cost.R, hi.cost.R, lam);
  n.proj.D_dag = lerp(lo.proj.D_dag, hi.proj.D_dag, lam);
  n.proj.A_tilde = lerp(lo.proj.A_tilde, hi.proj.A_tilde, lam);
  n.proj.C_tilde = lerp(lo.proj.C_tilde, hi.proj.C_tilde, lam);
  n.proj.D_tilde = lerp(lo.proj.D_tilde, hi.proj.D_tilde, lam);
  n.proj.e_tilde = lerp(lo.proj.e_tilde, hi.proj.e_tilde, lam);
  n.proj.Q_tilde = lerp(lo.proj.Q_tilde, hi.proj.Q_tilde, lam);
  n.proj.q_tilde = lerp(lo.proj.q_tilde, hi.proj.q_tilde, lam);
  n.proj.R_tilde = lerp(lo.proj.R_tilde, hi.proj.R_tilde, lam);
  n.proj.regularized = lo.proj.regularized || hi.proj.regularized;
  return n;
}

bool LqProblemData::any_regularized() const {
  for (const auto& n : nodes) {
    if (n.proj.regularized) return true;
  }
  return false;
}

LqProblemData build_lq_data(const SystemModel& model, const CostFunction& cost,
                            const Trajectory& traj) {
  LqProblemData data{traj.grid, {}, {}};
  data.nodes.reserve(traj.grid.size());
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const auto& u = (k < traj.inputs.size()) ? traj.inputs[k] : traj.inputs.back();
    LqNode n;
    n.lin = model.linearize(traj.states[k], u, traj.grid[k]);
    n.cost = cost.quadratize_node(traj.states[k], u, traj.grid[k]);
    n.proj = project_coefficients(n.lin, n.cost);
    data.nodes.push_back(std::move(n));
  }
  data.terminal = cost.quadratize_terminal(traj.states.back());
  return data;
}

RiccatiSolution solve_riccati(const LqProblemData& data, const IntegratorSettings& settings) {
  const Eigen::Index n_x = data.terminal.Q.rows();
  if ((data.terminal.Q - data.terminal.Q.transpose()).cwiseAbs().maxCoeff() > kAsymmetryTol) {
    throw std::invalid_argument("solve_riccati: terminal weight must be symmetric");
  }
  const Eigen::Index dim = n_x * n_x + 2 * n_x + 1;

  auto pack = [n_x, dim](const Eigen::MatrixXd& S, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& se, double sc) {
    Eigen::VectorXd y(dim);
    y.head(n_x * n_x) = Eigen::Map<const Eigen::VectorXd>(S.data(), n_x * n_x);
    y.segment(n_x * n_x, n_x) = s;
    y.segment(n_x * n_x + n_x, n_x) = se;
    y(dim - 1) = sc;
    return y;
  };

  const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y) {
    const Eigen::Map<const Eigen::MatrixXd> S(y.data(), n_x, n_x);
    const Eigen::VectorXd s = y.segment(n_x * n_x, n_x);
    const Eigen::VectorXd se = y.segment(n_x * n_x + n_x, n_x);

    const LqNode n = data.interpolate(t);
    Eigen::LLT<Eigen::MatrixXd> R_llt(n.cost.R);
    const Eigen::MatrixXd Bt = n.lin.B.transpose();
    const Eigen::MatrixXd L_t = R_llt.solve(n.cost.P.transpose() + Bt * S);
    const Eigen::VectorXd l_t = R_llt.solve(n.cost.r + Bt * s);
    const Eigen::VectorXd le_t = R_llt.solve(Bt * se);
    const Eigen::MatrixXd LtR = L_t.transpose() * n.proj.R_tilde;

    const Eigen::MatrixXd At = n.proj.A_tilde.transpose();
    Eigen::MatrixXd dS = -(At * S + S.transpose() * n.proj.A_tilde - LtR * L_t + n.proj.Q_tilde);
    Eigen::VectorXd ds = -(At * s - LtR * l_t + n.proj.q_tilde);
    Eigen::VectorXd dse = -(At * se - LtR * le_t);
    if (n.lin.C.rows() > 0) {
      dse -= (n.proj.C_tilde - L_t).transpose() * (n.cost.R * n.proj.e_tilde);
    }
    const double dsc = -(n.cost.q - l_t.dot(n.proj.R_tilde * l_t));

    Eigen::VectorXd dy(dim);
    dy.head(n_x * n_x) = Eigen::Map<const Eigen::VectorXd>(dS.data(), n_x * n_x);
    dy.segment(n_x * n_x, n_x) = ds;
    dy.segment(n_x * n_x + n_x, n_x) = dse;
    dy(dim - 1) = dsc;
    return dy;
  };

  // Re-symmetrize S after each accepted step; persistent drift means trouble.
  const PostStepHook symmetrize = [n_x](Eigen::VectorXd& y) {
    Eigen::Map<Eigen::MatrixXd> S(y.data(), n_x, n_x);
    const double drift = (S - S.transpose()).cwiseAbs().maxCoeff();
    if (drift > kAsymmetryTol) {
      throw std::runtime_error("solve_riccati: S asymmetry drift " + std::to_string(drift) +
                               " exceeds tolerance");
    }
    S = (0.5 * (S + S.transpose())).eval();
  };

  const Eigen::VectorXd y_tf = pack(data.terminal.Q, data.terminal.q_vec,
                                    Eigen::VectorXd::Zero(n_x), data.terminal.q);
  IntegrationResult r;
  try {
    r = integrate_adaptive(rhs, y_tf, data.grid.tf(), data.grid.t0(), settings, symmetrize);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(std::string("solve_riccati: backward pass failed: ") + err.what());
  }

  RiccatiSolution sol{TimeGrid({0.0, 1.0}), {}, {}, {}, {}};
  const std::size_t N = r.times.size();
  std::vector<double> times(N);
  sol.S.resize(N);
  sol.s.resize(N);
  sol.s_e.resize(N);
  sol.s_scalar.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t j = N - 1 - k;  // reverse to ascending time
    times[k] = r.times[j];
    const Eigen::VectorXd& y = r.values[j];
    sol.S[k] = Eigen::Map<const Eigen::MatrixXd>(y.data(), n_x, n_x);
    sol.s[k] = y.segment(n_x * n_x, n_x);
    sol.s_e[k] = y.segment(n_x * n_x + n_x, n_x);
    sol.s_scalar[k] = y(y.size() - 1);
  }
  sol.grid = TimeGrid(std::move(times));
  return sol;
}

RiccatiSolution::Value RiccatiSolution::at(double t) const {
  const auto b = grid.bracket(t);
  const double lam = b.lambda;
  return {lerp(S[b.index], S[b.index + 1], lam), lerp(s[b.index], s[b.index + 1], lam),
          lerp(s_e[b.index], s_e[b.index + 1], lam)};
}

ControllerUpdate controller_update(const LqProblemData& data, const RiccatiSolution& sol) {
  const std::size_t N = data.grid.size();
  const Eigen::Index n_u = data.nodes.front().lin.B.cols();

  ControllerUpdate up{data.grid, {}, {}, {}};
  up.L.resize(N);
  up.l.resize(N);
  up.l_e.resize(N);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_u, n_u);
  for (std::size_t k = 0; k < N; ++k) {
    const LqNode& n = data.nodes[k];
    const auto v = sol.at(data.grid[k]);
    Eigen::LLT<Eigen::MatrixXd> R_llt(n.cost.R);
    const Eigen::MatrixXd Bt = n.lin.B.transpose();
    const Eigen::MatrixXd L_t = R_llt.solve(n.cost.P.transpose() + Bt * v.S);
    const Eigen::VectorXd l_t = R_llt.solve(n.cost.r + Bt * v.s);
    const Eigen::VectorXd le_t = R_llt.solve(Bt * v.s_e);
    const Eigen::MatrixXd ImD = I - n.proj.D_tilde;
    up.L[k] = -ImD * L_t - n.proj.C_tilde;
    up.l[k] = -ImD * l_t;
    up.l_e[k] = -ImD * le_t - n.proj.e_tilde;
    if (n.lin.C.rows() > 0 && !n.proj.regularized) {
      up.max_constraint_gain_residual =
          std::max(up.max_constraint_gain_residual,
                   (n.lin.C + n.lin.D * up.L[k]).cwiseAbs().maxCoeff());
      up.max_feedforward_residual =
          std::max(up.max_feedforward_residual, (n.lin.D * up.l[k]).cwiseAbs().maxCoeff());
      up.max_restoration_residual =
          std::max(up.max_restoration_residual,
                   (n.lin.D * up.l_e[k] + n.lin.e).cwiseAbs().maxCoeff());
    }
  }
  return up;
}

}  // namespace cslq
