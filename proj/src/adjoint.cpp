#include "hpsplines/adjoint.hpp"

#include <cmath>
#include <string>

namespace hpsplines {

bool adjoint_available(const ProblemSpec& problem) {
  const ProblemSpec core = problem.core();
  return core.action_side == ActionSide::Left &&
         core.lagrangian.kind() == LagrangianSpec::Kind::SquaredVelocity;
}

DualVector kappa_kernel(const GroupDescriptor& group, double s, const AlgebraVector& xi,
                        const DualVector& mu, const AlgebraVector& V) {
  const int n = group.matrix_dim();
  const Mat eye = Mat::Identity(n, n);
  const Mat x = group.to_matrix(xi);
  const Eigen::PartialPivLU<Mat> lu_a(eye + 0.5 * s * x);
  const Eigen::PartialPivLU<Mat> lu_bt((eye - 0.5 * s * x).transpose());
  const auto right_div_b = [&lu_bt](const Mat& m) {
    return Mat(lu_bt.solve(m.transpose()).transpose());
  };
  const Mat w = right_div_b(lu_a.solve(group.to_matrix(V)));

  DualVector out(group.dim());
  for (int j = 0; j < group.dim(); ++j) {
    const Mat& e = group.basis_matrix(j);
    const Mat deriv = 0.5 * s * (w * right_div_b(e) - lu_a.solve(e) * w);
    double residual = 0.0;
    out[j] = mu.dot(group.from_matrix(deriv, &residual));
    if (residual > 1e-8 * (1.0 + deriv.norm())) {
      throw NumericError("kappa_kernel: derivative left the algebra of " + group.name());
    }
  }
  return out;
}

AdjointSeries backward_pass(const ProblemSpec& problem, const DiscretePath& path) {
  if (!adjoint_available(problem)) {
    throw std::invalid_argument(
        "backward_pass: exact adjoint requires a squared-velocity Lagrangian with the "
        "group acting on the left; use fd_gradient");
  }
  const ProblemSpec core = problem.core();
  const DiscretePath cpath = to_core_path(problem, path);
  const int n = cpath.steps();
  if (n != core.steps || static_cast<int>(cpath.states.size()) != n + 1) {
    throw std::invalid_argument("backward_pass: path length does not match the problem");
  }
  const GroupDescriptor& group = *core.group;
  const MetricOperator& metric = core.metric();
  const double h = core.h;

  const auto xi0 = [&cpath](int k) -> const AlgebraVector& { return cpath.states[k].xi0; };
  const auto mu0 = [&cpath](int k) -> const DualVector& { return cpath.states[k].mu0; };
  const auto mu1 = [&cpath](int k) -> const DualVector& { return cpath.states[k].mu1; };

  AdjointSeries adj;
  adj.P0.assign(n + 1, DualVector::Zero(group.dim()));
  adj.P1.assign(n + 1, DualVector::Zero(group.dim()));
  adj.V0.assign(n + 1, AlgebraVector::Zero(group.dim()));
  adj.V1.assign(n + 1, AlgebraVector::Zero(group.dim()));

  // Terminal values.  The final node force seeds P0; the final second-order
  // momentum seeds V0.
  const DualVector delta_n = node_force(core, n, cpath.states[n].g);
  adj.P0[n] = -(1.0 / h) * group.dtau_star(-h * xi0(n - 1), delta_n);
  adj.P1[n].setZero();
  adj.V0[n] = -metric.sharp(mu1(n));
  adj.V1[n] = -h * adj.V0[n];

  for (int k = n - 1; k >= 1; --k) {
    const AlgebraVector h_xi_k = h * xi0(k);
    const AlgebraVector h_xi_prev = h * xi0(k - 1);
    const DualVector delta_k = node_force(core, k, cpath.states[k].g);

    // P0 recursion; the penalty derivative term enters only at nodes.
    DualVector inner = group.dtau_inv_star(h_xi_k, adj.P0[k + 1]);
    if (core.schedule.is_node(k)) {
      const ObjectPoint q = core.manifold->act(cpath.states[k].g, core.schedule.initial);
      const AlgebraVector rho = group.dtau(h_xi_k, adj.V1[k + 1]);
      inner += core.manifold->penalty_force_derivative(group, q, *core.schedule.target(k),
                                                       core.sigma, rho);
      inner -= (1.0 / h) * delta_k;
    }
    adj.P0[k] = group.dtau_star(-h_xi_prev, inner);

    // P1 recursion with the retraction-derivative kernels.
    adj.P1[k] = adj.P1[k + 1] + h * adj.P0[k + 1] -
                h * kappa_kernel(group, -h, xi0(k), mu0(k + 1), adj.V0[k + 1]) -
                kappa_kernel(group, -h, xi0(k), mu0(k + 1), adj.V1[k + 1]) +
                kappa_kernel(group, h, xi0(k), mu0(k) + delta_k, adj.V1[k + 1]);

    // Velocity multipliers.
    adj.V0[k] = adj.V0[k + 1] - metric.sharp(mu1(k)) + h * metric.sharp(adj.P1[k]);
    adj.V1[k] = -h * adj.V0[k] +
                group.dtau_inv(-h_xi_prev, group.dtau(h_xi_k, adj.V1[k + 1]));
  }
  return adj;
}

std::pair<DualVector, DualVector> adjoint_gradient(const ProblemSpec& problem,
                                                   const DiscretePath& path) {
  const ProblemSpec core = problem.core();
  const DiscretePath cpath = to_core_path(problem, path);
  const AdjointSeries adj = backward_pass(problem, path);
  const double h = core.h;
  DualVector g_mu0 = -h * core.group->dtau(h * cpath.states[0].xi0, adj.V1[1]);
  DualVector g_mu1 = -h * adj.V0[1];
  if (!problem.core_form()) {
    // The rewrite negates the momenta, so gradients pick up a sign.
    g_mu0 = -g_mu0;
    g_mu1 = -g_mu1;
  }
  return {g_mu0, g_mu1};
}

std::pair<DualVector, DualVector> adjoint_gradient(const ProblemSpec& problem,
                                                   const DualVector& mu0,
                                                   const DualVector& mu1) {
  return adjoint_gradient(problem, integrate(problem, mu0, mu1));
}

std::pair<DualVector, DualVector> fd_gradient(const ProblemSpec& problem, const DualVector& mu0,
                                              const DualVector& mu1, double eps) {
  const int d = problem.group->dim();
  if (mu0.size() != d || mu1.size() != d) {
    throw std::invalid_argument("fd_gradient: momentum size mismatch");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("fd_gradient: eps must be positive");
  }
  DualVector g0(d), g1(d);
  for (int j = 0; j < d; ++j) {
    const double step = eps * std::max(1.0, std::abs(mu0[j]));
    DualVector plus = mu0, minus = mu0;
    plus[j] += step;
    minus[j] -= step;
    g0[j] = (shooting_cost(problem, plus, mu1) - shooting_cost(problem, minus, mu1)) /
            (2.0 * step);
  }
  for (int j = 0; j < d; ++j) {
    const double step = eps * std::max(1.0, std::abs(mu1[j]));
    DualVector plus = mu1, minus = mu1;
    plus[j] += step;
    minus[j] -= step;
    g1[j] = (shooting_cost(problem, mu0, plus) - shooting_cost(problem, mu0, minus)) /
            (2.0 * step);
  }
  return {g0, g1};
}

}  // namespace hpsplines
