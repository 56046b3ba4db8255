#include "hpsplines/continuous.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

namespace hpsplines {

namespace {

constexpr double kBlowUpLimit = 1e12;

struct AlgebraState {
  AlgebraVector xi0;
  DualVector mu0;
  DualVector mu1;
};

// Reduced flow in core (right-reduction) variables:
//   dxi0 = xi1,  dmu0 = -ad^*_{xi0} mu0,  dmu1 = -mu0 + dl/dxi0.
AlgebraState algebra_rhs(const ProblemSpec& core, const AlgebraState& y) {
  const GroupDescriptor& group = *core.group;
  const AlgebraVector xi1 = core.lagrangian.legendre_inverse(group, y.xi0, y.mu1);
  AlgebraState dy;
  dy.xi0 = xi1;
  dy.mu0 = -group.ad_star(y.xi0, y.mu0);
  dy.mu1 = -y.mu0 + core.lagrangian.d_xi0(group, y.xi0, xi1);
  return dy;
}

AlgebraState axpy(const AlgebraState& y, double a, const AlgebraState& d) {
  return AlgebraState{y.xi0 + a * d.xi0, y.mu0 + a * d.mu0, y.mu1 + a * d.mu1};
}

AlgebraState rk4_step(const ProblemSpec& core, const AlgebraState& y, double h) {
  const AlgebraState k1 = algebra_rhs(core, y);
  const AlgebraState k2 = algebra_rhs(core, axpy(y, 0.5 * h, k1));
  const AlgebraState k3 = algebra_rhs(core, axpy(y, 0.5 * h, k2));
  const AlgebraState k4 = algebra_rhs(core, axpy(y, h, k3));
  AlgebraState out = y;
  out.xi0 += (h / 6.0) * (k1.xi0 + 2.0 * k2.xi0 + 2.0 * k3.xi0 + k4.xi0);
  out.mu0 += (h / 6.0) * (k1.mu0 + 2.0 * k2.mu0 + 2.0 * k3.mu0 + k4.mu0);
  out.mu1 += (h / 6.0) * (k1.mu1 + 2.0 * k2.mu1 + 2.0 * k3.mu1 + k4.mu1);
  return out;
}

// One macro step of size h: the algebra variables advance by two half RK4
// steps and the group element by the exponential of the fourth-order
// commutator quadrature of xi0-hat sampled at start, midpoint, and end.
void macro_step(const ProblemSpec& core, AlgebraState& y, Mat& g, double h) {
  const GroupDescriptor& group = *core.group;
  const AlgebraState y_half = rk4_step(core, y, 0.5 * h);
  const AlgebraState y_next = rk4_step(core, y_half, 0.5 * h);
  const Mat a1 = group.to_matrix(y.xi0);
  const Mat a2 = group.to_matrix(y_half.xi0);
  const Mat a3 = group.to_matrix(y_next.xi0);
  const Mat omega =
      (h / 6.0) * (a1 + 4.0 * a2 + a3) - (h * h / 12.0) * (a1 * a3 - a3 * a1);
  g = omega.exp() * g;
  y = y_next;
  if (y.xi0.norm() > kBlowUpLimit || y.mu0.norm() > kBlowUpLimit ||
      y.mu1.norm() > kBlowUpLimit) {
    throw NumericError("continuous reference blow-up");
  }
}

// Integrates the core problem from t_start to t_end with steps of at most
// h_ref.
void run_segment(const ProblemSpec& core, AlgebraState& y, Mat& g, double t_start, double t_end,
                 double h_ref) {
  const double len = t_end - t_start;
  if (len <= 0.0) return;
  const int n = std::max(1, static_cast<int>(std::ceil(len / h_ref - 1e-12)));
  const double h = len / n;
  for (int i = 0; i < n; ++i) {
    macro_step(core, y, g, h);
  }
}

}  // namespace

ContinuousState continuous_initial(const ProblemSpec& problem, const DualVector& mu0,
                                   const DualVector& mu1) {
  const int d = problem.group->dim();
  if (mu0.size() != d || mu1.size() != d) {
    throw std::invalid_argument("continuous_initial: momentum size mismatch");
  }
  ContinuousState s;
  s.g = problem.group->identity();
  s.xi0 = problem.xi0_initial;
  s.mu0 = mu0;
  s.mu1 = mu1;
  s.t = 0.0;
  return s;
}

ContinuousRhs continuous_rhs(const ProblemSpec& problem, const ContinuousState& state) {
  const GroupDescriptor& group = *problem.group;
  const AlgebraVector xi1 = problem.lagrangian.legendre_inverse(group, state.xi0, state.mu1);
  ContinuousRhs rhs;
  rhs.dxi0 = xi1;
  rhs.dmu1 = -state.mu0 + problem.lagrangian.d_xi0(group, state.xi0, xi1);
  const Mat xhat = group.to_matrix(state.xi0);
  if (problem.core_form()) {
    rhs.dmu0 = -group.ad_star(state.xi0, state.mu0);
    rhs.dg = xhat * state.g.matrix;
  } else {
    // Left reduction: the transport term changes sign and the group velocity
    // attaches on the right.
    rhs.dmu0 = group.ad_star(state.xi0, state.mu0);
    rhs.dg = state.g.matrix * xhat;
  }
  return rhs;
}

ContinuousState integrate_continuous(const ProblemSpec& problem, const DualVector& mu0,
                                     const DualVector& mu1, double h_ref) {
  if (!(h_ref > 0.0)) {
    throw std::invalid_argument("integrate_continuous: h_ref must be positive");
  }
  const bool flipped = !problem.core_form();
  const ProblemSpec core = problem.core();

  AlgebraState y{core.xi0_initial, flipped ? DualVector(-mu0) : mu0,
                 flipped ? DualVector(-mu1) : mu1};
  Mat g = Mat::Identity(core.group->matrix_dim(), core.group->matrix_dim());

  double t = 0.0;
  for (const ScheduleEntry& e : core.schedule.entries) {
    const double t_node = e.node * core.h;
    if (t_node >= core.total_time()) break;  // final-node impulse is not applied
    run_segment(core, y, g, t, t_node, h_ref);
    t = t_node;
    y.mu0 += node_force(core, e.node, GroupElement{core.group, g});
  }
  run_segment(core, y, g, t, core.total_time(), h_ref);

  ContinuousState out;
  out.g = GroupElement{problem.group, flipped ? core.group->inverse_matrix(g) : g};
  out.xi0 = flipped ? AlgebraVector(-y.xi0) : y.xi0;
  out.mu0 = flipped ? DualVector(-y.mu0) : y.mu0;
  out.mu1 = flipped ? DualVector(-y.mu1) : y.mu1;
  out.t = core.total_time();
  return out;
}

ConvergenceStudy convergence_study(const ProblemSpec& problem, const DualVector& mu0,
                                   const DualVector& mu1, const std::vector<double>& h_list) {
  if (!problem.schedule.entries.empty()) {
    throw ConfigError("convergence study requires an empty target schedule");
  }
  if (h_list.empty()) {
    throw ConfigError("convergence study needs at least one step size");
  }
  const double T = problem.total_time();
  double h_min = h_list.front();
  for (double h : h_list) {
    if (!(h > 0.0)) throw ConfigError("convergence study step sizes must be positive");
    h_min = std::min(h_min, h);
  }
  const ContinuousState ref = integrate_continuous(problem, mu0, mu1, h_min / 100.0);

  ConvergenceStudy study;
  for (double h : h_list) {
    const double steps_exact = T / h;
    const int steps = static_cast<int>(std::lround(steps_exact));
    if (steps < 1 || std::abs(steps_exact - steps) > 1e-9 * std::max(1.0, steps_exact)) {
      throw ConfigError("step size " + std::to_string(h) + " does not divide the final time " +
                        std::to_string(T));
    }
    ProblemSpec variant = problem;
    variant.h = h;
    variant.steps = steps;
    const DiscretePath path = integrate(variant, mu0, mu1);
    const IntegratorState& last = path.states.back();
    const double error = (last.g.matrix - ref.g.matrix).norm() + (last.xi0 - ref.xi0).norm() +
                         (last.mu0 - ref.mu0).norm() + (last.mu1 - ref.mu1).norm();
    if (!std::isfinite(error)) {
      throw NumericError("convergence study produced a non-finite error");
    }
    study.points.push_back({h, error});
  }

  // Least-squares slope of log(error) on log(h).
  const int n = static_cast<int>(study.points.size());
  if (n == 1) {
    study.fitted_order = 0.0;
    return study;
  }
  double sx = 0.0, sy = 0.0;
  for (const ConvergencePoint& p : study.points) {
    if (!(p.error > 0.0)) {
      throw NumericError("convergence study error vanished; cannot fit an order");
    }
    sx += std::log(p.h);
    sy += std::log(p.error);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const ConvergencePoint& p : study.points) {
    const double dx = std::log(p.h) - mx;
    sxy += dx * (std::log(p.error) - my);
    sxx += dx * dx;
  }
  study.fitted_order = sxy / sxx;
  return study;
}

}  // namespace hpsplines
