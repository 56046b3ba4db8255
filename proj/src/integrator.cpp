#include "hpsplines/integrator.hpp"

#include <cmath>
#include <string>

namespace hpsplines {

namespace {

constexpr double kBlowUpLimit = 1e12;

void check_sizes(const ProblemSpec& problem, const DualVector& mu0, const DualVector& mu1) {
  const int d = problem.group->dim();
  if (mu0.size() != d || mu1.size() != d) {
    throw std::invalid_argument("initial momenta must have the group dimension " +
                                std::to_string(d));
  }
}

// One step of the right-reduction scheme.  `problem` must be in core form.
std::pair<IntegratorState, AlgebraVector> core_step(const ProblemSpec& problem,
                                                    const IntegratorState& state) {
  const GroupDescriptor& group = *problem.group;
  const double h = problem.h;
  const AlgebraVector h_xi0 = h * state.xi0;

  const double step_len = h_xi0.norm();
  if (step_len > problem.cayley_radius) {
    throw NumericError("retraction step size exceeded at k = " + std::to_string(state.k) +
                       ": |h xi0| = " + std::to_string(step_len) + " > " +
                       std::to_string(problem.cayley_radius));
  }

  // Momentum transport with the node impulse folded in:
  //   mu0_{k+1} = (dtau_{-h xi0})^{-*} (dtau_{h xi0})^* (mu0_k + Delta_k).
  const DualVector impulse = node_force(problem, state.k, state.g);
  const RealMat d_plus_t = group.dtau_matrix(h_xi0).transpose();
  const RealMat d_minus_t = group.dtau_matrix(-h_xi0).transpose();
  const DualVector pushed = d_plus_t * (state.mu0 + impulse);
  const Eigen::PartialPivLU<RealMat> lu(d_minus_t);
  const DualVector mu0_next = lu.solve(pushed);
  if ((d_minus_t * mu0_next - pushed).norm() > 1e-9 * (1.0 + pushed.norm())) {
    throw NumericError("momentum transport solve is singular at k = " + std::to_string(state.k));
  }

  // Implicit velocity update: solve
  //   dl/dxi1 - h dl/dxi0 = mu1_k - h (dtau_{-h xi0})^* mu0_{k+1}
  // for xi1_k; the second-order momentum advances to dl/dxi1.
  const DualVector rhs = state.mu1 - h * (d_minus_t * mu0_next);
  auto [xi1, mu1_next] = problem.lagrangian.solve_step(group, state.xi0, rhs, h);

  IntegratorState next;
  next.g = group.cayley(h_xi0) * state.g;
  next.xi0 = state.xi0 + h * xi1;
  next.mu0 = mu0_next;
  next.mu1 = mu1_next;
  next.k = state.k + 1;

  if (next.xi0.norm() > kBlowUpLimit || next.mu0.norm() > kBlowUpLimit ||
      next.mu1.norm() > kBlowUpLimit) {
    throw NumericError("trajectory blow-up at k = " + std::to_string(next.k));
  }
  return {next, xi1};
}

}  // namespace

//------------------------------------------------------------------------------
// Convention rewriting
//------------------------------------------------------------------------------

IntegratorState to_core_state(const ProblemSpec& problem, const IntegratorState& state) {
  if (problem.core_form()) return state;
  IntegratorState out;
  out.g = state.g.inverse();
  out.xi0 = -state.xi0;
  out.mu0 = -state.mu0;
  out.mu1 = -state.mu1;
  out.k = state.k;
  return out;
}

DiscretePath to_core_path(const ProblemSpec& problem, const DiscretePath& path) {
  if (problem.core_form()) return path;
  DiscretePath out;
  out.states.reserve(path.states.size());
  for (const IntegratorState& s : path.states) {
    out.states.push_back(to_core_state(problem, s));
  }
  out.xi1.reserve(path.xi1.size());
  for (const AlgebraVector& v : path.xi1) {
    out.xi1.push_back(-v);
  }
  return out;
}

//------------------------------------------------------------------------------
// Integration
//------------------------------------------------------------------------------

IntegratorState initial_state(const ProblemSpec& problem, const DualVector& mu0,
                              const DualVector& mu1) {
  check_sizes(problem, mu0, mu1);
  IntegratorState s;
  s.g = problem.group->identity();
  s.xi0 = problem.xi0_initial;
  s.mu0 = mu0;
  s.mu1 = mu1;
  s.k = 0;
  return s;
}

std::pair<IntegratorState, AlgebraVector> step(const ProblemSpec& problem,
                                               const IntegratorState& state) {
  if (problem.core_form()) {
    return core_step(problem, state);
  }
  const ProblemSpec core = problem.core();
  auto [next, xi1] = core_step(core, to_core_state(problem, state));
  IntegratorState back = to_core_state(problem, next);  // the rewrite is an involution
  return {back, AlgebraVector(-xi1)};
}

DiscretePath integrate(const ProblemSpec& problem, const DualVector& mu0, const DualVector& mu1) {
  check_sizes(problem, mu0, mu1);
  const bool flipped = !problem.core_form();
  const ProblemSpec core = flipped ? problem.core() : problem;

  DiscretePath path;
  path.states.reserve(problem.steps + 1);
  path.xi1.reserve(problem.steps);
  IntegratorState s = initial_state(core, flipped ? DualVector(-mu0) : mu0,
                                    flipped ? DualVector(-mu1) : mu1);
  path.states.push_back(s);
  for (int k = 0; k < problem.steps; ++k) {
    auto [next, xi1] = core_step(core, s);
    path.states.push_back(next);
    path.xi1.push_back(xi1);
    s = next;
  }
  // to_core_path is an involution, so it also maps core results back into the
  // problem's own convention.
  return flipped ? to_core_path(problem, path) : path;
}

//------------------------------------------------------------------------------
// Functionals and diagnostics
//------------------------------------------------------------------------------

double discrete_action(const ProblemSpec& problem, const DiscretePath& path) {
  const ProblemSpec core = problem.core();
  const DiscretePath cpath = to_core_path(problem, path);
  if (cpath.steps() != problem.steps) {
    throw std::invalid_argument("discrete_action: path length does not match the problem");
  }
  double action = 0.0;
  for (int k = 0; k < core.steps; ++k) {
    action += core.h * core.lagrangian.value(*core.group, cpath.states[k].xi0, cpath.xi1[k]);
  }
  for (const ScheduleEntry& e : core.schedule.entries) {
    action += node_penalty(core, e.node, cpath.states[e.node].g);
  }
  return action;
}

double shooting_cost(const ProblemSpec& problem, const DualVector& mu0, const DualVector& mu1) {
  return discrete_action(problem, integrate(problem, mu0, mu1));
}

DualVector spatial_momentum(const ProblemSpec& problem, const IntegratorState& state) {
  const IntegratorState s = to_core_state(problem, state);
  return problem.group->Ad_star(s.g, s.mu0);
}

std::pair<double, double> terminal_residuals(const ProblemSpec& problem, const DiscretePath& path) {
  const ProblemSpec core = problem.core();
  const DiscretePath cpath = to_core_path(problem, path);
  const IntegratorState& last = cpath.states.back();
  const DualVector impulse = node_force(core, last.k, last.g);
  return {(last.mu0 + impulse).norm(), last.mu1.norm()};
}

std::vector<MomentumRow> momentum_report(const ProblemSpec& problem, const DiscretePath& path) {
  const ProblemSpec core = problem.core();
  const DiscretePath cpath = to_core_path(problem, path);
  const int n = cpath.steps();

  std::vector<DualVector> spatial(n + 1);
  for (int k = 0; k <= n; ++k) {
    spatial[k] = core.group->Ad_star(cpath.states[k].g, cpath.states[k].mu0);
  }

  std::vector<MomentumRow> rows(n + 1);
  for (int k = 0; k <= n; ++k) {
    MomentumRow& row = rows[k];
    row.k = k;
    row.t = k * core.h;
    row.mu0_norm = cpath.states[k].mu0.norm();
    row.mu1_norm = cpath.states[k].mu1.norm();
    row.spatial = spatial[k];
    row.spatial_norm = spatial[k].norm();
    row.is_node = core.schedule.is_node(k);
    if (k < n) {
      const DualVector impulse = node_force(core, k, cpath.states[k].g);
      const DualVector transported = core.group->Ad_star(cpath.states[k].g, impulse);
      row.jump_residual = (spatial[k + 1] - spatial[k] - transported).norm();
    }
  }
  return rows;
}

std::vector<double> target_distances(const ProblemSpec& problem, const DiscretePath& path) {
  std::vector<double> out;
  out.reserve(problem.schedule.entries.size());
  for (const ScheduleEntry& e : problem.schedule.entries) {
    const ObjectPoint q = problem.object_at(path.states[e.node].g);
    out.push_back(problem.manifold->distance(q, e.target));
  }
  return out;
}

}  // namespace hpsplines
