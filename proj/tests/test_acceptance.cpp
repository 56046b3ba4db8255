/// @file test_acceptance.cpp
/// @brief Acceptance runner: one PASS/FAIL line per criterion.
///
/// Each criterion is evaluated with its tolerance pinned in code; the process
/// exit status is the number of failed criteria.  Criteria that quantify over
/// problem instances use fixed seeds, so every run checks the same instances.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "hpsplines/adjoint.hpp"
#include "hpsplines/config.hpp"
#include "hpsplines/continuous.hpp"
#include "hpsplines/integrator.hpp"
#include "hpsplines/optimizer.hpp"
#include "oracles.hpp"

using namespace hpsplines;
using namespace hpsplines::testing;

namespace {

int g_failures = 0;

void report(int index, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", index, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// The three non-abelian test-problem families, by factory.
std::vector<std::pair<std::string, ProblemSpec>> conservation_instances() {
  std::vector<std::pair<std::string, ProblemSpec>> out;
  auto rng = make_rng(9101);
  for (int i = 0; i < 5; ++i) out.emplace_back("so3", random_sphere_problem(rng, 30, 3, 0.4));
  for (int i = 0; i < 5; ++i) out.emplace_back("se3", random_se3_problem(rng, 30, 3, 0.4));
  for (int i = 0; i < 5; ++i) out.emplace_back("su2", random_su2_problem(rng, 30, 3, 0.4));
  return out;
}

/// Translation-group instance on the line, node-free or soft-constrained.
/// Its line search bottoms out near grad 7e-11, deep enough to certify the
/// 1e-8 bounds below; the 2-d translation instances stall around 1e-8.
ProblemSpec abelian_line_problem(bool with_targets) {
  ProblemSpec p;
  p.group = &GroupDescriptor::abelian(1);
  p.manifold = &Manifold::euclidean(1);
  p.lagrangian = LagrangianSpec::squared_velocity(MetricOperator::identity(1));
  CVec origin(1);
  origin << 0.0;
  p.schedule.initial = p.manifold->make_point(origin);
  if (with_targets) {
    CVec t1(1), t2(1);
    t1 << 0.35;
    t2 << -0.2;
    p.schedule.entries = {{5, p.manifold->make_point(t1)},
                          {10, p.manifold->make_point(t2)}};
  }
  p.sigma = with_targets ? 0.3 : 0.5;
  p.h = 0.1;
  p.steps = 10;
  p.xi0_initial = AlgebraVector::Zero(1);
  if (with_targets) p.xi0_initial[0] = 0.1;
  p.validate();
  return p;
}

/// Penalty impulse at a node, assembled from the manifold primitives
/// (1/sigma^2) J^Q(d * d1 d) rather than through the integrator's own helper.
DualVector manual_impulse(const ProblemSpec& core, const GroupElement& g,
                          const ObjectPoint& target) {
  const ObjectPoint q = core.object_at(g);
  const CVec graded = core.manifold->d_times_d1_distance(q, target);
  const DualVector jq = core.manifold->momentum_map(*core.group, q, graded);
  return jq / (core.sigma * core.sigma);
}

//---------------------------------------------------------------------------
// 1. Interior conservation of the spatial momentum.
//---------------------------------------------------------------------------
void criterion1() {
  auto rng = make_rng(9102);
  double worst = 0.0;
  for (auto& [label, p] : conservation_instances()) {
    const auto [mu0, mu1] = feasible_momenta(p, rng);
    const DiscretePath path = to_core_path(p, integrate(p, mu0, mu1));
    const ProblemSpec core = p.core();
    for (int k = 0; k < core.steps; ++k) {
      if (core.schedule.is_node(k)) continue;
      const DualVector ja = core.group->Ad_star(path.states[k].g, path.states[k].mu0);
      const DualVector jb = core.group->Ad_star(path.states[k + 1].g, path.states[k + 1].mu0);
      worst = std::max(worst, (jb - ja).norm() / (1.0 + path.states[k].mu0.norm()));
    }
  }
  report(1, worst <= 1e-12,
         "interior spatial-momentum drift max " + fmt(worst) +
             " (bound 1e-12, so3/se3/su2 random paths)");
}

//---------------------------------------------------------------------------
// 2. Node-jump identity.
//---------------------------------------------------------------------------
void criterion2() {
  auto rng = make_rng(9103);
  double worst = 0.0;
  int nodes_checked = 0;
  for (auto& [label, p] : conservation_instances()) {
    const auto [mu0, mu1] = feasible_momenta(p, rng);
    const DiscretePath path = to_core_path(p, integrate(p, mu0, mu1));
    const ProblemSpec core = p.core();
    for (const ScheduleEntry& e : core.schedule.entries) {
      const int k = e.node;
      if (k >= core.steps) continue;  // the final impulse has no successor index
      const GroupElement& g = path.states[k].g;
      const DualVector ja = core.group->Ad_star(g, path.states[k].mu0);
      const DualVector jb =
          core.group->Ad_star(path.states[k + 1].g, path.states[k + 1].mu0);
      const DualVector expected = core.group->Ad_star(g, manual_impulse(core, g, e.target));
      worst = std::max(worst, (jb - ja - expected).norm() / (1.0 + expected.norm()));
      ++nodes_checked;
    }
  }
  report(2, worst <= 1e-12 && nodes_checked > 0,
         "node jump vs transported penalty impulse, defect max " + fmt(worst) + " over " +
             std::to_string(nodes_checked) + " nodes (bound 1e-12)");
}

//---------------------------------------------------------------------------
// 3. Adjoint gradient against central finite differences.
//---------------------------------------------------------------------------
void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  auto rng = make_rng(9104);
  double worst = 0.0;
  const auto check = [&](ProblemSpec& p) {
    const auto [mu0, mu1] = feasible_momenta(p, rng);
    const auto [a0, a1] = adjoint_gradient(p, mu0, mu1);
    const auto [f0, f1] = fd_gradient(p, mu0, mu1);
    Vec a(a0.size() + a1.size()), f(f0.size() + f1.size());
    a << a0, a1;
    f << f0, f1;
    worst = std::max(worst, rel_l2(a, f));
  };
  for (int i = 0; i < 25; ++i) {
    ProblemSpec p = random_sphere_problem(rng, 40, 2 + (i % 3), 0.4);
    check(p);
  }
  for (int i = 0; i < 10; ++i) {
    ProblemSpec p = random_su2_problem(rng, 40, 2 + (i % 3), 0.4);
    check(p);
  }
  const double secs = seconds_since(t0);
  report(3, worst <= 1e-5 && secs < 60.0,
         "adjoint vs finite differences, relative l2 max " + fmt(worst) +
             " over 25 sphere + 10 projective problems (bound 1e-5), " + fmt(secs) + " s");
}

//---------------------------------------------------------------------------
// 4. Optimality certificates at converged optima.
//---------------------------------------------------------------------------

struct ConvergedRun {
  std::string label;
  ProblemSpec problem;
  OptimResult result;
  bool converged;
};

std::vector<ConvergedRun> converged_runs() {
  std::vector<ConvergedRun> runs;

  const RunConfig sphere_cfg = load_config("configs/sphere_spline.json");
  for (const auto& [sigma, tol] : std::vector<std::pair<double, double>>{
           {0.25, 1e-7}, {0.5, 1e-9}}) {
    ProblemSpec p = sphere_cfg.problem;
    p.sigma = sigma;
    OptimizerConfig oc;
    oc.grad_tol = tol;
    oc.max_iters = 20000;
    OptimResult r = descend(p, oc, DualVector::Zero(3), DualVector::Zero(3));
    runs.push_back({"sphere sigma=" + fmt(sigma), std::move(p), std::move(r), false});
    runs.back().converged = runs.back().result.converged;
  }

  ProblemSpec abelian = abelian_line_problem(true);
  OptimizerConfig oc;
  oc.grad_tol = 1e-10;
  oc.max_iters = 20000;
  OptimResult r = descend(abelian, oc, DualVector::Zero(1), DualVector::Zero(1));
  runs.push_back({"abelian line", std::move(abelian), std::move(r), false});
  runs.back().converged = runs.back().result.converged;
  return runs;
}

void criterion4() {
  double worst_mu1 = 0.0;
  double worst_terminal = 0.0;
  double worst_isotropy = 0.0;
  bool all_converged = true;
  std::string labels;
  for (const ConvergedRun& run : converged_runs()) {
    labels += (labels.empty() ? "" : ", ") + run.label;
    if (!run.converged) {
      all_converged = false;
      continue;
    }
    const ProblemSpec core = run.problem.core();
    const DiscretePath path = to_core_path(run.problem, run.result.path);
    const IntegratorState& last = path.states.back();

    worst_mu1 = std::max(worst_mu1, last.mu1.norm());
    const ObjectPoint& target = core.schedule.entries.back().target;
    const DualVector impulse = manual_impulse(core, last.g, target);
    worst_terminal = std::max(worst_terminal, (last.mu0 + impulse).norm());

    for (int k = 0; k <= core.steps; ++k) {
      const ObjectPoint q = core.object_at(path.states[k].g);
      const RealMat iso = isotropy_basis(*core.group, *core.manifold, q);
      for (int j = 0; j < iso.cols(); ++j) {
        worst_isotropy =
            std::max(worst_isotropy, std::abs(path.states[k].mu0.dot(iso.col(j))));
      }
    }
  }
  const bool pass = all_converged && worst_mu1 <= 1e-6 && worst_terminal <= 1e-6 &&
                    worst_isotropy <= 1e-6;
  report(4, pass,
         "optimality certificates at converged optima (" + labels + "): |mu1_N| max " +
             fmt(worst_mu1) + ", |mu0_N + impulse| max " + fmt(worst_terminal) +
             ", isotropy pairing max " + fmt(worst_isotropy) + " (bounds 1e-6)" +
             (all_converged ? "" : "; a run did not converge"));
}

//---------------------------------------------------------------------------
// 5. Closed-form momentum reconstruction along converged optima.
//---------------------------------------------------------------------------
void criterion5() {
  double worst = 0.0;
  bool all_converged = true;
  std::string labels;
  for (const ConvergedRun& run : converged_runs()) {
    // The loose-tolerance run (grad 1e-7) cannot certify a 1e-8 reconstruction;
    // use only the runs converged to 1e-9 or better.
    if (run.problem.sigma == 0.25) continue;
    labels += (labels.empty() ? "" : ", ") + run.label;
    if (!run.converged) {
      all_converged = false;
      continue;
    }
    const ProblemSpec core = run.problem.core();
    const DiscretePath path = to_core_path(run.problem, run.result.path);

    // Spatial picture of every node impulse.
    std::vector<int> nodes;
    std::vector<DualVector> impulses;
    for (const ScheduleEntry& e : core.schedule.entries) {
      const GroupElement& g = path.states[e.node].g;
      nodes.push_back(e.node);
      impulses.push_back(core.group->Ad_star(g, manual_impulse(core, g, e.target)));
    }
    // mu0_k reconstructed as the pulled-back sum of impulses still ahead.
    for (int k = 0; k <= core.steps; ++k) {
      DualVector sum = DualVector::Zero(core.group->dim());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] >= k) sum += impulses[i];
      }
      const DualVector recon = -core.group->Ad_star(path.states[k].g.inverse(), sum);
      worst = std::max(worst, (recon - path.states[k].mu0).norm() /
                                  (1.0 + path.states[k].mu0.norm()));
    }
  }
  report(5, worst <= 1e-8 && all_converged,
         "future-impulse reconstruction of mu0 (" + labels + "), defect max " + fmt(worst) +
             " (bound 1e-8)" + (all_converged ? "" : "; a run did not converge"));
}

//---------------------------------------------------------------------------
// 6. Sphere showcase: tight sigma, four targets, homotopy.
//---------------------------------------------------------------------------
void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config("configs/sphere_spline.json");
  const ProblemSpec& p = cfg.problem;

  const OptimResult r = homotopy_solve(p, cfg.optimizer);
  const double secs = seconds_since(t0);

  double worst_distance = 0.0;
  for (double d : target_distances(p, r.path)) worst_distance = std::max(worst_distance, d);

  // Identity inertia: |mu0| must be flat between nodes.
  const DiscretePath path = to_core_path(p, r.path);
  const ProblemSpec core = p.core();
  double worst_flat = 0.0;
  for (int k = 0; k < core.steps; ++k) {
    if (core.schedule.is_node(k)) continue;
    const double a = path.states[k].mu0.norm();
    const double b = path.states[k + 1].mu0.norm();
    worst_flat = std::max(worst_flat, std::abs(b - a) / (1.0 + a));
  }

  const bool pass = r.converged && worst_distance <= 0.1 && worst_flat <= 1e-10 &&
                    secs < 300.0 && p.schedule.entries.size() >= 4;
  report(6, pass,
         std::string("sphere showcase sigma=0.025: converged=") +
             (r.converged ? "true" : "false") + ", max target distance " +
             fmt(worst_distance) + " (bound 0.1), |mu0| flatness defect " + fmt(worst_flat) +
             " (bound 1e-10), " + fmt(secs) + " s (bound 300)");
}

//---------------------------------------------------------------------------
// 7. Convergence order of the discrete scheme.
//---------------------------------------------------------------------------
void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load_config("configs/convergence.json");
  DualVector mu0(3), mu1(3);
  mu0 << 0.15, -0.3, 0.2;
  mu1 << -0.1, 0.25, 0.05;
  const std::vector<double> h_list = {0.1, 0.05, 0.025, 0.0125};
  const ConvergenceStudy study = convergence_study(cfg.problem, mu0, mu1, h_list);
  bool monotone = true;
  for (std::size_t i = 1; i < study.points.size(); ++i) {
    if (!(study.points[i].error < study.points[i - 1].error)) monotone = false;
  }
  const double secs = seconds_since(t0);
  const bool pass = monotone && study.fitted_order >= 0.8 && study.fitted_order <= 2.2 &&
                    secs < 60.0;
  std::string errors;
  for (const ConvergencePoint& pt : study.points) errors += " " + fmt(pt.error);
  report(7, pass,
         "endpoint errors" + errors + " over h = 0.1 .. 0.0125, " +
             std::string(monotone ? "monotone" : "NOT monotone") + ", fitted order " +
             fmt(study.fitted_order) + " (band [0.8, 2.2])");
}

//---------------------------------------------------------------------------
// 8. Abelian symplecticity and quadratic-program equivalence.
//---------------------------------------------------------------------------
void criterion8() {
  // Node-free instance for the one-step map.
  const ProblemSpec p = abelian_line_problem(false);
  const GroupDescriptor& group = *p.group;

  // One-step map z = (g, xi0, mu0, mu1) -> z' probed by central differences.
  const auto advance = [&](const Vec& z) -> Vec {
    IntegratorState s;
    s.g = group.cayley((AlgebraVector(1) << z[0]).finished());
    s.xi0 = (AlgebraVector(1) << z[1]).finished();
    s.mu0 = (DualVector(1) << z[2]).finished();
    s.mu1 = (DualVector(1) << z[3]).finished();
    s.k = 2;
    const auto [next, xi1] = step(p, s);
    Vec out(4);
    out << group.cayley_inv(next.g)[0], next.xi0[0], next.mu0[0], next.mu1[0];
    return out;
  };

  Vec z0(4);
  z0 << 0.3, -0.2, 0.15, 0.4;
  const double eps = 0.05;
  RealMat jacobian(4, 4);
  for (int j = 0; j < 4; ++j) {
    Vec zp = z0, zm = z0;
    zp[j] += eps;
    zm[j] -= eps;
    jacobian.col(j) = (advance(zp) - advance(zm)) / (2.0 * eps);
  }
  RealMat omega = RealMat::Zero(4, 4);
  omega(0, 2) = 1.0;
  omega(1, 3) = 1.0;
  omega(2, 0) = -1.0;
  omega(3, 1) = -1.0;
  const double symplectic_defect =
      (jacobian.transpose() * omega * jacobian - omega).norm();

  // Soft-constrained instance against the dense quadratic solve.
  const ProblemSpec q = abelian_line_problem(true);
  const auto [opt, value] = abelian_quadratic_optimum(q);
  OptimizerConfig oc;
  oc.grad_tol = 1e-10;
  oc.max_iters = 20000;
  const OptimResult r = descend(q, oc, DualVector::Zero(1), DualVector::Zero(1));
  const double momentum_gap =
      std::hypot((r.mu0 - opt.first).norm(), (r.mu1 - opt.second).norm());
  const double cost_gap = std::abs(r.cost - value);

  const bool pass = symplectic_defect <= 1e-13 && r.converged && momentum_gap <= 1e-8 &&
                    cost_gap <= 1e-8;
  report(8, pass,
         "one-step |M^T Omega M - Omega| = " + fmt(symplectic_defect) +
             " (bound 1e-13); optimum vs quadratic solve: momentum gap " +
             fmt(momentum_gap) + ", cost gap " + fmt(cost_gap) + " (bounds 1e-8)");
}

//---------------------------------------------------------------------------
// 9. Kernel identities.
//---------------------------------------------------------------------------
void criterion9() {
  const std::vector<std::pair<const GroupDescriptor*, const Manifold*>> pairs = {
      {&GroupDescriptor::so3(), &Manifold::sphere2()},
      {&GroupDescriptor::se3(), &Manifold::sphere2xr3()},
      {&GroupDescriptor::sun(2), &Manifold::cpn(1)},
      {&GroupDescriptor::abelian(2), &Manifold::euclidean(2)},
  };
  auto rng = make_rng(9106);
  double worst = 0.0;
  for (const auto& [group, manifold] : pairs) {
    for (int i = 0; i < 100; ++i) {
      const AlgebraVector xi = random_algebra(*group, rng, 0.8);
      const AlgebraVector eta = random_algebra(*group, rng);
      const DualVector mu = random_dual(*group, rng);
      const GroupElement g = random_group_element(*group, rng);

      // Retraction inverse pair.
      const GroupElement tau = group->cayley(xi);
      worst = std::max(worst, (group->cayley_inv(tau) - xi).norm() / (1.0 + xi.norm()));
      worst = std::max(worst, (tau.matrix * group->cayley(-xi).matrix -
                               group->identity().matrix)
                                  .norm());

      // Trivialized-differential reflection identity:
      // dtau_inv(xi, .) = dtau_inv(-xi, .) o Ad_{tau(xi)}.
      const AlgebraVector lhs = group->dtau_inv(xi, eta);
      const AlgebraVector rhs = group->dtau_inv(-xi, group->Ad(tau, eta));
      worst = std::max(worst, (lhs - rhs).norm() / (1.0 + lhs.norm()));

      // Momentum-map pairing.
      const ObjectPoint q = random_point(*manifold, rng);
      const CVec alpha = random_tangent(*manifold, q, rng);
      const double pair_lhs = manifold->momentum_map(*group, q, alpha).dot(xi);
      const double pair_rhs =
          ambient_pair(alpha, manifold->infinitesimal_action(*group, xi, q));
      worst = std::max(worst, std::abs(pair_lhs - pair_rhs) / (1.0 + std::abs(pair_rhs)));

      // ad* / Ad* dualities.
      const double ad_lhs = group->ad_star(xi, mu).dot(eta);
      const double ad_rhs = mu.dot(group->ad(xi, eta));
      worst = std::max(worst, std::abs(ad_lhs - ad_rhs) / (1.0 + std::abs(ad_rhs)));
      const double Ad_lhs = group->Ad_star(g, mu).dot(eta);
      const double Ad_rhs = mu.dot(group->Ad(g, eta));
      worst = std::max(worst, std::abs(Ad_lhs - Ad_rhs) / (1.0 + std::abs(Ad_rhs)));
    }
  }
  report(9, worst <= 1e-12,
         "kernel identities (retraction pair, differential reflection, momentum pairing, "
         "coadjoint dualities), defect max " +
             fmt(worst) + " over 100 samples x 4 groups (bound 1e-12)");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3},
      {4, criterion4}, {5, criterion5}, {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9},
  };
  for (const auto& [index, run] : criteria) {
    try {
      run();
    } catch (const std::exception& err) {
      report(index, false, std::string("exception: ") + err.what());
    }
  }
  if (g_failures == 0) {
    std::printf("all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
