#include "hpsplines/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hpsplines/log.hpp"

namespace hpsplines {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kMinTrialStep = 1e-16;

Vec stack_real_vec(const CVec& v) {
  Vec out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

// Columns span the infinitesimal-action image directions; the isotropy is the
// null space of this matrix.
RealMat action_matrix(const GroupDescriptor& group, const Manifold& manifold,
                      const ObjectPoint& q) {
  const int d = group.dim();
  RealMat a(2 * manifold.coord_size(), d);
  const bool projective = manifold.kind() == Manifold::Kind::CPn;
  for (int j = 0; j < d; ++j) {
    AlgebraVector e = AlgebraVector::Zero(d);
    e[j] = 1.0;
    CVec v = manifold.infinitesimal_action(group, e, q);
    if (projective) {
      // Directions along the representative's phase fix the projective point.
      v -= q.coords * q.coords.dot(v);
    }
    a.col(j) = stack_real_vec(v);
  }
  return a;
}

std::pair<RealMat, RealMat> split_by_rank(const RealMat& a) {
  Eigen::JacobiSVD<RealMat> svd(a, Eigen::ComputeFullV);
  const int d = static_cast<int>(a.cols());
  const double smax = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > kRankTol * std::max(1.0, smax)) ++rank;
  }
  const RealMat v = svd.matrixV();
  return {v.rightCols(d - rank), v.leftCols(rank)};  // (null space, row space)
}

}  // namespace

RealMat isotropy_basis(const GroupDescriptor& group, const Manifold& manifold,
                       const ObjectPoint& q) {
  return split_by_rank(action_matrix(group, manifold, q)).first;
}

RealMat annihilator_basis(const GroupDescriptor& group, const Manifold& manifold,
                          const ObjectPoint& q) {
  return split_by_rank(action_matrix(group, manifold, q)).second;
}

std::vector<double> default_homotopy_schedule(double sigma) {
  std::vector<double> out;
  for (int j = 0; j < 5; ++j) {
    out.push_back(sigma * std::pow(10.0, (4 - j) / 4.0));
  }
  return out;
}

//------------------------------------------------------------------------------
// Descent
//------------------------------------------------------------------------------

OptimResult descend(const ProblemSpec& problem, const OptimizerConfig& config,
                    const DualVector& mu0_init, const DualVector& mu1_init) {
  const int d = problem.group->dim();
  if (mu0_init.size() != d || mu1_init.size() != d) {
    throw std::invalid_argument("descend: momentum size mismatch");
  }
  const ProblemSpec core = problem.core();
  const bool use_adjoint = adjoint_available(problem);
  // The momentum-subspace restriction is a property of left-action problems;
  // the projector acts on the core-form mu0, which differs from the problem's
  // own mu0 only by sign, so it can be applied in either convention.
  const bool restrict_mu0 = core.action_side == ActionSide::Left;
  RealMat basis;
  if (restrict_mu0) {
    basis = annihilator_basis(*core.group, *core.manifold, core.schedule.initial);
  }
  const auto project = [&](const DualVector& v) -> DualVector {
    if (!restrict_mu0 || basis.cols() == static_cast<Eigen::Index>(d)) return v;
    return basis * (basis.transpose() * v);
  };

  const auto gradient = [&](const DualVector& m0,
                            const DualVector& m1) -> std::pair<DualVector, DualVector> {
    auto g = use_adjoint ? adjoint_gradient(problem, m0, m1)
                         : fd_gradient(problem, m0, m1, config.fd_eps);
    g.first = project(g.first);
    return g;
  };

  std::string last_numeric_error;
  const auto cost_or_inf = [&](const DualVector& m0, const DualVector& m1) -> double {
    try {
      return shooting_cost(problem, m0, m1);
    } catch (const NumericError& err) {
      last_numeric_error = err.what();
      return std::numeric_limits<double>::infinity();
    }
  };

  OptimResult result;
  result.mu0 = project(mu0_init);
  result.mu1 = mu1_init;
  double f = cost_or_inf(result.mu0, result.mu1);
  // A warm start handed over from a looser penalty stage can drive the
  // trajectory out of the retraction's trust region once sigma shrinks; pull
  // the momenta toward zero until the start point is integrable.
  for (int shrink = 0; !std::isfinite(f) && shrink < 60; ++shrink) {
    result.mu0 *= 0.5;
    result.mu1 *= 0.5;
    f = cost_or_inf(result.mu0, result.mu1);
    log(LogLevel::Info, "initial momenta infeasible; halving");
  }
  if (!std::isfinite(f)) {
    throw NumericError(
        "shooting cost is not integrable even at near-zero momenta (" +
        last_numeric_error + "); start the homotopy at a larger sigma");
  }
  double last_step = config.step_init;
  std::string note;

  // Previous iterate and gradient, for the Barzilai-Borwein trial step.
  DualVector prev_mu0, prev_mu1, prev_g0, prev_g1;
  bool have_prev = false;

  int iter = 0;
  double grad_norm = 0.0;
  while (true) {
    const auto [g0, g1] = gradient(result.mu0, result.mu1);
    grad_norm = std::sqrt(g0.squaredNorm() + g1.squaredNorm());
    if (grad_norm <= config.grad_tol) {
      result.converged = true;
      break;
    }
    if (iter >= config.max_iters) {
      note = "iteration limit reached";
      break;
    }

    // Armijo backtracking along the (projected) steepest descent direction.
    // The first trial step is step_init; afterwards it comes from the
    // Barzilai-Borwein curvature estimate of the last accepted move (falling
    // back to doubling the last accepted step when the estimate is unusable).
    // Backtracking below still enforces monotone cost decrease.
    double t = config.step_init;
    if (have_prev) {
      const double sy = (result.mu0 - prev_mu0).dot(g0 - prev_g0) +
                        (result.mu1 - prev_mu1).dot(g1 - prev_g1);
      const double ss =
          (result.mu0 - prev_mu0).squaredNorm() + (result.mu1 - prev_mu1).squaredNorm();
      if (sy > 0.0 && ss > 0.0) {
        t = std::min(ss / sy, 1e6);
      } else {
        t = std::min(std::max(2.0 * last_step, 1e-12), 1e6);
      }
    }
    const double slope = grad_norm * grad_norm;
    bool accepted = false;
    prev_mu0 = result.mu0;
    prev_mu1 = result.mu1;
    prev_g0 = g0;
    prev_g1 = g1;
    while (t >= kMinTrialStep) {
      const DualVector trial0 = result.mu0 - t * g0;
      const DualVector trial1 = result.mu1 - t * g1;
      const double f_trial = cost_or_inf(trial0, trial1);
      // Require strict decrease on top of the Armijo bound: once cost changes
      // fall below double-precision resolution no step is accepted and the
      // stall is reported instead of looping on no-op steps.
      if (f_trial <= f - config.armijo_c * t * slope && f_trial < f) {
        result.mu0 = trial0;
        result.mu1 = trial1;
        f = f_trial;
        last_step = t;
        accepted = true;
        have_prev = true;
        break;
      }
      t *= config.backtrack_factor;
    }
    if (!accepted) {
      note = "line search stalled at the cost's numerical resolution";
      break;
    }
    ++iter;
    if (log_enabled(LogLevel::Debug) && iter % 100 == 0) {
      char line[128];
      std::snprintf(line, sizeof(line), "descend iter %d: cost %.12g, grad %.3e, step %.3e",
                    iter, f, grad_norm, last_step);
      log(LogLevel::Debug, line);
    }
  }

  result.cost = f;
  result.grad_norm = grad_norm;
  result.iterations = iter;
  result.path = integrate(problem, result.mu0, result.mu1);
  result.terminal = terminal_residuals(problem, result.path);
  StageRecord record;
  record.sigma = problem.sigma;
  record.cost = result.cost;
  record.grad_norm = result.grad_norm;
  record.iterations = result.iterations;
  record.converged = result.converged;
  record.note = note;
  result.stages.push_back(record);
  return result;
}

//------------------------------------------------------------------------------
// Homotopy
//------------------------------------------------------------------------------

OptimResult homotopy_solve(const ProblemSpec& problem, const OptimizerConfig& config) {
  std::vector<double> schedule = config.homotopy_schedule.empty()
                                     ? default_homotopy_schedule(problem.sigma)
                                     : config.homotopy_schedule;
  for (size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) {
      throw ConfigError("homotopy schedule entries must be positive");
    }
    if (i > 0 && schedule[i] >= schedule[i - 1]) {
      throw ConfigError("homotopy schedule must be strictly decreasing");
    }
  }
  if (std::abs(schedule.back() - problem.sigma) > 1e-12 * problem.sigma) {
    throw ConfigError("homotopy schedule must end at the problem's sigma");
  }

  const int d = problem.group->dim();
  DualVector mu0 = DualVector::Zero(d);
  DualVector mu1 = DualVector::Zero(d);
  std::vector<StageRecord> stages;
  OptimResult result;
  bool have_result = false;
  bool final_stage_ok = false;

  for (size_t i = 0; i < schedule.size(); ++i) {
    const double sigma = schedule[i];
    ProblemSpec stage_problem = problem;
    stage_problem.sigma = sigma;
    try {
      OptimResult r = descend(stage_problem, config, mu0, mu1);
      mu0 = r.mu0;
      mu1 = r.mu1;
      stages.push_back(r.stages.front());
      result = std::move(r);
      have_result = true;
      final_stage_ok = (i + 1 == schedule.size());
      log(LogLevel::Info, "homotopy stage sigma = " + std::to_string(sigma) + ": cost " +
                              std::to_string(result.cost) + ", " +
                              std::to_string(result.iterations) + " iterations" +
                              (result.converged ? "" : " (not converged)"));
    } catch (const NumericError& err) {
      // A failed stage aborts the continuation; the partial history is kept.
      StageRecord record;
      record.sigma = sigma;
      record.converged = false;
      record.note = err.what();
      stages.push_back(record);
      log(LogLevel::Warn, "homotopy stage sigma = " + std::to_string(sigma) +
                              " failed: " + std::string(err.what()) +
                              "; aborting remaining stages");
      break;
    }
  }
  if (!have_result) {
    throw NumericError("homotopy failed at its first stage: " + stages.back().note);
  }
  if (!final_stage_ok) {
    result.converged = false;
  }
  result.stages = stages;
  return result;
}

}  // namespace hpsplines
