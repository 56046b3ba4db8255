/// @file optimizer.hpp
/// @brief Projected-gradient shooting optimizer with sigma homotopy.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hpsplines/adjoint.hpp"
#include "hpsplines/integrator.hpp"
#include "hpsplines/problem.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

struct OptimizerConfig {
  int max_iters = 5000;
  double grad_tol = 1e-8;
  double step_init = 1.0;
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  /// Step scale for the finite-difference gradient fallback.
  double fd_eps = 1e-5;
  /// Decreasing penalty widths ending at the problem's sigma; empty selects
  /// the default geometric five-stage schedule from 10 sigma down to sigma.
  std::vector<double> homotopy_schedule;
};

/// Outcome of one descent run at a fixed sigma.
struct StageRecord {
  double sigma = 0.0;
  double cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string note;
};

struct OptimResult {
  DualVector mu0;
  DualVector mu1;
  double cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// (|mu0_N + Delta_N|, |mu1_N|) at the returned momenta.
  std::pair<double, double> terminal{0.0, 0.0};
  DiscretePath path;
  std::vector<StageRecord> stages;
};

/// Orthonormal basis of the isotropy algebra of q (algebra elements whose
/// infinitesimal action vanishes at q).
RealMat isotropy_basis(const GroupDescriptor& group, const Manifold& manifold,
                       const ObjectPoint& q);

/// Orthonormal basis of the annihilator of that isotropy algebra: with the
/// coordinate-dot pairing, the orthogonal complement of the isotropy.  At a
/// critical point of a left-action problem the initial primary momentum lies
/// in this subspace, so the search restricts mu0_0 to it.
RealMat annihilator_basis(const GroupDescriptor& group, const Manifold& manifold,
                          const ObjectPoint& q);

/// The default five-stage geometric homotopy from 10 sigma down to sigma.
std::vector<double> default_homotopy_schedule(double sigma);

/// Armijo backtracking gradient descent on the shooting objective from the
/// given initial momenta.  Uses the exact adjoint gradient when available and
/// central differences otherwise; for left-action problems mu0 iterates are
/// confined to the isotropy annihilator.
OptimResult descend(const ProblemSpec& problem, const OptimizerConfig& config,
                    const DualVector& mu0_init, const DualVector& mu1_init);

/// Runs descend along the homotopy schedule, warm-starting each stage with
/// the previous momenta.  A stage that fails to integrate is recorded and
/// aborts the remaining stages (the last successful stage's result is
/// returned, marked unconverged); a first-stage failure throws NumericError.
OptimResult homotopy_solve(const ProblemSpec& problem, const OptimizerConfig& config);

}  // namespace hpsplines
