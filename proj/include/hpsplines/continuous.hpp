/// @file continuous.hpp
/// @brief Continuous-time reference trajectories and convergence studies.
///
/// The smooth counterpart of the discrete scheme evolves (xi0, mu0, mu1) by
/// the reduced flow equations and reconstructs the group element from xi0.
/// The algebra variables advance with classical RK4; the group element
/// advances per macro step by the exponential of a fourth-order commutator
/// quadrature of xi0-hat, sampled at the step ends and at a half-step RK4
/// midpoint, keeping the group reconstruction at the same order as the
/// algebra variables.
#pragma once

#include <vector>

#include "hpsplines/integrator.hpp"
#include "hpsplines/problem.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

/// Continuous-time state in the problem's own reduction convention.
struct ContinuousState {
  GroupElement g;
  AlgebraVector xi0;
  DualVector mu0;
  DualVector mu1;
  double t = 0.0;
};

/// Time derivative of a continuous state; the group part is the matrix
/// xi0_hat g (right reduction) or g xi0_hat (left reduction).
struct ContinuousRhs {
  AlgebraVector dxi0;
  DualVector dmu0;
  DualVector dmu1;
  Mat dg;
};

/// State at t = 0 for the given initial momenta.
ContinuousState continuous_initial(const ProblemSpec& problem, const DualVector& mu0,
                                   const DualVector& mu1);

/// Reduced flow equations at a state.
ContinuousRhs continuous_rhs(const ProblemSpec& problem, const ContinuousState& state);

/// Integrates to t = h * steps with reference step h_ref (shortened to fit
/// segment ends exactly).  Momentum jumps are applied at interior scheduled
/// node times; like the discrete trajectory, the state at the final time is
/// reported before any final-node impulse.
ContinuousState integrate_continuous(const ProblemSpec& problem, const DualVector& mu0,
                                     const DualVector& mu1, double h_ref);

struct ConvergencePoint {
  double h = 0.0;
  double error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  /// Least-squares slope of log error against log h.
  double fitted_order = 0.0;
};

/// Endpoint error of the discrete scheme against the continuous reference for
/// each step size (the problem's h/steps fix the final time; every listed h
/// must divide it).  Requires an empty target schedule.
ConvergenceStudy convergence_study(const ProblemSpec& problem, const DualVector& mu0,
                                   const DualVector& mu1, const std::vector<double>& h_list);

}  // namespace hpsplines
