/// @file adjoint.hpp
/// @brief Exact gradient of the shooting objective via a backward sweep.
///
/// For kinetic Lagrangians l = 1/2 |xi1|^2_Gamma with the group acting on the
/// left, the derivative of the discrete action with respect to the initial
/// momenta is computed exactly by one backward pass over the trajectory.  For
/// the other configurations (cubic-reduced Lagrangians, right group action
/// after rewriting to the integrated form) use fd_gradient.
#pragma once

#include <utility>
#include <vector>

#include "hpsplines/integrator.hpp"
#include "hpsplines/problem.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

/// Backward multipliers; entries are indexed by grid position, index 0 unused.
struct AdjointSeries {
  std::vector<DualVector> P0;
  std::vector<DualVector> P1;
  std::vector<AlgebraVector> V0;
  std::vector<AlgebraVector> V1;
};

/// True when the exact backward sweep applies to this problem.
bool adjoint_available(const ProblemSpec& problem);

/// Directional-derivative kernel of the trivialized differential:
/// <kappa_kernel(s, xi, mu, V), rho> = d/de <(dtau_{s (xi + e rho)})^* mu, V>.
DualVector kappa_kernel(const GroupDescriptor& group, double s, const AlgebraVector& xi,
                        const DualVector& mu, const AlgebraVector& V);

/// Runs the backward sweep along an integrated trajectory.
AdjointSeries backward_pass(const ProblemSpec& problem, const DiscretePath& path);

/// Gradient of the shooting objective with respect to (mu0_0, mu1_0), read
/// off the backward multipliers.
std::pair<DualVector, DualVector> adjoint_gradient(const ProblemSpec& problem,
                                                   const DiscretePath& path);
std::pair<DualVector, DualVector> adjoint_gradient(const ProblemSpec& problem,
                                                   const DualVector& mu0, const DualVector& mu1);

/// Central-difference gradient of the shooting objective; the step for each
/// component is eps * max(1, |component|).
std::pair<DualVector, DualVector> fd_gradient(const ProblemSpec& problem, const DualVector& mu0,
                                              const DualVector& mu1, double eps = 1e-5);

}  // namespace hpsplines
