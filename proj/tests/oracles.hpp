/// @file oracles.hpp
/// @brief Independent reference computations and random generators shared by
/// the test suite.
///
/// Everything here is deliberately written against the public API only and by
/// the dumbest reliable method available (central finite differences, dense
/// quadratic solves), so that agreement with the library is meaningful.
#pragma once

#include <random>
#include <utility>

#include "hpsplines/group.hpp"
#include "hpsplines/manifold.hpp"
#include "hpsplines/problem.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines::testing {

//---------------------------------------------------------------------------
// Random sampling
//---------------------------------------------------------------------------

/// Deterministically seeded engine; every test fixes its own seed.
std::mt19937 make_rng(unsigned seed);

/// Standard-normal algebra coordinates scaled by `scale`.
AlgebraVector random_algebra(const GroupDescriptor& group, std::mt19937& rng, double scale = 1.0);

/// Standard-normal dual coordinates scaled by `scale`.
DualVector random_dual(const GroupDescriptor& group, std::mt19937& rng, double scale = 1.0);

/// Group element obtained by the retraction of a random algebra vector.
GroupElement random_group_element(const GroupDescriptor& group, std::mt19937& rng,
                                  double scale = 0.8);

/// Uniform-ish random point of the manifold (normalized Gaussian draws).
ObjectPoint random_point(const Manifold& manifold, std::mt19937& rng);

/// Random ambient tangent vector at q (orthogonal to the unit-norm
/// constraints), unit scaled.
CVec random_tangent(const Manifold& manifold, const ObjectPoint& q, std::mt19937& rng);

/// Point moved to q + eps * v and re-validated.
ObjectPoint moved_point(const Manifold& manifold, const ObjectPoint& q, const CVec& v, double eps);

//---------------------------------------------------------------------------
// Problem factories
//---------------------------------------------------------------------------

/// Randomized rotation-group problem on the sphere with `nodes` targets on a
/// grid of `steps` steps.  Kinetic (squared-velocity) Lagrangian, tame sigma,
/// so random small momenta integrate without step rejections.
ProblemSpec random_sphere_problem(std::mt19937& rng, int steps, int nodes, double sigma = 0.5);

/// Randomized special-unitary problem on the complex projective line.
/// Targets are resampled away from the cut locus.
ProblemSpec random_su2_problem(std::mt19937& rng, int steps, int nodes, double sigma = 0.5);

/// Randomized rigid-motion problem on the sphere-times-space manifold.
ProblemSpec random_se3_problem(std::mt19937& rng, int steps, int nodes, double sigma = 0.5);

/// Randomized translation-group problem on the plane.
ProblemSpec random_abelian_problem(std::mt19937& rng, int steps, int nodes, double sigma = 0.5);

/// Random initial momenta, halved until the problem integrates.
std::pair<DualVector, DualVector> feasible_momenta(const ProblemSpec& problem, std::mt19937& rng,
                                                   double scale = 0.3);

//---------------------------------------------------------------------------
// Finite-difference references
//---------------------------------------------------------------------------

/// Central difference of the retraction's left-trivialized differential:
/// coords of tau(xi)^{-1} (tau(xi + eps eta) - tau(xi - eps eta)) / (2 eps).
AlgebraVector fd_dtau(const GroupDescriptor& group, const AlgebraVector& xi,
                      const AlgebraVector& eta, double eps = 1e-6);

/// Central difference of the penalty 1/(2 sigma^2) d^2(exp(eps E_i) q, target)
/// in each algebra direction E_i; reference for the penalty force.
DualVector fd_penalty_force(const GroupDescriptor& group, const Manifold& manifold,
                            const ObjectPoint& q, const ObjectPoint& target, double sigma,
                            double eps = 1e-6);

/// Central difference of eps -> <(dtau_{s (xi + eps rho)})^* mu, V>.
double fd_kappa_pairing(const GroupDescriptor& group, double s, const AlgebraVector& xi,
                        const DualVector& mu, const AlgebraVector& V, const AlgebraVector& rho,
                        double eps = 1e-6);

/// Central difference of the distance along a manifold move q -> q + eps v.
double fd_distance_derivative(const Manifold& manifold, const ObjectPoint& q,
                              const ObjectPoint& target, const CVec& v, double eps = 1e-6);

//---------------------------------------------------------------------------
// Closed-form references
//---------------------------------------------------------------------------

/// Exact minimizer of the shooting objective of a translation-group problem,
/// where the objective is a quadratic form in the initial momenta: probes the
/// cost on the unit lattice, assembles the dense quadratic, and solves it.
/// Returns ((mu0, mu1), optimal cost).
std::pair<std::pair<DualVector, DualVector>, double> abelian_quadratic_optimum(
    const ProblemSpec& problem);

/// Relative l2 deviation |a - b| / max(|b|, floor).
double rel_l2(const Vec& a, const Vec& b, double floor = 1e-12);

}  // namespace hpsplines::testing
