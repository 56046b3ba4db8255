/// @file integrator.hpp
/// @brief Discrete second-order variational integrator (shooting form).
///
/// Given initial momenta (mu0_0, mu1_0) the stepper produces the discrete
/// trajectory of the two-derivative variational scheme: the group element is
/// advanced through the Cayley retraction, the primary momentum is transported
/// (with penalty impulses at scheduled nodes), and the velocity update solves
/// the implicit Legendre relation.  The stepper integrates right-reduction
/// problems natively; left-reduction problems are rewritten on the fly and the
/// results are mapped back, so all entry points accept both conventions.
#pragma once

#include <utility>
#include <vector>

#include "hpsplines/problem.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

/// Trajectory sample at grid index k.
struct IntegratorState {
  GroupElement g;
  AlgebraVector xi0;
  DualVector mu0;
  DualVector mu1;
  int k = 0;
};

/// Full trajectory: N + 1 states and the N inner velocities xi1_k connecting
/// them, all in the problem's own reduction convention.
struct DiscretePath {
  std::vector<IntegratorState> states;
  std::vector<AlgebraVector> xi1;

  int steps() const { return static_cast<int>(xi1.size()); }
};

/// Diagnostics row for one grid index.
struct MomentumRow {
  int k = 0;
  double t = 0.0;
  double mu0_norm = 0.0;
  double mu1_norm = 0.0;
  /// Spatial (conserved) momentum, reported in the right-reduction picture.
  DualVector spatial;
  double spatial_norm = 0.0;
  bool is_node = false;
  /// Defect of the momentum jump relation toward the next index:
  /// |J_{k+1} - J_k - Ad_star_{g_k} Delta_k|; zero at the last index.
  double jump_residual = 0.0;
};

/// State at grid index 0 for the given initial momenta.
IntegratorState initial_state(const ProblemSpec& problem, const DualVector& mu0,
                              const DualVector& mu1);

/// One step k -> k+1; returns the new state and the inner velocity xi1_k.
/// Throws NumericError when |h xi0_k| exceeds the Cayley radius or the
/// implicit solve degenerates.
std::pair<IntegratorState, AlgebraVector> step(const ProblemSpec& problem,
                                               const IntegratorState& state);

/// Integrates all N steps from the given initial momenta.
DiscretePath integrate(const ProblemSpec& problem, const DualVector& mu0, const DualVector& mu1);

/// Discrete action: h sum_k l(xi0_k, xi1_k) plus the scheduled penalties.
double discrete_action(const ProblemSpec& problem, const DiscretePath& path);

/// Objective of the shooting method as a function of the initial momenta.
double shooting_cost(const ProblemSpec& problem, const DualVector& mu0, const DualVector& mu1);

/// Conserved spatial momentum of the state (constant between nodes).
DualVector spatial_momentum(const ProblemSpec& problem, const IntegratorState& state);

/// (|mu0_N + Delta_N|, |mu1_N|): the transversality defects that vanish at
/// critical points of the shooting objective.
std::pair<double, double> terminal_residuals(const ProblemSpec& problem, const DiscretePath& path);

/// Per-index momentum diagnostics.
std::vector<MomentumRow> momentum_report(const ProblemSpec& problem, const DiscretePath& path);

/// Distance from the trajectory to each scheduled target, in schedule order.
std::vector<double> target_distances(const ProblemSpec& problem, const DiscretePath& path);

/// Rewrites a state or path between the two reduction conventions (an
/// involution: inverse group elements, negated algebra/dual coordinates).
IntegratorState to_core_state(const ProblemSpec& problem, const IntegratorState& state);
DiscretePath to_core_path(const ProblemSpec& problem, const DiscretePath& path);

}  // namespace hpsplines
