/// @file problem.hpp
/// @brief Full description of a trajectory-matching problem instance.
#pragma once

#include <optional>
#include <vector>

#include "hpsplines/group.hpp"
#include "hpsplines/lagrangian.hpp"
#include "hpsplines/manifold.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

/// Which side the group acts on objects: Left is q -> g . q, Right is
/// q -> g^{-1} . q.
enum class ActionSide { Left, Right };

/// Trivialization of velocities: Right is xi = dg g^{-1} with update
/// g_{k+1} = tau(h xi0_k) g_k; Left is xi = g^{-1} dg with update
/// g_{k+1} = g_k tau(h xi0_k).
enum class ReductionSide { Right, Left };

/// One scheduled soft target: the trajectory is pulled toward `target` at
/// grid index `node`.
struct ScheduleEntry {
  int node = 0;
  ObjectPoint target;
};

/// Initial object plus the time-ordered target list.
struct TargetSchedule {
  ObjectPoint initial;
  std::vector<ScheduleEntry> entries;

  bool is_node(int k) const;
  /// Target scheduled at grid index k, or nullptr.
  const ObjectPoint* target(int k) const;
  /// Checks 0 < N_1 < ... < N_l = steps and manifold consistency.
  void validate(int steps, const Manifold& manifold) const;
};

/// Everything defining one problem instance.  The metric lives inside the
/// Lagrangian.  `xi0_initial` is problem data (the initial velocity), while
/// the initial momenta are the unknowns of the shooting method.
struct ProblemSpec {
  const GroupDescriptor* group = nullptr;
  const Manifold* manifold = nullptr;
  LagrangianSpec lagrangian;
  TargetSchedule schedule;
  double sigma = 1.0;
  double h = 0.1;
  int steps = 1;
  AlgebraVector xi0_initial;
  ActionSide action_side = ActionSide::Left;
  ReductionSide reduction_side = ReductionSide::Right;
  /// Step rejection threshold on |h xi0_k|.
  double cayley_radius = 1.0;

  const MetricOperator& metric() const { return lagrangian.metric(); }
  double total_time() const { return h * steps; }
  /// True when already in the right-reduction form the stepper integrates.
  bool core_form() const { return reduction_side == ReductionSide::Right; }

  /// Equivalent right-reduction problem (xi -> -xi, action side flipped);
  /// identity on problems already in core form.
  ProblemSpec core() const;

  /// Object the penalty sees at group element g: g . Q0 or g^{-1} . Q0
  /// depending on the action side.
  ObjectPoint object_at(const GroupElement& g) const;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Penalty force entering the node update of the momentum, in the problem's
/// (core-form) convention; zero off nodes.
DualVector node_force(const ProblemSpec& problem, int k, const GroupElement& g);

/// Penalty value (1 / 2 sigma^2) d^2(object_at(g), target) at node k; zero off
/// nodes.
double node_penalty(const ProblemSpec& problem, int k, const GroupElement& g);

}  // namespace hpsplines
