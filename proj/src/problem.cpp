#include "hpsplines/problem.hpp"

#include <algorithm>
#include <string>

namespace hpsplines {

//------------------------------------------------------------------------------
// TargetSchedule
//------------------------------------------------------------------------------

bool TargetSchedule::is_node(int k) const { return target(k) != nullptr; }

const ObjectPoint* TargetSchedule::target(int k) const {
  const auto it = std::lower_bound(
      entries.begin(), entries.end(), k,
      [](const ScheduleEntry& e, int key) { return e.node < key; });
  if (it != entries.end() && it->node == k) return &it->target;
  return nullptr;
}

void TargetSchedule::validate(int steps, const Manifold& manifold) const {
  if (initial.manifold != &manifold) {
    throw ConfigError("schedule: initial point does not live on manifold " + manifold.name());
  }
  int previous = 0;
  for (const ScheduleEntry& e : entries) {
    if (e.target.manifold != &manifold) {
      throw ConfigError("schedule: target at node " + std::to_string(e.node) +
                        " does not live on manifold " + manifold.name());
    }
    if (e.node <= previous) {
      throw ConfigError("schedule: node indices must be strictly increasing and positive");
    }
    previous = e.node;
  }
  if (!entries.empty() && entries.back().node != steps) {
    throw ConfigError("schedule: the last node must coincide with the final step (" +
                      std::to_string(steps) + "), got " + std::to_string(entries.back().node));
  }
}

//------------------------------------------------------------------------------
// ProblemSpec
//------------------------------------------------------------------------------

void ProblemSpec::validate() const {
  if (group == nullptr || manifold == nullptr) {
    throw ConfigError("problem: group and manifold must be set");
  }
  if (!manifold->compatible_with(*group)) {
    throw ConfigError("problem: group " + group->name() + " does not act on manifold " +
                      manifold->name());
  }
  if (group->kind() == GroupDescriptor::Kind::SUn && group->parameter() != 2) {
    throw ConfigError("problem: the integrator supports sun:2 only (the Cayley retraction "
                      "leaves sun:n for n > 2)");
  }
  if (!(sigma > 0.0)) throw ConfigError("problem: sigma must be positive");
  if (!(h > 0.0)) throw ConfigError("problem: h must be positive");
  if (steps < 1) throw ConfigError("problem: steps must be at least 1");
  if (!(cayley_radius > 0.0)) throw ConfigError("problem: cayley_radius must be positive");
  if (metric().dim() != group->dim()) {
    throw ConfigError("problem: metric dimension does not match the group");
  }
  if (xi0_initial.size() != group->dim()) {
    throw ConfigError("problem: xi0_initial size does not match the group dimension");
  }
  schedule.validate(steps, *manifold);
}

ProblemSpec ProblemSpec::core() const {
  if (core_form()) return *this;
  ProblemSpec out = *this;
  out.reduction_side = ReductionSide::Right;
  out.action_side = (action_side == ActionSide::Left) ? ActionSide::Right : ActionSide::Left;
  out.lagrangian = lagrangian.reflected();
  out.xi0_initial = -xi0_initial;
  return out;
}

ObjectPoint ProblemSpec::object_at(const GroupElement& g) const {
  if (action_side == ActionSide::Left) {
    return manifold->act(g, schedule.initial);
  }
  return manifold->act(g.inverse(), schedule.initial);
}

DualVector node_force(const ProblemSpec& problem, int k, const GroupElement& g) {
  const ObjectPoint* target = problem.schedule.target(k);
  if (target == nullptr) {
    return DualVector::Zero(problem.group->dim());
  }
  if (problem.action_side == ActionSide::Left) {
    const ObjectPoint q = problem.manifold->act(g, problem.schedule.initial);
    return problem.manifold->penalty_force(*problem.group, q, *target, problem.sigma);
  }
  const GroupElement ginv = g.inverse();
  const ObjectPoint q = problem.manifold->act(ginv, problem.schedule.initial);
  const DualVector force =
      problem.manifold->penalty_force(*problem.group, q, *target, problem.sigma);
  return -problem.group->Ad_star(ginv, force);
}

double node_penalty(const ProblemSpec& problem, int k, const GroupElement& g) {
  const ObjectPoint* target = problem.schedule.target(k);
  if (target == nullptr) return 0.0;
  const double d = problem.manifold->distance(problem.object_at(g), *target);
  return d * d / (2.0 * problem.sigma * problem.sigma);
}

}  // namespace hpsplines
