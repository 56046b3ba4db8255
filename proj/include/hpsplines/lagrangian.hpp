/// @file lagrangian.hpp
/// @brief Reduced Lagrangians in the velocity pair (xi0, xi1).
#pragma once

#include <utility>

#include "hpsplines/group.hpp"
#include "hpsplines/metric.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

/// A reduced Lagrangian l(xi0, xi1).  Two families are supported:
///
///  - SquaredVelocity: l = 1/2 |xi1|^2_Gamma
///  - CubicReduced:    l = 1/2 |xi1 + s ad_dagger_{xi0}(xi0 - z)|^2_Gamma
///    with sign s = +-1 and constant offset z.
///
/// Both are quadratic with identity-weight xi1 block, so the implicit step
/// relation is a linear solve.  SquaredVelocity is the special case s = 0 in
/// all derivative formulas but is kept distinct because only it admits the
/// exact adjoint gradient.
class LagrangianSpec {
 public:
  enum class Kind { SquaredVelocity, CubicReduced };

  /// Placeholder (one-dimensional squared velocity); replace before use.
  /// Exists so ProblemSpec can be built field by field.
  LagrangianSpec();

  static LagrangianSpec squared_velocity(MetricOperator metric);
  static LagrangianSpec cubic_reduced(MetricOperator metric, double sign, AlgebraVector offset);

  Kind kind() const { return kind_; }
  const MetricOperator& metric() const { return metric_; }
  double sign() const { return sign_; }
  const AlgebraVector& offset() const { return offset_; }

  double value(const GroupDescriptor& group, const AlgebraVector& xi0,
               const AlgebraVector& xi1) const;
  /// Partial derivative in xi0 (a dual vector).
  DualVector d_xi0(const GroupDescriptor& group, const AlgebraVector& xi0,
                   const AlgebraVector& xi1) const;
  /// Partial derivative in xi1, i.e. the second-order Legendre momentum.
  DualVector d_xi1(const GroupDescriptor& group, const AlgebraVector& xi0,
                   const AlgebraVector& xi1) const;
  /// Inverts d_xi1(xi0, .) = mu1 for xi1.
  AlgebraVector legendre_inverse(const GroupDescriptor& group, const AlgebraVector& xi0,
                                 const DualVector& mu1) const;

  /// Solves the implicit step relation
  ///   d_xi1(xi0, xi1) - h * d_xi0(xi0, xi1) = rhs
  /// for xi1 (a linear system for these families) and returns (xi1, d_xi1).
  std::pair<AlgebraVector, DualVector> solve_step(const GroupDescriptor& group,
                                                  const AlgebraVector& xi0, const DualVector& rhs,
                                                  double h) const;

  /// The Lagrangian composed with xi -> -xi; used to rewrite left-reduction
  /// problems in right-reduction form.  Flips sign and offset.
  LagrangianSpec reflected() const;

 private:
  LagrangianSpec(Kind kind, MetricOperator metric, double sign, AlgebraVector offset);
  /// The shifted velocity w = xi1 + s ad_dagger_{xi0}(xi0 - z).
  AlgebraVector shifted_velocity(const GroupDescriptor& group, const AlgebraVector& xi0,
                                 const AlgebraVector& xi1) const;

  Kind kind_;
  MetricOperator metric_;
  double sign_ = 0.0;
  AlgebraVector offset_;
};

}  // namespace hpsplines
