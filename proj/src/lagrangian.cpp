#include "hpsplines/lagrangian.hpp"

#include <cmath>

namespace hpsplines {

LagrangianSpec::LagrangianSpec(Kind kind, MetricOperator metric, double sign, AlgebraVector offset)
    : kind_(kind), metric_(std::move(metric)), sign_(sign), offset_(std::move(offset)) {}

LagrangianSpec::LagrangianSpec()
    : LagrangianSpec(Kind::SquaredVelocity, MetricOperator::identity(1), 0.0,
                     AlgebraVector::Zero(1)) {}

LagrangianSpec LagrangianSpec::squared_velocity(MetricOperator metric) {
  const int d = metric.dim();
  return LagrangianSpec(Kind::SquaredVelocity, std::move(metric), 0.0, AlgebraVector::Zero(d));
}

LagrangianSpec LagrangianSpec::cubic_reduced(MetricOperator metric, double sign,
                                             AlgebraVector offset) {
  if (sign != 1.0 && sign != -1.0) {
    throw ConfigError("cubic_reduced: sign must be +1 or -1");
  }
  if (offset.size() != metric.dim()) {
    throw ConfigError("cubic_reduced: offset size does not match the metric dimension");
  }
  return LagrangianSpec(Kind::CubicReduced, std::move(metric), sign, std::move(offset));
}

AlgebraVector LagrangianSpec::shifted_velocity(const GroupDescriptor& group,
                                               const AlgebraVector& xi0,
                                               const AlgebraVector& xi1) const {
  if (kind_ == Kind::SquaredVelocity) return xi1;
  return xi1 + sign_ * metric_.ad_dagger(group, xi0, xi0 - offset_);
}

double LagrangianSpec::value(const GroupDescriptor& group, const AlgebraVector& xi0,
                             const AlgebraVector& xi1) const {
  const AlgebraVector w = shifted_velocity(group, xi0, xi1);
  return 0.5 * metric_.inner(w, w);
}

DualVector LagrangianSpec::d_xi1(const GroupDescriptor& group, const AlgebraVector& xi0,
                                 const AlgebraVector& xi1) const {
  return metric_.flat(shifted_velocity(group, xi0, xi1));
}

DualVector LagrangianSpec::d_xi0(const GroupDescriptor& group, const AlgebraVector& xi0,
                                 const AlgebraVector& xi1) const {
  if (kind_ == Kind::SquaredVelocity) {
    return DualVector::Zero(metric_.dim());
  }
  // With w = xi1 + s ad_dagger_{xi0}(xi0 - z) and m = Gamma (xi0 - z):
  //   d l / d xi0 = s (-ad_star_w(m) + Gamma ad_{xi0} w).
  const AlgebraVector w = shifted_velocity(group, xi0, xi1);
  const DualVector m = metric_.flat(xi0 - offset_);
  return sign_ * (-group.ad_star(w, m) + metric_.flat(group.ad(xi0, w)));
}

AlgebraVector LagrangianSpec::legendre_inverse(const GroupDescriptor& group,
                                               const AlgebraVector& xi0,
                                               const DualVector& mu1) const {
  const AlgebraVector w = metric_.sharp(mu1);
  if (kind_ == Kind::SquaredVelocity) return w;
  return w - sign_ * metric_.ad_dagger(group, xi0, xi0 - offset_);
}

std::pair<AlgebraVector, DualVector> LagrangianSpec::solve_step(const GroupDescriptor& group,
                                                                const AlgebraVector& xi0,
                                                                const DualVector& rhs,
                                                                double h) const {
  const int d = metric_.dim();
  AlgebraVector w;
  if (kind_ == Kind::SquaredVelocity) {
    w = metric_.sharp(rhs);
  } else {
    // The relation is linear in w:
    //   Gamma w + h s ad_star_w(m) - h s Gamma ad_{xi0} w = rhs.
    const DualVector m = metric_.flat(xi0 - offset_);
    RealMat coad_in_w(d, d);
    AlgebraVector e = AlgebraVector::Zero(d);
    for (int j = 0; j < d; ++j) {
      e[j] = 1.0;
      coad_in_w.col(j) = group.ad_star(e, m);
      e[j] = 0.0;
    }
    const RealMat lhs = metric_.matrix() + h * sign_ * coad_in_w -
                        h * sign_ * metric_.matrix() * group.ad_matrix(xi0);
    const Eigen::PartialPivLU<RealMat> lu(lhs);
    w = lu.solve(rhs);
    if ((lhs * w - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) {
      throw NumericError("implicit velocity solve is singular");
    }
  }
  AlgebraVector xi1 = w;
  if (kind_ == Kind::CubicReduced) {
    xi1 -= sign_ * metric_.ad_dagger(group, xi0, xi0 - offset_);
  }
  // Cross-check against the nonlinear form of the relation.
  const DualVector defect = d_xi1(group, xi0, xi1) - h * d_xi0(group, xi0, xi1) - rhs;
  if (defect.norm() > 1e-9 * (1.0 + rhs.norm())) {
    throw NumericError("implicit velocity solve failed to satisfy the step relation");
  }
  return {xi1, d_xi1(group, xi0, xi1)};
}

LagrangianSpec LagrangianSpec::reflected() const {
  if (kind_ == Kind::SquaredVelocity) return *this;
  return LagrangianSpec(kind_, metric_, -sign_, -offset_);
}

}  // namespace hpsplines
