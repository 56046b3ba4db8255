/// @file metric.hpp
/// @brief Constant inner products on a Lie algebra (inertia operators).
#pragma once

#include "hpsplines/group.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

/// A symmetric positive-definite operator Gamma on algebra coordinates.
/// flat lowers indices (velocity -> momentum), sharp raises them.
class MetricOperator {
 public:
  /// Validates symmetry and positive-definiteness; throws ConfigError.
  explicit MetricOperator(RealMat gamma);
  static MetricOperator identity(int dim);

  int dim() const { return static_cast<int>(gamma_.rows()); }
  const RealMat& matrix() const { return gamma_; }
  bool is_identity() const { return identity_; }

  DualVector flat(const AlgebraVector& v) const;
  AlgebraVector sharp(const DualVector& mu) const;
  double norm(const AlgebraVector& v) const;
  double inner(const AlgebraVector& a, const AlgebraVector& b) const;

  /// Metric transpose of ad: <ad_dagger(xi, eta), zeta>_Gamma = <eta, ad(xi, zeta)>_Gamma,
  /// i.e. ad_dagger(xi, eta) = sharp(ad_star(xi, flat(eta))).
  AlgebraVector ad_dagger(const GroupDescriptor& group, const AlgebraVector& xi,
                          const AlgebraVector& eta) const;

 private:
  RealMat gamma_;
  Eigen::LDLT<RealMat> solver_;
  bool identity_ = false;
};

}  // namespace hpsplines
