#include "hpsplines/metric.hpp"

#include <cmath>
#include <string>

namespace hpsplines {

MetricOperator::MetricOperator(RealMat gamma) : gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols() || gamma_.rows() == 0) {
    throw ConfigError("metric: operator must be a nonempty square matrix");
  }
  const double scale = gamma_.cwiseAbs().maxCoeff();
  if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale)) {
    throw ConfigError("metric: operator is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<RealMat> eig(gamma_);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw ConfigError("metric: operator is not positive definite");
  }
  solver_.compute(gamma_);
  identity_ = (gamma_ - RealMat::Identity(gamma_.rows(), gamma_.cols()))
                  .cwiseAbs()
                  .maxCoeff() == 0.0;
}

MetricOperator MetricOperator::identity(int dim) {
  return MetricOperator(RealMat::Identity(dim, dim));
}

DualVector MetricOperator::flat(const AlgebraVector& v) const {
  if (v.size() != gamma_.rows()) {
    throw std::invalid_argument("metric flat: coordinate size mismatch");
  }
  return identity_ ? v : DualVector(gamma_ * v);
}

AlgebraVector MetricOperator::sharp(const DualVector& mu) const {
  if (mu.size() != gamma_.rows()) {
    throw std::invalid_argument("metric sharp: coordinate size mismatch");
  }
  return identity_ ? mu : AlgebraVector(solver_.solve(mu));
}

double MetricOperator::norm(const AlgebraVector& v) const {
  return std::sqrt(inner(v, v));
}

double MetricOperator::inner(const AlgebraVector& a, const AlgebraVector& b) const {
  return a.dot(flat(b));
}

AlgebraVector MetricOperator::ad_dagger(const GroupDescriptor& group, const AlgebraVector& xi,
                                        const AlgebraVector& eta) const {
  return sharp(group.ad_star(xi, flat(eta)));
}

}  // namespace hpsplines
