#include "hpsplines/group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <utility>

namespace hpsplines {

namespace {

// Stacks Re(vec(m)) over Im(vec(m)) so complex spans become real subspaces.
Vec stack_real(const Mat& m) {
  const Eigen::Index nn = m.size();
  Vec out(2 * nn);
  out.head(nn) = Eigen::Map<const CVec>(m.data(), nn).real();
  out.tail(nn) = Eigen::Map<const CVec>(m.data(), nn).imag();
  return out;
}

Mat real_to_complex(const RealMat& m) { return m.cast<Complex>(); }

}  // namespace

//------------------------------------------------------------------------------
// GroupElement
//------------------------------------------------------------------------------

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (group != other.group) {
    throw std::invalid_argument("GroupElement: product across different group descriptors");
  }
  return GroupElement{group, matrix * other.matrix};
}

GroupElement GroupElement::inverse() const {
  return GroupElement{group, group->inverse_matrix(matrix)};
}

//------------------------------------------------------------------------------
// Descriptor construction
//------------------------------------------------------------------------------

GroupDescriptor* GroupDescriptor::build_so3() {
  auto* d = new GroupDescriptor();
  d->kind_ = Kind::SO3;
  d->dim_ = 3;
  d->matrix_dim_ = 3;
  d->complex_ = false;
  d->name_ = "so3";
  for (int k = 0; k < 3; ++k) {
    RealMat e = RealMat::Zero(3, 3);
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    e(j, i) = 1.0;
    e(i, j) = -1.0;
    d->basis_.push_back(real_to_complex(e));
  }
  d->finalize_basis();
  return d;
}

GroupDescriptor* GroupDescriptor::build_se3() {
  auto* d = new GroupDescriptor();
  d->kind_ = Kind::SE3;
  d->dim_ = 6;
  d->matrix_dim_ = 4;
  d->complex_ = false;
  d->name_ = "se3";
  // Angular block first (hat maps embedded top-left), then linear directions.
  for (int k = 0; k < 3; ++k) {
    RealMat e = RealMat::Zero(4, 4);
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    e(j, i) = 1.0;
    e(i, j) = -1.0;
    d->basis_.push_back(real_to_complex(e));
  }
  for (int k = 0; k < 3; ++k) {
    RealMat e = RealMat::Zero(4, 4);
    e(k, 3) = 1.0;
    d->basis_.push_back(real_to_complex(e));
  }
  d->finalize_basis();
  return d;
}

GroupDescriptor* GroupDescriptor::build_sun(int n) {
  if (n < 2) {
    throw ConfigError("sun:<n> requires n >= 2");
  }
  auto* d = new GroupDescriptor();
  d->kind_ = Kind::SUn;
  d->dim_ = n * n - 1;
  d->matrix_dim_ = n;
  d->parameter_ = n;
  d->complex_ = true;
  d->name_ = "sun:" + std::to_string(n);
  // Generalized Pauli basis sigma_a (trace-orthogonal, tr(sigma_a sigma_b) =
  // 2 delta_ab), scaled to E_a = -i/2 sigma_a.  Order: for each column k the
  // symmetric and antisymmetric off-diagonal pairs, then the k-th diagonal
  // generator; for n = 2 this is exactly -i/2 (sigma_x, sigma_y, sigma_z).
  const Complex I(0.0, 1.0);
  const Complex scale = -I * 0.5;
  for (int k = 1; k < n; ++k) {
    for (int j = 0; j < k; ++j) {
      Mat s = Mat::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      d->basis_.push_back(scale * s);
      Mat a = Mat::Zero(n, n);
      a(j, k) = -I;
      a(k, j) = I;
      d->basis_.push_back(scale * a);
    }
    Mat diag = Mat::Zero(n, n);
    const double norm = std::sqrt(2.0 / (k * (k + 1.0)));
    for (int m = 0; m < k; ++m) diag(m, m) = norm;
    diag(k, k) = -norm * k;
    d->basis_.push_back(scale * diag);
  }
  d->finalize_basis();
  return d;
}

GroupDescriptor* GroupDescriptor::build_abelian(int m) {
  if (m < 1) {
    throw ConfigError("abelian:<m> requires m >= 1");
  }
  auto* d = new GroupDescriptor();
  d->kind_ = Kind::AbelianR;
  d->dim_ = m;
  d->matrix_dim_ = m + 1;
  d->parameter_ = m;
  d->complex_ = false;
  d->name_ = "abelian:" + std::to_string(m);
  for (int k = 0; k < m; ++k) {
    RealMat e = RealMat::Zero(m + 1, m + 1);
    e(k, m) = 1.0;
    d->basis_.push_back(real_to_complex(e));
  }
  d->finalize_basis();
  return d;
}

void GroupDescriptor::finalize_basis() {
  const int nn = matrix_dim_ * matrix_dim_;
  RealMat unvec(2 * nn, dim_);
  for (int j = 0; j < dim_; ++j) {
    unvec.col(j) = stack_real(basis_[j]);
  }
  // Bases are linearly independent, so the normal equations are well posed.
  basis_pinv_ = (unvec.transpose() * unvec).ldlt().solve(unvec.transpose());

  bracket_.assign(dim_, RealMat::Zero(dim_, dim_));
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      const Mat comm = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      const AlgebraVector c = from_matrix(comm);
      for (int k = 0; k < dim_; ++k) {
        bracket_[k](i, j) = c[k];
      }
    }
  }
}

//------------------------------------------------------------------------------
// Descriptor registry
//------------------------------------------------------------------------------

const GroupDescriptor& GroupDescriptor::so3() {
  static const GroupDescriptor* inst = build_so3();
  return *inst;
}

const GroupDescriptor& GroupDescriptor::se3() {
  static const GroupDescriptor* inst = build_se3();
  return *inst;
}

const GroupDescriptor& GroupDescriptor::sun(int n) {
  static std::map<int, std::unique_ptr<GroupDescriptor>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::unique_ptr<GroupDescriptor>(build_sun(n))).first;
  }
  return *it->second;
}

const GroupDescriptor& GroupDescriptor::abelian(int m) {
  static std::map<int, std::unique_ptr<GroupDescriptor>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) {
    it = cache.emplace(m, std::unique_ptr<GroupDescriptor>(build_abelian(m))).first;
  }
  return *it->second;
}

const GroupDescriptor& GroupDescriptor::from_name(const std::string& name) {
  if (name == "so3") return so3();
  if (name == "se3") return se3();
  const auto parse_tail = [&name](const std::string& prefix) -> int {
    std::istringstream in(name.substr(prefix.size()));
    int v = 0;
    char trailing = 0;
    if (!(in >> v) || in.get(trailing)) {
      throw ConfigError("malformed group name '" + name + "'");
    }
    return v;
  };
  if (name.rfind("sun:", 0) == 0) return sun(parse_tail("sun:"));
  if (name.rfind("abelian:", 0) == 0) return abelian(parse_tail("abelian:"));
  throw ConfigError("unknown group name '" + name +
                    "' (expected so3, se3, sun:<n>, abelian:<m>)");
}

//------------------------------------------------------------------------------
// Coordinates and brackets
//------------------------------------------------------------------------------

Mat GroupDescriptor::to_matrix(const AlgebraVector& xi) const {
  if (xi.size() != dim_) {
    throw std::invalid_argument("to_matrix: coordinate size " + std::to_string(xi.size()) +
                                " does not match algebra dimension " + std::to_string(dim_));
  }
  Mat out = Mat::Zero(matrix_dim_, matrix_dim_);
  for (int j = 0; j < dim_; ++j) {
    out += xi[j] * basis_[j];
  }
  return out;
}

AlgebraVector GroupDescriptor::from_matrix(const Mat& m, double* residual) const {
  if (m.rows() != matrix_dim_ || m.cols() != matrix_dim_) {
    throw std::invalid_argument("from_matrix: matrix size mismatch for group " + name_);
  }
  const Vec stacked = stack_real(m);
  AlgebraVector coords = basis_pinv_ * stacked;
  const double defect = (stack_real(to_matrix(coords)) - stacked).norm();
  if (residual != nullptr) {
    *residual = defect;
  } else if (defect > 1e-8 * (1.0 + stacked.norm())) {
    throw NumericError("from_matrix: input lies outside the algebra of " + name_ +
                       " (residual " + std::to_string(defect) + ")");
  }
  return coords;
}

Mat GroupDescriptor::hat(const Eigen::Vector3d& v) const {
  if (kind_ != Kind::SO3) {
    throw std::invalid_argument("hat: descriptor mismatch (requires so3, got " + name_ + ")");
  }
  return to_matrix(v);
}

AlgebraVector GroupDescriptor::ad(const AlgebraVector& xi, const AlgebraVector& eta) const {
  if (xi.size() != dim_ || eta.size() != dim_) {
    throw std::invalid_argument("ad: coordinate size mismatch for group " + name_);
  }
  AlgebraVector out(dim_);
  for (int k = 0; k < dim_; ++k) {
    out[k] = xi.dot(bracket_[k] * eta);
  }
  return out;
}

RealMat GroupDescriptor::ad_matrix(const AlgebraVector& xi) const {
  RealMat out(dim_, dim_);
  for (int k = 0; k < dim_; ++k) {
    out.row(k) = xi.transpose() * bracket_[k];
  }
  return out;
}

DualVector GroupDescriptor::ad_star(const AlgebraVector& xi, const DualVector& mu) const {
  if (mu.size() != dim_) {
    throw std::invalid_argument("ad_star: dual size mismatch for group " + name_);
  }
  return ad_matrix(xi).transpose() * mu;
}

AlgebraVector GroupDescriptor::Ad(const GroupElement& g, const AlgebraVector& xi) const {
  if (g.group != this) {
    throw std::invalid_argument("Ad: element does not belong to group " + name_);
  }
  return from_matrix(g.matrix * to_matrix(xi) * inverse_matrix(g.matrix));
}

RealMat GroupDescriptor::Ad_matrix(const GroupElement& g) const {
  if (g.group != this) {
    throw std::invalid_argument("Ad_matrix: element does not belong to group " + name_);
  }
  const Mat ginv = inverse_matrix(g.matrix);
  RealMat out(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    out.col(j) = from_matrix(g.matrix * basis_[j] * ginv);
  }
  return out;
}

DualVector GroupDescriptor::Ad_star(const GroupElement& g, const DualVector& mu) const {
  if (mu.size() != dim_) {
    throw std::invalid_argument("Ad_star: dual size mismatch for group " + name_);
  }
  return Ad_matrix(g).transpose() * mu;
}

//------------------------------------------------------------------------------
// Elements, residuals, inverses
//------------------------------------------------------------------------------

GroupElement GroupDescriptor::identity() const {
  return GroupElement{this, Mat::Identity(matrix_dim_, matrix_dim_)};
}

double GroupDescriptor::group_residual(const Mat& m) const {
  if (m.rows() != matrix_dim_ || m.cols() != matrix_dim_) {
    throw std::invalid_argument("group_residual: matrix size mismatch for group " + name_);
  }
  const Mat eye = Mat::Identity(matrix_dim_, matrix_dim_);
  double defect = 0.0;
  if (!complex_) {
    defect += m.imag().norm();
  }
  switch (kind_) {
    case Kind::SO3:
      defect += (m.adjoint() * m - eye).norm();
      defect += std::abs(m.determinant() - Complex(1.0, 0.0));
      break;
    case Kind::SUn:
      defect += (m.adjoint() * m - eye).norm();
      defect += std::abs(m.determinant() - Complex(1.0, 0.0));
      break;
    case Kind::SE3: {
      const Mat r = m.topLeftCorner(3, 3);
      defect += (r.adjoint() * r - Mat::Identity(3, 3)).norm();
      defect += std::abs(r.determinant() - Complex(1.0, 0.0));
      defect += m.row(3).head(3).norm();
      defect += std::abs(m(3, 3) - Complex(1.0, 0.0));
      break;
    }
    case Kind::AbelianR: {
      const int mm = parameter_;
      defect += (m.topLeftCorner(mm, mm) - Mat::Identity(mm, mm)).norm();
      defect += m.row(mm).head(mm).norm();
      defect += std::abs(m(mm, mm) - Complex(1.0, 0.0));
      break;
    }
  }
  return defect;
}

GroupElement GroupDescriptor::element(const Mat& m) const {
  const double defect = group_residual(m);
  if (defect > 1e-8) {
    throw NumericError("element: matrix violates the defining relations of " + name_ +
                       " (residual " + std::to_string(defect) + ")");
  }
  return GroupElement{this, m};
}

Mat GroupDescriptor::inverse_matrix(const Mat& m) const {
  switch (kind_) {
    case Kind::SO3:
    case Kind::SUn:
      return m.adjoint();
    case Kind::SE3: {
      Mat inv = Mat::Identity(4, 4);
      const Mat rt = m.topLeftCorner(3, 3).transpose();
      inv.topLeftCorner(3, 3) = rt;
      inv.topRightCorner(3, 1) = -rt * m.topRightCorner(3, 1);
      return inv;
    }
    case Kind::AbelianR: {
      const int mm = parameter_;
      Mat inv = Mat::Identity(mm + 1, mm + 1);
      inv.topRightCorner(mm, 1) = -m.topRightCorner(mm, 1);
      return inv;
    }
  }
  throw std::logic_error("inverse_matrix: unreachable");
}

//------------------------------------------------------------------------------
// Cayley retraction family
//------------------------------------------------------------------------------

void GroupDescriptor::require_cayley_support(const char* op) const {
  if (kind_ == Kind::SUn && parameter_ > 2) {
    throw std::invalid_argument(std::string(op) +
                                ": the Cayley retraction leaves sun:" + std::to_string(parameter_) +
                                "; only sun:2 is supported by the retraction family");
  }
}

GroupElement GroupDescriptor::cayley(const AlgebraVector& xi) const {
  require_cayley_support("cayley");
  const Mat x = to_matrix(xi);
  const Mat eye = Mat::Identity(matrix_dim_, matrix_dim_);
  const Mat a = eye - 0.5 * x;
  const Mat b = eye + 0.5 * x;
  Eigen::PartialPivLU<Mat> lu(a);
  const Mat g = lu.solve(b);
  if ((a * g - b).norm() > 1e-8 * (1.0 + b.norm())) {
    throw NumericError("cayley: singular linear solve for group " + name_);
  }
  return GroupElement{this, g};
}

AlgebraVector GroupDescriptor::cayley_inv(const GroupElement& g) const {
  require_cayley_support("cayley_inv");
  if (g.group != this) {
    throw std::invalid_argument("cayley_inv: element does not belong to group " + name_);
  }
  const Mat eye = Mat::Identity(matrix_dim_, matrix_dim_);
  const Mat sum = g.matrix + eye;
  Eigen::FullPivLU<Mat> lu(sum);
  if (!lu.isInvertible()) {
    throw NumericError("cayley_inv: g + e is singular (element at the retraction cut locus)");
  }
  // xi_hat = 2 (g - e)(g + e)^{-1}, computed via the transposed system.
  const Mat solved = lu.transpose().solve((2.0 * (g.matrix - eye)).transpose());
  const Mat xhat = solved.transpose();
  return from_matrix(xhat);
}

RealMat GroupDescriptor::dtau_matrix(const AlgebraVector& xi) const {
  require_cayley_support("dtau_matrix");
  const Mat x = to_matrix(xi);
  const Mat eye = Mat::Identity(matrix_dim_, matrix_dim_);
  Eigen::PartialPivLU<Mat> lu_plus(eye + 0.5 * x);
  Eigen::PartialPivLU<Mat> lu_minus((eye - 0.5 * x).transpose());
  RealMat out(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    const Mat conj = lu_minus.solve(lu_plus.solve(basis_[j]).transpose()).transpose();
    out.col(j) = from_matrix(conj);
  }
  return out;
}

AlgebraVector GroupDescriptor::dtau(const AlgebraVector& xi, const AlgebraVector& eta) const {
  require_cayley_support("dtau");
  const Mat x = to_matrix(xi);
  const Mat eye = Mat::Identity(matrix_dim_, matrix_dim_);
  Eigen::PartialPivLU<Mat> lu_plus(eye + 0.5 * x);
  Eigen::PartialPivLU<Mat> lu_minus((eye - 0.5 * x).transpose());
  const Mat conj = lu_minus.solve(lu_plus.solve(to_matrix(eta)).transpose()).transpose();
  return from_matrix(conj);
}

AlgebraVector GroupDescriptor::dtau_inv(const AlgebraVector& xi, const AlgebraVector& eta) const {
  const RealMat d = dtau_matrix(xi);
  const Eigen::PartialPivLU<RealMat> lu(d);
  const AlgebraVector out = lu.solve(eta);
  if ((d * out - eta).norm() > 1e-8 * (1.0 + eta.norm())) {
    throw NumericError("dtau_inv: singular trivialized differential for group " + name_);
  }
  return out;
}

DualVector GroupDescriptor::dtau_star(const AlgebraVector& xi, const DualVector& mu) const {
  return dtau_matrix(xi).transpose() * mu;
}

DualVector GroupDescriptor::dtau_inv_star(const AlgebraVector& xi, const DualVector& mu) const {
  const RealMat dt = dtau_matrix(xi).transpose();
  const Eigen::PartialPivLU<RealMat> lu(dt);
  const DualVector out = lu.solve(mu);
  if ((dt * out - mu).norm() > 1e-8 * (1.0 + mu.norm())) {
    throw NumericError("dtau_inv_star: singular trivialized differential for group " + name_);
  }
  return out;
}

GroupElement GroupDescriptor::exp(const AlgebraVector& xi) const {
  const Mat x = to_matrix(xi);
  return GroupElement{this, x.exp()};
}

}  // namespace hpsplines
