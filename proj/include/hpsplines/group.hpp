/// @file group.hpp
/// @brief Matrix Lie group descriptors: bases, brackets, (co)adjoints, the
/// Cayley retraction and its trivialized differential.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hpsplines/types.hpp"

namespace hpsplines {

class GroupDescriptor;

/// A group element: a matrix together with the descriptor it belongs to.
struct GroupElement {
  const GroupDescriptor* group = nullptr;
  Mat matrix;

  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;
};

/// Immutable description of one of the supported matrix Lie groups.
///
/// All algebra-level quantities are expressed as real coordinate vectors in a
/// fixed ordered basis of the Lie algebra; duals use the dual basis, so the
/// natural pairing is the coordinate dot product.  Supported groups:
///
///  - so3      rotations, 3x3 real, basis = hat(e_1), hat(e_2), hat(e_3)
///  - se3      rigid motions as homogeneous 4x4 [[R, r], [0, 1]], coordinates
///             ordered (angular, linear)
///  - sun:n    special unitary, n x n complex, real coordinates over the
///             anti-Hermitian traceless basis -i/2 * (generalized Pauli)
///  - abelian:m  translations of R^m embedded as (m+1)x(m+1) [[I, v], [0, 1]]
///
/// Descriptors are cached singletons; hold them by pointer or reference.
class GroupDescriptor {
 public:
  enum class Kind { SO3, SE3, SUn, AbelianR };

  static const GroupDescriptor& so3();
  static const GroupDescriptor& se3();
  /// Special unitary SU(n), n >= 2.  Algebra-level operations work for all n;
  /// the Cayley retraction family requires n == 2 and throws otherwise.
  static const GroupDescriptor& sun(int n);
  static const GroupDescriptor& abelian(int m);
  /// Parses "so3", "se3", "sun:<n>", "abelian:<m>".
  static const GroupDescriptor& from_name(const std::string& name);

  Kind kind() const { return kind_; }
  /// Dimension of the Lie algebra (number of real coordinates).
  int dim() const { return dim_; }
  /// Size of the square matrices realizing the group.
  int matrix_dim() const { return matrix_dim_; }
  /// True for the special unitary groups (complex matrix entries).
  bool is_complex() const { return complex_; }
  /// The n of sun:n or the m of abelian:m; 0 otherwise.
  int parameter() const { return parameter_; }
  const std::string& name() const { return name_; }

  /// The k-th algebra basis element as a matrix.
  const Mat& basis_matrix(int k) const { return basis_[k]; }

  /// Linear coordinates -> algebra matrix (the "hat" map of the basis).
  Mat to_matrix(const AlgebraVector& xi) const;

  /// Algebra matrix -> coordinates; least-squares in the basis span.  When
  /// `residual` is non-null it receives the Frobenius distance between `m` and
  /// the reconstructed span element (a consistency measure); otherwise the
  /// call throws NumericError if that distance exceeds an internal tolerance.
  AlgebraVector from_matrix(const Mat& m, double* residual = nullptr) const;

  /// Rotation-specific hat map; throws std::invalid_argument off so3.
  Mat hat(const Eigen::Vector3d& v) const;

  /// Lie bracket in coordinates: ad_xi(eta) = [xi, eta].
  AlgebraVector ad(const AlgebraVector& xi, const AlgebraVector& eta) const;
  /// Matrix of ad_xi in the chosen basis.
  RealMat ad_matrix(const AlgebraVector& xi) const;
  /// Coadjoint: <ad_star(xi, mu), eta> = <mu, ad(xi, eta)>.
  DualVector ad_star(const AlgebraVector& xi, const DualVector& mu) const;

  /// Adjoint action of a group element: Ad_g(xi) = g xi g^{-1} in coordinates.
  AlgebraVector Ad(const GroupElement& g, const AlgebraVector& xi) const;
  RealMat Ad_matrix(const GroupElement& g) const;
  /// Co-Adjoint: <Ad_star(g, mu), xi> = <mu, Ad_g(xi)>.
  DualVector Ad_star(const GroupElement& g, const DualVector& mu) const;

  GroupElement identity() const;
  /// Wraps a matrix as a group element after checking the defining relations
  /// (orthogonality/unitarity, determinant, block structure) to tolerance.
  GroupElement element(const Mat& m) const;
  /// Frobenius-norm defect of the defining relations of this group.
  double group_residual(const Mat& m) const;
  /// Structure-aware matrix inverse (transpose / adjoint / affine inverse).
  Mat inverse_matrix(const Mat& m) const;

  /// Cayley retraction tau(xi) = (e - xi/2)^{-1} (e + xi/2).
  GroupElement cayley(const AlgebraVector& xi) const;
  /// Inverse retraction: xi with tau(xi) = g, via xi = 2 (g - e)(g + e)^{-1}.
  /// Throws NumericError when g + e is singular (cut locus of the retraction).
  AlgebraVector cayley_inv(const GroupElement& g) const;

  /// Trivialized differential of the retraction,
  ///   dtau(xi, eta) = coords of (e + xi/2)^{-1} eta_hat (e - xi/2)^{-1},
  /// together with its inverse and their duals.  All four are realized through
  /// the matrix of dtau in the chosen basis.
  AlgebraVector dtau(const AlgebraVector& xi, const AlgebraVector& eta) const;
  AlgebraVector dtau_inv(const AlgebraVector& xi, const AlgebraVector& eta) const;
  DualVector dtau_star(const AlgebraVector& xi, const DualVector& mu) const;
  DualVector dtau_inv_star(const AlgebraVector& xi, const DualVector& mu) const;
  RealMat dtau_matrix(const AlgebraVector& xi) const;

  /// Matrix exponential of to_matrix(xi); reference/diagnostic use.
  GroupElement exp(const AlgebraVector& xi) const;

  GroupDescriptor(const GroupDescriptor&) = delete;
  GroupDescriptor& operator=(const GroupDescriptor&) = delete;

 private:
  GroupDescriptor() = default;
  static GroupDescriptor* build_so3();
  static GroupDescriptor* build_se3();
  static GroupDescriptor* build_sun(int n);
  static GroupDescriptor* build_abelian(int m);
  void finalize_basis();
  void require_cayley_support(const char* op) const;

  Kind kind_ = Kind::SO3;
  int dim_ = 0;
  int matrix_dim_ = 0;
  int parameter_ = 0;
  bool complex_ = false;
  std::string name_;
  std::vector<Mat> basis_;
  /// Structure constants: bracket_[k](i, j) = coefficient of E_k in [E_i, E_j].
  std::vector<RealMat> bracket_;
  /// Pseudo-inverse of the (real-stacked) basis unvec matrix; used by
  /// from_matrix.
  RealMat basis_pinv_;
};

}  // namespace hpsplines
