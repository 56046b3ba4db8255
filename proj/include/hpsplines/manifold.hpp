/// @file manifold.hpp
/// @brief Homogeneous spaces the groups act on: points, distances, momentum
/// maps, and the soft-constraint penalty forces.
#pragma once

#include <string>

#include "hpsplines/group.hpp"
#include "hpsplines/types.hpp"

namespace hpsplines {

class Manifold;

/// A point on a manifold in ambient coordinates.  Real manifolds keep the
/// imaginary parts identically zero; complex projective points are stored as
/// normalized representatives in C^{n+1}.
struct ObjectPoint {
  const Manifold* manifold = nullptr;
  CVec coords;
};

/// Real pairing between an ambient covector and an ambient tangent vector.
double ambient_pair(const CVec& alpha, const CVec& v);

/// Immutable description of a supported homogeneous space.
///
///  - sphere2       unit sphere in R^3 (acted on by so3), chordal distance
///  - r<m>          Euclidean R^m (acted on by abelian:m translations)
///  - sphere2xr3    S^2 x R^3 (acted on by se3), product chordal distance
///  - cpn:<n>       complex projective space (acted on by sun:<n+1>),
///                  Fubini-Study geodesic distance
///
/// Descriptors are cached singletons; hold them by pointer or reference.
class Manifold {
 public:
  enum class Kind { Sphere2, Euclidean, Sphere2xR3, CPn };

  static const Manifold& sphere2();
  static const Manifold& euclidean(int m);
  static const Manifold& sphere2xr3();
  static const Manifold& cpn(int n);
  /// Parses "sphere2", "r<m>", "sphere2xr3", "cpn:<n>".
  static const Manifold& from_name(const std::string& name);

  Kind kind() const { return kind_; }
  /// Complex coordinate count of the ambient representation.
  int coord_size() const { return coord_size_; }
  /// The n of cpn:<n> or the m of r<m>; 0 otherwise.
  int parameter() const { return parameter_; }
  const std::string& name() const { return name_; }
  /// True when `group` is the symmetry group acting on this manifold.
  bool compatible_with(const GroupDescriptor& group) const;
  /// The compatible group descriptor.
  const GroupDescriptor& symmetry_group() const;

  /// Validates/normalizes ambient coordinates into a point; ConfigError on
  /// off-manifold input (unit-norm defect above 1e-6, or a zero projective
  /// representative).
  ObjectPoint make_point(const CVec& coords) const;

  /// Natural left action q -> g . q, renormalized against drift.
  ObjectPoint act(const GroupElement& g, const ObjectPoint& q) const;

  /// Geodesic-equivalent distance used by the penalty (chordal for the real
  /// manifolds, Fubini-Study for cpn).
  double distance(const ObjectPoint& q1, const ObjectPoint& q2) const;

  /// Ambient-coordinate gradient of distance(., q2) at q1, tangentially
  /// projected; returns the zero covector at coincident points.  Throws
  /// NumericError on the Fubini-Study cut locus.
  CVec d1_distance(const ObjectPoint& q1, const ObjectPoint& q2) const;

  /// The product distance * d1_distance, which stays smooth at coincidence.
  CVec d_times_d1_distance(const ObjectPoint& q1, const ObjectPoint& q2) const;

  /// Infinitesimal action of algebra element xi at q, in ambient coordinates.
  CVec infinitesimal_action(const GroupDescriptor& group, const AlgebraVector& xi,
                            const ObjectPoint& q) const;

  /// Cotangent-lift momentum map: <momentum_map(q, alpha), xi> =
  /// ambient_pair(alpha, infinitesimal_action(xi, q)).
  DualVector momentum_map(const GroupDescriptor& group, const ObjectPoint& q,
                          const CVec& alpha) const;

  /// Penalty force of the soft constraint (1/2 sigma^2) d^2(q, target):
  /// (1/sigma^2) momentum_map(q, d_times_d1_distance(q, target)).
  DualVector penalty_force(const GroupDescriptor& group, const ObjectPoint& q,
                           const ObjectPoint& target, double sigma) const;

  /// Directional derivative of the penalty force in its base point: the
  /// covector A with <A, eta> = d/de <penalty_force(exp(e eta) . q), rho>.
  DualVector penalty_force_derivative(const GroupDescriptor& group, const ObjectPoint& q,
                                      const ObjectPoint& target, double sigma,
                                      const DualVector& rho) const;

  Manifold(const Manifold&) = delete;
  Manifold& operator=(const Manifold&) = delete;

 private:
  Manifold() = default;
  static Manifold* build(Kind kind, int parameter);
  void require_point(const ObjectPoint& q, const char* op) const;

  Kind kind_ = Kind::Sphere2;
  int coord_size_ = 0;
  int parameter_ = 0;
  std::string name_;
};

}  // namespace hpsplines
