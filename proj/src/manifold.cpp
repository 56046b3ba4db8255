#include "hpsplines/manifold.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <utility>

namespace hpsplines {

namespace {

constexpr double kOnManifoldTol = 1e-6;
constexpr double kCoincidenceTol = 1e-14;
// Below this squared-overlap threshold a Fubini-Study pair counts as lying on
// the cut locus: the penalty gradient direction is no longer defined.
constexpr double kCutLocusTol = 1e-12;

Eigen::Vector3d real3(const CVec& v, int offset = 0) {
  return v.segment(offset, 3).real();
}

CVec to_cvec(const Eigen::VectorXd& v) { return v.cast<Complex>(); }

// Fubini-Study helpers.  With overlap F = |<psi, phi>|^2 and distance
// d(F) = 2 acos(sqrt(F)), the penalty chain rule uses
//   c(F) = d * d'(F) = -d / sqrt(F (1 - F)),
// which is smooth at F = 1 and evaluated by series there, and its derivative
//   c'(F) = 1 / (F - F^2) + d (1 - 2 F) / (2 (F - F^2)^{3/2}).
double fs_distance(double overlap) {
  const double s = std::sqrt(std::min(1.0, std::max(0.0, overlap)));
  return 2.0 * std::acos(s);
}

double fs_c(double overlap) {
  const double u2 = 1.0 - overlap;
  if (u2 < 1e-6) {
    return -2.0 - (4.0 / 3.0) * u2 - (16.0 / 15.0) * u2 * u2;
  }
  return -fs_distance(overlap) / std::sqrt(overlap * u2);
}

double fs_c_prime(double overlap) {
  const double u2 = 1.0 - overlap;
  if (u2 < 1e-6) {
    return 4.0 / 3.0 + (32.0 / 15.0) * u2;
  }
  const double w2 = overlap * u2;
  const double w = std::sqrt(w2);
  return 1.0 / w2 + fs_distance(overlap) * (1.0 - 2.0 * overlap) / (2.0 * w2 * w);
}

}  // namespace

double ambient_pair(const CVec& alpha, const CVec& v) {
  if (alpha.size() != v.size()) {
    throw std::invalid_argument("ambient_pair: size mismatch");
  }
  return alpha.dot(v).real();  // Eigen's dot conjugates the first argument.
}

//------------------------------------------------------------------------------
// Registry
//------------------------------------------------------------------------------

Manifold* Manifold::build(Kind kind, int parameter) {
  auto* m = new Manifold();
  m->kind_ = kind;
  m->parameter_ = parameter;
  switch (kind) {
    case Kind::Sphere2:
      m->coord_size_ = 3;
      m->name_ = "sphere2";
      break;
    case Kind::Euclidean:
      if (parameter < 1) throw ConfigError("r<m> requires m >= 1");
      m->coord_size_ = parameter;
      m->name_ = "r" + std::to_string(parameter);
      break;
    case Kind::Sphere2xR3:
      m->coord_size_ = 6;
      m->name_ = "sphere2xr3";
      break;
    case Kind::CPn:
      if (parameter < 1) throw ConfigError("cpn:<n> requires n >= 1");
      m->coord_size_ = parameter + 1;
      m->name_ = "cpn:" + std::to_string(parameter);
      break;
  }
  return m;
}

namespace {

const Manifold& cached(Manifold::Kind kind, int parameter,
                       Manifold* (*builder)(Manifold::Kind, int)) {
  static std::map<std::pair<int, int>, std::unique_ptr<Manifold>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(static_cast<int>(kind), parameter);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::unique_ptr<Manifold>(builder(kind, parameter))).first;
  }
  return *it->second;
}

}  // namespace

const Manifold& Manifold::sphere2() { return cached(Kind::Sphere2, 0, &Manifold::build); }
const Manifold& Manifold::euclidean(int m) { return cached(Kind::Euclidean, m, &Manifold::build); }
const Manifold& Manifold::sphere2xr3() { return cached(Kind::Sphere2xR3, 0, &Manifold::build); }
const Manifold& Manifold::cpn(int n) { return cached(Kind::CPn, n, &Manifold::build); }

const Manifold& Manifold::from_name(const std::string& name) {
  if (name == "sphere2") return sphere2();
  if (name == "sphere2xr3") return sphere2xr3();
  const auto parse_tail = [&name](size_t offset) -> int {
    std::istringstream in(name.substr(offset));
    int v = 0;
    char trailing = 0;
    if (!(in >> v) || in.get(trailing)) {
      throw ConfigError("malformed manifold name '" + name + "'");
    }
    return v;
  };
  if (name.rfind("cpn:", 0) == 0) return cpn(parse_tail(4));
  if (name.size() > 1 && name[0] == 'r') return euclidean(parse_tail(1));
  throw ConfigError("unknown manifold name '" + name +
                    "' (expected sphere2, r<m>, sphere2xr3, cpn:<n>)");
}

//------------------------------------------------------------------------------
// Compatibility and points
//------------------------------------------------------------------------------

bool Manifold::compatible_with(const GroupDescriptor& group) const {
  switch (kind_) {
    case Kind::Sphere2:
      return group.kind() == GroupDescriptor::Kind::SO3;
    case Kind::Euclidean:
      return group.kind() == GroupDescriptor::Kind::AbelianR &&
             group.parameter() == parameter_;
    case Kind::Sphere2xR3:
      return group.kind() == GroupDescriptor::Kind::SE3;
    case Kind::CPn:
      return group.kind() == GroupDescriptor::Kind::SUn &&
             group.parameter() == parameter_ + 1;
  }
  return false;
}

const GroupDescriptor& Manifold::symmetry_group() const {
  switch (kind_) {
    case Kind::Sphere2: return GroupDescriptor::so3();
    case Kind::Euclidean: return GroupDescriptor::abelian(parameter_);
    case Kind::Sphere2xR3: return GroupDescriptor::se3();
    case Kind::CPn: return GroupDescriptor::sun(parameter_ + 1);
  }
  throw std::logic_error("symmetry_group: unreachable");
}

void Manifold::require_point(const ObjectPoint& q, const char* op) const {
  if (q.manifold != this) {
    throw std::invalid_argument(std::string(op) + ": point does not belong to manifold " + name_);
  }
  if (q.coords.size() != coord_size_) {
    throw std::invalid_argument(std::string(op) + ": coordinate size mismatch on " + name_);
  }
}

ObjectPoint Manifold::make_point(const CVec& coords) const {
  if (coords.size() != coord_size_) {
    throw ConfigError("point on " + name_ + " needs " + std::to_string(coord_size_) +
                      " coordinates, got " + std::to_string(coords.size()));
  }
  CVec c = coords;
  if (kind_ != Kind::CPn && c.imag().norm() > 0.0) {
    throw ConfigError("point on " + name_ + " must have real coordinates");
  }
  switch (kind_) {
    case Kind::Sphere2: {
      const double n = c.norm();
      if (std::abs(n - 1.0) > kOnManifoldTol) {
        throw ConfigError("sphere2 point is not unit length (|q| = " + std::to_string(n) + ")");
      }
      c /= n;
      break;
    }
    case Kind::Euclidean:
      break;
    case Kind::Sphere2xR3: {
      const double n = c.head(3).norm();
      if (std::abs(n - 1.0) > kOnManifoldTol) {
        throw ConfigError("sphere2xr3 point has non-unit sphere component (|x| = " +
                          std::to_string(n) + ")");
      }
      c.head(3) /= n;
      break;
    }
    case Kind::CPn: {
      const double n = c.norm();
      if (n < 1e-12) {
        throw ConfigError("cpn point must be a nonzero representative");
      }
      c /= n;
      break;
    }
  }
  return ObjectPoint{this, c};
}

ObjectPoint Manifold::act(const GroupElement& g, const ObjectPoint& q) const {
  require_point(q, "act");
  if (!compatible_with(*g.group)) {
    throw std::invalid_argument("act: group " + g.group->name() +
                                " does not act on manifold " + name_);
  }
  CVec out(coord_size_);
  switch (kind_) {
    case Kind::Sphere2: {
      out = g.matrix * q.coords;
      out /= out.norm();
      break;
    }
    case Kind::Euclidean: {
      out = q.coords + g.matrix.topRightCorner(parameter_, 1);
      break;
    }
    case Kind::Sphere2xR3: {
      const Mat r = g.matrix.topLeftCorner(3, 3);
      out.head(3) = r * q.coords.head(3);
      out.head(3) /= out.head(3).norm();
      out.tail(3) = r * q.coords.tail(3) + g.matrix.topRightCorner(3, 1);
      break;
    }
    case Kind::CPn: {
      out = g.matrix * q.coords;
      out /= out.norm();
      break;
    }
  }
  return ObjectPoint{this, out};
}

//------------------------------------------------------------------------------
// Distances and their derivatives
//------------------------------------------------------------------------------

double Manifold::distance(const ObjectPoint& q1, const ObjectPoint& q2) const {
  require_point(q1, "distance");
  require_point(q2, "distance");
  if (kind_ == Kind::CPn) {
    const Complex z = q1.coords.dot(q2.coords);
    return fs_distance(std::norm(z));
  }
  return (q1.coords - q2.coords).norm();
}

CVec Manifold::d_times_d1_distance(const ObjectPoint& q1, const ObjectPoint& q2) const {
  require_point(q1, "d_times_d1_distance");
  require_point(q2, "d_times_d1_distance");
  switch (kind_) {
    case Kind::Sphere2: {
      const Eigen::Vector3d q = real3(q1.coords);
      const Eigen::Vector3d y = real3(q2.coords);
      const Eigen::Vector3d diff = q - y;
      return to_cvec(diff - q * q.dot(diff));
    }
    case Kind::Euclidean:
      return q1.coords - q2.coords;
    case Kind::Sphere2xR3: {
      const Eigen::Vector3d x = real3(q1.coords, 0);
      const Eigen::Vector3d dx = x - real3(q2.coords, 0);
      Eigen::VectorXd out(6);
      out.head(3) = dx - x * x.dot(dx);
      out.tail(3) = real3(q1.coords, 3) - real3(q2.coords, 3);
      return to_cvec(out);
    }
    case Kind::CPn: {
      // Note the conjugation order: z = <psi, phi> with Eigen's dot
      // conjugating the first argument, so z = psi^H phi.
      const Complex z = q1.coords.dot(q2.coords);
      const double overlap = std::norm(z);
      if (overlap < kCutLocusTol) {
        throw NumericError("fubini-study penalty gradient undefined at the cut locus");
      }
      const CVec grad = 2.0 * (std::conj(z) * q2.coords - overlap * q1.coords);
      return fs_c(overlap) * grad;
    }
  }
  throw std::logic_error("d_times_d1_distance: unreachable");
}

CVec Manifold::d1_distance(const ObjectPoint& q1, const ObjectPoint& q2) const {
  const double d = distance(q1, q2);
  if (d < kCoincidenceTol) {
    return CVec::Zero(coord_size_);
  }
  return d_times_d1_distance(q1, q2) / d;
}

//------------------------------------------------------------------------------
// Momentum maps and penalty forces
//------------------------------------------------------------------------------

CVec Manifold::infinitesimal_action(const GroupDescriptor& group, const AlgebraVector& xi,
                                    const ObjectPoint& q) const {
  require_point(q, "infinitesimal_action");
  if (!compatible_with(group)) {
    throw std::invalid_argument("infinitesimal_action: group " + group.name() +
                                " does not act on manifold " + name_);
  }
  if (xi.size() != group.dim()) {
    throw std::invalid_argument("infinitesimal_action: coordinate size mismatch");
  }
  switch (kind_) {
    case Kind::Sphere2: {
      const Eigen::Vector3d omega = xi;
      return to_cvec(omega.cross(real3(q.coords)));
    }
    case Kind::Euclidean:
      return to_cvec(xi);
    case Kind::Sphere2xR3: {
      const Eigen::Vector3d omega = xi.head(3);
      const Eigen::Vector3d v = xi.tail(3);
      Eigen::VectorXd out(6);
      out.head(3) = omega.cross(real3(q.coords, 0));
      out.tail(3) = omega.cross(real3(q.coords, 3)) + v;
      return to_cvec(out);
    }
    case Kind::CPn:
      return group.to_matrix(xi) * q.coords;
  }
  throw std::logic_error("infinitesimal_action: unreachable");
}

DualVector Manifold::momentum_map(const GroupDescriptor& group, const ObjectPoint& q,
                                  const CVec& alpha) const {
  require_point(q, "momentum_map");
  if (!compatible_with(group)) {
    throw std::invalid_argument("momentum_map: group " + group.name() +
                                " does not act on manifold " + name_);
  }
  DualVector mu(group.dim());
  switch (kind_) {
    case Kind::Sphere2: {
      // <alpha, omega x q> = <omega, q x alpha>
      const Eigen::Vector3d a = real3(alpha);
      mu = real3(q.coords).cross(a);
      break;
    }
    case Kind::Euclidean:
      mu = alpha.real();
      break;
    case Kind::Sphere2xR3: {
      const Eigen::Vector3d a = real3(alpha, 0);
      const Eigen::Vector3d b = real3(alpha, 3);
      mu.head(3) = real3(q.coords, 0).cross(a) + real3(q.coords, 3).cross(b);
      mu.tail(3) = b;
      break;
    }
    case Kind::CPn: {
      for (int j = 0; j < group.dim(); ++j) {
        mu[j] = (alpha.dot(group.basis_matrix(j) * q.coords)).real();
      }
      break;
    }
  }
  return mu;
}

DualVector Manifold::penalty_force(const GroupDescriptor& group, const ObjectPoint& q,
                                   const ObjectPoint& target, double sigma) const {
  return momentum_map(group, q, d_times_d1_distance(q, target)) / (sigma * sigma);
}

DualVector Manifold::penalty_force_derivative(const GroupDescriptor& group, const ObjectPoint& q,
                                              const ObjectPoint& target, double sigma,
                                              const DualVector& rho) const {
  require_point(q, "penalty_force_derivative");
  require_point(target, "penalty_force_derivative");
  if (!compatible_with(group)) {
    throw std::invalid_argument("penalty_force_derivative: group " + group.name() +
                                " does not act on manifold " + name_);
  }
  if (rho.size() != group.dim()) {
    throw std::invalid_argument("penalty_force_derivative: dual size mismatch");
  }
  const double w = 1.0 / (sigma * sigma);
  DualVector out(group.dim());
  switch (kind_) {
    case Kind::Sphere2: {
      const Eigen::Vector3d qv = real3(q.coords);
      const Eigen::Vector3d y = real3(target.coords);
      const Eigen::Vector3d r = rho;
      out = w * (qv.dot(y) * r - qv.dot(r) * y);
      break;
    }
    case Kind::Euclidean:
      out = w * rho;
      break;
    case Kind::Sphere2xR3: {
      const Eigen::Vector3d x = real3(q.coords, 0);
      const Eigen::Vector3d y = real3(q.coords, 3);
      const Eigen::Vector3d xt = real3(target.coords, 0);
      const Eigen::Vector3d yt = real3(target.coords, 3);
      const Eigen::Vector3d rw = rho.head(3);
      const Eigen::Vector3d rv = rho.tail(3);
      out.head(3) =
          w * ((x.dot(xt) + y.dot(yt)) * rw - rw.dot(x) * xt - rw.dot(y) * yt + y.cross(rv));
      out.tail(3) = w * (rw.cross(yt) + rv);
      break;
    }
    case Kind::CPn: {
      const CVec& psi = q.coords;
      const CVec& phi = target.coords;
      const Complex z = psi.dot(phi);
      const double overlap = std::norm(z);
      if (overlap < kCutLocusTol) {
        throw NumericError("fubini-study penalty derivative undefined at the cut locus");
      }
      const double c = fs_c(overlap);
      const double cp = fs_c_prime(overlap);
      const CVec grad = 2.0 * (std::conj(z) * phi - overlap * psi);
      const Mat rho_hat = group.to_matrix(rho);
      const CVec r = rho_hat * psi;
      const double base = grad.dot(r).real();
      for (int j = 0; j < group.dim(); ++j) {
        const Mat& eta_hat = group.basis_matrix(j);
        const CVec dpsi = eta_hat * psi;
        const Complex dz = -(psi.dot(eta_hat * phi));
        const double doverlap = 2.0 * (std::conj(z) * dz).real();
        const CVec dgrad =
            2.0 * (std::conj(dz) * phi - doverlap * psi - overlap * dpsi);
        out[j] = w * (cp * doverlap * base + c * dgrad.dot(r).real() +
                      c * grad.dot(rho_hat * dpsi).real());
      }
      break;
    }
  }
  return out;
}

}  // namespace hpsplines
