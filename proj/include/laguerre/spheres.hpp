#pragma once

#include <cmath>
#include <variant>

#include "laguerre/lorentz.hpp"

namespace laguerre {

/// Oriented sphere S(p, r) = {(x, xi) : x - p = r xi}. r = 0 is the point
/// sphere at p; the sign of r encodes orientation (r > 0: outward normal).
class Sphere {
 public:
  Sphere(Vector center, double radius) : center_(std::move(center)), radius_(radius) {
    if (center_.size() < 1) throw UsageError("sphere center must be non-empty");
    if (!center_.allFinite() || !std::isfinite(radius_))
      throw UsageError("sphere parameters must be finite");
  }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return static_cast<int>(center_.size()); }

 private:
  Vector center_;
  double radius_;
};

/// Oriented hyperplane P(xi, lambda) = {x : x . xi = lambda} with unit normal xi.
class Plane {
 public:
  Plane(Vector normal, double offset) : normal_(std::move(normal)), offset_(offset) {
    if (normal_.size() < 1) throw UsageError("plane normal must be non-empty");
    if (!normal_.allFinite() || !std::isfinite(offset_))
      throw UsageError("plane parameters must be finite");
    if (std::abs(normal_.norm() - 1.0) > 1e-12)
      throw UsageError("plane normal must have unit length");
  }
  const Vector& normal() const { return normal_; }
  double offset() const { return offset_; }
  int dim() const { return static_cast<int>(normal_.size()); }

 private:
  Vector normal_;
  double offset_;
};

using SphereElement = std::variant<Sphere, Plane>;

/// The coordinate [wp]: point sphere at infinity, not a member of Sigma.
struct PointAtInfinity {};

using Classified = std::variant<Sphere, Plane, PointAtInfinity>;

inline int dim(const SphereElement& s) {
  return std::visit([](const auto& e) { return e.dim(); }, s);
}

/// Point of the quadric Q^{n+1}. The stored representative is scaled so that
/// its largest-magnitude entry equals +1 (first such index).
class ProjectivePoint {
 public:
  explicit ProjectivePoint(const LorentzVector& X, double tol = kDefaultTol) {
    if (X.size() < 4) throw UsageError("projective point needs n+3 >= 4 entries");
    if (!X.allFinite()) throw InvalidCoordinate("projective point must be finite");
    Eigen::Index k = 0;
    const double m = X.cwiseAbs().maxCoeff(&k);
    if (m == 0.0) throw InvalidCoordinate("zero vector is not a projective point");
    rep_ = X / (X(k) > 0 ? m : -m);
    if (std::abs(inner(rep_, rep_)) > tol * rep_.squaredNorm())
      throw InvalidCoordinate("coordinate is not light-like");
  }

  const LorentzVector& representative() const { return rep_; }
  int base_dim() const { return static_cast<int>(rep_.size()) - 3; }

  bool proportional_to(const ProjectivePoint& o, double tol = kDefaultTol) const {
    if (o.rep_.size() != rep_.size()) return false;
    const double d = std::min((rep_ - o.rep_).cwiseAbs().maxCoeff(),
                              (rep_ + o.rep_).cwiseAbs().maxCoeff());
    return d <= tol;
  }

 private:
  LorentzVector rep_;
};

/// Unit contact element (x, xi) of UR^n.
class ContactElement {
 public:
  ContactElement(Vector x, Vector xi, double tol = 1e-12) : x_(std::move(x)), xi_(std::move(xi)) {
    if (x_.size() != xi_.size() || x_.size() < 1)
      throw UsageError("contact element: x and xi must have equal positive length");
    if (!x_.allFinite() || !xi_.allFinite()) throw UsageError("contact element must be finite");
    if (std::abs(xi_.norm() - 1.0) > tol) throw UsageError("contact element: |xi| must be 1");
  }
  const Vector& x() const { return x_; }
  const Vector& xi() const { return xi_; }
  int dim() const { return static_cast<int>(x_.size()); }

 private:
  Vector x_;
  Vector xi_;
};

/// Raw coordinate vector of a sphere or plane:
///   S(p,r)    -> (1/2(1+|p|^2-r^2), 1/2(1-|p|^2+r^2), p, -r)
///   P(xi,lam) -> (lam, -lam, xi, 1)
inline LorentzVector sphere_vector(const SphereElement& s) {
  return std::visit(
      [](const auto& e) -> LorentzVector {
        using E = std::decay_t<decltype(e)>;
        const int n = e.dim();
        LorentzVector g(n + 3);
        if constexpr (std::is_same_v<E, Sphere>) {
          const double p2 = e.center().squaredNorm();
          const double r = e.radius();
          g(0) = 0.5 * (1.0 + p2 - r * r);
          g(1) = 0.5 * (1.0 - p2 + r * r);
          g.segment(2, n) = e.center();
          g(n + 2) = -r;
        } else {
          g(0) = e.offset();
          g(1) = -e.offset();
          g.segment(2, n) = e.normal();
          g(n + 2) = 1.0;
        }
        return g;
      },
      s);
}

inline ProjectivePoint sphere_coord(const SphereElement& s) { return ProjectivePoint(sphere_vector(s)); }

/// Inverse of sphere_coord on Q^{n+1}; [wp] maps to PointAtInfinity.
inline Classified classify_coord(const ProjectivePoint& gamma, double tol = kDefaultTol) {
  const LorentzVector& g = gamma.representative();
  const int n = gamma.base_dim();
  if (gamma.proportional_to(ProjectivePoint(wp(n)), tol)) return PointAtInfinity{};
  const double s = g(0) + g(1);  // -<g, wp>
  if (std::abs(s) > tol) {
    const LorentzVector h = g / s;
    return Sphere(h.segment(2, n), -h(n + 2));
  }
  const double last = g(n + 2);
  if (std::abs(last) <= tol) throw InvalidCoordinate("coordinate degenerates onto [wp]");
  Vector xi = g.segment(2, n) / last;
  const double lam = g(0) / last;
  if (std::abs(xi.norm() - 1.0) > 1e3 * tol)
    throw InvalidCoordinate("plane coordinate with non-unit normal");
  xi.normalize();
  return Plane(xi, lam);
}

/// <gamma_a, gamma_b> = 0 on normalized representatives.
inline bool oriented_contact(const SphereElement& a, const SphereElement& b, double tol = kDefaultTol) {
  if (dim(a) != dim(b)) throw UsageError("oriented_contact: dimension mismatch");
  const auto ga = sphere_coord(a).representative();
  const auto gb = sphere_coord(b).representative();
  return std::abs(inner(ga, gb)) <= tol;
}

/// F = |p* - p|^2 - (r* - r)^2, the squared common tangent length.
inline double tangential_invariant(const SphereElement& a, const SphereElement& b) {
  const auto* sa = std::get_if<Sphere>(&a);
  const auto* sb = std::get_if<Sphere>(&b);
  if (!sa || !sb) throw UsageError("tangential_invariant is defined for spheres only");
  if (sa->dim() != sb->dim()) throw UsageError("tangential_invariant: dimension mismatch");
  const double dr = sb->radius() - sa->radius();
  return (sb->center() - sa->center()).squaredNorm() - dr * dr;
}

/// The projective line of spheres in oriented contact at one contact element,
/// given by its point-sphere member and its plane member.
class LieLine {
 public:
  LieLine(ProjectivePoint point_sphere, ProjectivePoint plane, double tol = kDefaultTol)
      : gamma1_(std::move(point_sphere)), gamma2_(std::move(plane)) {
    const int n = gamma1_.base_dim();
    if (gamma2_.base_dim() != n) throw InvalidLine("Lie line members differ in dimension");
    const auto& a = gamma1_.representative();
    const auto& b = gamma2_.representative();
    const LorentzVector p = wp(n);
    if (std::abs(inner(a, b)) > tol) throw InvalidLine("Lie line members are not orthogonal");
    if (std::abs(inner(b, p)) > tol) throw InvalidLine("plane member is not orthogonal to wp");
    if (std::abs(inner(a, p)) <= tol) throw InvalidLine("point-sphere member lies in wp-perp");
  }
  const ProjectivePoint& gamma1() const { return gamma1_; }
  const ProjectivePoint& gamma2() const { return gamma2_; }

 private:
  ProjectivePoint gamma1_;
  ProjectivePoint gamma2_;
};

/// Raw pencil basis at (x, xi): point sphere S(x,0) and plane P(xi, x.xi).
inline std::pair<LorentzVector, LorentzVector> lie_pair(const ContactElement& c) {
  const int n = c.dim();
  const double x2 = c.x().squaredNorm();
  const double xx = c.x().dot(c.xi());
  LorentzVector g1(n + 3), g2(n + 3);
  g1 << 0.5 * (1.0 + x2), 0.5 * (1.0 - x2), c.x(), 0.0;
  g2 << xx, -xx, c.xi(), 1.0;
  return {g1, g2};
}

inline LieLine lie_line(const ContactElement& c) {
  auto [g1, g2] = lie_pair(c);
  return LieLine(ProjectivePoint(g1), ProjectivePoint(g2));
}

namespace detail {

/// Recovers (x, xi) from any two vectors spanning the line: the plane member
/// is the combination orthogonal to wp, the point sphere the combination
/// with vanishing last entry.
inline ContactElement contact_from_span(LorentzVector P, LorentzVector Q, double tol = kDefaultTol) {
  const int n = base_dim(P);
  if (Q.size() != P.size()) throw InvalidLine("line span dimension mismatch");
  const double mp = P.cwiseAbs().maxCoeff(), mq = Q.cwiseAbs().maxCoeff();
  if (mp == 0.0 || mq == 0.0) throw InvalidLine("zero vector in line span");
  P /= mp;
  Q /= mq;
  const LorentzVector p = wp(n);
  const double wP = inner(P, p), wQ = inner(Q, p);
  const LorentzVector plane = wQ * P - wP * Q;
  const LorentzVector point = Q(n + 2) * P - P(n + 2) * Q;
  const double mplane = plane.cwiseAbs().maxCoeff(), mpoint = point.cwiseAbs().maxCoeff();
  if (mplane <= tol || mpoint <= tol) throw InvalidLine("degenerate line: members coincide");
  const double b = plane(n + 2);
  const double s = point(0) + point(1);
  if (std::abs(b) <= tol * mplane || std::abs(s) <= tol * mpoint)
    throw InvalidLine("line does not contain a point sphere and a plane");
  // The two members must be distinct projective points.
  const LorentzVector u = plane / mplane, v = point / mpoint;
  if (std::min((u - v).cwiseAbs().maxCoeff(), (u + v).cwiseAbs().maxCoeff()) <= tol)
    throw InvalidLine("degenerate line: members coincide");
  Vector xi = plane.segment(2, n) / b;
  Vector x = point.segment(2, n) / s;
  if (std::abs(xi.norm() - 1.0) > 1e-6) throw InvalidLine("plane member has non-unit normal");
  xi.normalize();
  return ContactElement(std::move(x), std::move(xi));
}

}  // namespace detail

inline ContactElement contact_from_line(const LieLine& l) {
  return detail::contact_from_span(l.gamma1().representative(), l.gamma2().representative());
}

}  // namespace laguerre
