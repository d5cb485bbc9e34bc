#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "laguerre/hypersurface.hpp"
#include "laguerre/jet.hpp"
#include "laguerre/spheres.hpp"
#include "laguerre/surfaces.hpp"

namespace laguerre {

namespace detail {

/// <a, b> with the last coordinate timelike.
inline double lorentz_dot(const Vector& a, const Vector& b) {
  const auto k = a.size() - 1;
  return a.head(k).dot(b.head(k)) - a(k) * b(k);
}

}  // namespace detail

/// Contact element of UR^n_1: x in R^n_1, <xi, xi> = -1.
class ContactElementR31 {
 public:
  ContactElementR31(Vector x, Vector xi, double tol = 1e-10) : x_(std::move(x)), xi_(std::move(xi)) {
    if (x_.size() != xi_.size() || x_.size() < 2) throw UsageError("R^n_1 contact element: x and xi need equal length >= 2");
    if (!x_.allFinite() || !xi_.allFinite()) throw UsageError("R^n_1 contact element must be finite");
    if (std::abs(detail::lorentz_dot(xi_, xi_) + 1.0) > tol) throw UsageError("R^n_1 contact element: <xi, xi> must be -1");
  }
  const Vector& x() const { return x_; }
  const Vector& xi() const { return xi_; }
  int dim() const { return static_cast<int>(x_.size()); }

 private:
  Vector x_, xi_;
};

/// Contact element of UR^n_0, carried in R^{n+1}_1: <x, nu> = 0,
/// <xi, xi> = 0, <xi, nu> = 1 with nu = (1, 0, ..., 0, 1).
class ContactElementR30 {
 public:
  ContactElementR30(Vector x, Vector xi, double tol = 1e-10) : x_(std::move(x)), xi_(std::move(xi)) {
    if (x_.size() != xi_.size() || x_.size() < 3) throw UsageError("R^n_0 contact element: x and xi need equal length >= 3");
    if (!x_.allFinite() || !xi_.allFinite()) throw UsageError("R^n_0 contact element must be finite");
    const Vector nu = null_direction(static_cast<int>(x_.size()));
    if (std::abs(detail::lorentz_dot(x_, nu)) > tol) throw UsageError("R^n_0 contact element: x leaves the hyperplane <x, nu> = 0");
    if (std::abs(detail::lorentz_dot(xi_, xi_)) > tol) throw UsageError("R^n_0 contact element: xi must be null");
    if (std::abs(detail::lorentz_dot(xi_, nu) - 1.0) > tol) throw UsageError("R^n_0 contact element: <xi, nu> must be 1");
  }
  const Vector& x() const { return x_; }
  const Vector& xi() const { return xi_; }
  /// Dimension n of the degenerate space (one less than the carrier).
  int dim() const { return static_cast<int>(x_.size()) - 1; }

 private:
  Vector x_, xi_;
};

/// Hyperboloid H(p, r) of R^n_1: contact elements with x - p = r xi.
struct HyperboloidR31 {
  Vector p;
  double r = 0.0;
};

/// Spacelike plane {<x, xi> = lambda} of R^n_1, <xi, xi> = -1.
struct PlaneR31 {
  Vector xi;
  double lambda = 0.0;
};

/// Sphere C(p) of R^n_0: contact elements with x - p parallel to xi; p in R^{n+1}_1.
struct SphereR30 {
  Vector p;
};

/// Plane {<x, xi> = lambda} of R^n_0; xi null with <xi, nu> = 1.
struct PlaneR30 {
  Vector xi;
  double lambda = 0.0;
};

using SpaceFormSphere = std::variant<HyperboloidR31, PlaneR31, SphereR30, PlaneR30>;

inline Space space_of(const SpaceFormSphere& s) {
  return (std::holds_alternative<HyperboloidR31>(s) || std::holds_alternative<PlaneR31>(s)) ? Space::r31 : Space::r30;
}

/// Coordinate vector in R^{n+3}_2:
///   H(p, r)      -> (1/2(1+<p,p>+r^2), 1/2(1-<p,p>-r^2), -r, p)
///   plane of R^n_1 -> (lambda, -lambda, 1, xi)
///   C(p)         -> (1/2(1+<p,p>), 1/2(1-<p,p>), p)
///   plane of R^n_0 -> (lambda, -lambda, xi)
inline LorentzVector spaceform_sphere_vector(const SpaceFormSphere& s, double tol = 1e-10) {
  return std::visit(
      [tol](const auto& e) -> LorentzVector {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, HyperboloidR31>) {
          const int n = static_cast<int>(e.p.size());
          const double q = detail::lorentz_dot(e.p, e.p);
          LorentzVector g(n + 3);
          g << 0.5 * (1 + q + e.r * e.r), 0.5 * (1 - q - e.r * e.r), -e.r, e.p;
          return g;
        } else if constexpr (std::is_same_v<T, PlaneR31>) {
          if (std::abs(detail::lorentz_dot(e.xi, e.xi) + 1.0) > tol) throw UsageError("R^n_1 plane normal needs <xi, xi> = -1");
          const int n = static_cast<int>(e.xi.size());
          LorentzVector g(n + 3);
          g << e.lambda, -e.lambda, 1.0, e.xi;
          return g;
        } else if constexpr (std::is_same_v<T, SphereR30>) {
          const int k = static_cast<int>(e.p.size());
          const double q = detail::lorentz_dot(e.p, e.p);
          LorentzVector g(k + 2);
          g << 0.5 * (1 + q), 0.5 * (1 - q), e.p;
          return g;
        } else {
          const Vector nu = null_direction(static_cast<int>(e.xi.size()));
          if (std::abs(detail::lorentz_dot(e.xi, e.xi)) > tol || std::abs(detail::lorentz_dot(e.xi, nu) - 1.0) > tol)
            throw UsageError("R^n_0 plane normal must be null with <xi, nu> = 1");
          const int k = static_cast<int>(e.xi.size());
          LorentzVector g(k + 2);
          g << e.lambda, -e.lambda, e.xi;
          return g;
        }
      },
      s);
}

inline ProjectivePoint spaceform_sphere_coord(const SpaceFormSphere& s) {
  return ProjectivePoint(spaceform_sphere_vector(s));
}

/// Whether a contact element lies on a space-form sphere.
inline bool on_sphere(const ContactElementR31& c, const SpaceFormSphere& s, double tol = 1e-9) {
  if (const auto* h = std::get_if<HyperboloidR31>(&s)) return (c.x() - h->p - h->r * c.xi()).cwiseAbs().maxCoeff() <= tol;
  if (const auto* p = std::get_if<PlaneR31>(&s))
    return (c.xi() - p->xi).cwiseAbs().maxCoeff() <= tol && std::abs(detail::lorentz_dot(c.x(), c.xi()) - p->lambda) <= tol;
  throw UsageError("sphere does not belong to R^n_1");
}

inline bool on_sphere(const ContactElementR30& c, const SpaceFormSphere& s, double tol = 1e-9) {
  if (const auto* q = std::get_if<SphereR30>(&s)) {
    const double r = -detail::lorentz_dot(q->p, null_direction(static_cast<int>(q->p.size())));
    return (c.x() - q->p - r * c.xi()).cwiseAbs().maxCoeff() <= tol;
  }
  if (const auto* p = std::get_if<PlaneR30>(&s))
    return (c.xi() - p->xi).cwiseAbs().maxCoeff() <= tol && std::abs(detail::lorentz_dot(c.x(), c.xi()) - p->lambda) <= tol;
  throw UsageError("sphere does not belong to R^n_0");
}

// ---------------------------------------------------------------------------
// Laguerre embeddings sigma: UR^n_1 -> UR^n and tau: UR^n_0 -> UR^n.
// Write x = (x0, x1), xi = (xi0, xi1) with x1, xi1 the last entries
// (for R^n_0 the carrier coordinates are x = (x1, x0, x1), xi = (xi1 + 1, xi0, xi1)).

/// sigma in coordinates, generic over the scalar type:
/// x' = (-x1/xi1, x0 - (x1/xi1) xi0), xi' = (1/xi1, xi0/xi1).
template <class S>
void sigma_coords(const std::vector<S>& x, const std::vector<S>& xi, std::vector<S>& x_out, std::vector<S>& xi_out) {
  const std::size_t n = x.size();
  if (xi.size() != n || n < 2) throw UsageError("sigma: x and xi need equal length >= 2");
  if (value(xi[n - 1]) == 0.0) throw EmbeddingDomainError("sigma is undefined where xi_1 = 0");
  const S q = x[n - 1] / xi[n - 1];
  x_out.assign(1, -q);
  xi_out.assign(1, 1.0 / xi[n - 1]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    x_out.push_back(x[i] - q * xi[i]);
    xi_out.push_back(xi[i] / xi[n - 1]);
  }
}

/// tau in coordinates: x' = (-x1/xi1, x0 - (x1/xi1) xi0), xi' = (1 + 1/xi1, xi0/xi1).
template <class S>
void tau_coords(const std::vector<S>& x, const std::vector<S>& xi, std::vector<S>& x_out, std::vector<S>& xi_out) {
  const std::size_t k = x.size();
  if (xi.size() != k || k < 3) throw UsageError("tau: x and xi need equal length >= 3");
  if (value(xi[k - 1]) == 0.0) throw EmbeddingDomainError("tau is undefined where xi_1 = 0");
  const S q = x[k - 1] / xi[k - 1];
  x_out.assign(1, -q);
  xi_out.assign(1, 1.0 + 1.0 / xi[k - 1]);
  for (std::size_t i = 1; i + 1 < k; ++i) {
    x_out.push_back(x[i] - q * xi[i]);
    xi_out.push_back(xi[i] / xi[k - 1]);
  }
}

namespace detail {
inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }
inline Vector to_eigen(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }
}  // namespace detail

inline ContactElement embed_sigma(const ContactElementR31& c) {
  std::vector<double> x, xi;
  sigma_coords(detail::to_std(c.x()), detail::to_std(c.xi()), x, xi);
  return ContactElement(detail::to_eigen(x), detail::to_eigen(xi), 1e-9);
}

inline ContactElement embed_tau(const ContactElementR30& c) {
  std::vector<double> x, xi;
  tau_coords(detail::to_std(c.x()), detail::to_std(c.xi()), x, xi);
  return ContactElement(detail::to_eigen(x), detail::to_eigen(xi), 1e-9);
}

/// Image of a sphere of R^n_1 under sigma:
/// H((p0, p1), r) -> S((-r, p0), -p1), P(xi, lambda) -> P(xi', lambda/xi1).
inline SphereElement sigma_image(const SpaceFormSphere& s) {
  if (const auto* h = std::get_if<HyperboloidR31>(&s)) {
    const auto n = h->p.size();
    Vector c(n);
    c << -h->r, h->p.head(n - 1);
    return Sphere(c, -h->p(n - 1));
  }
  if (const auto* p = std::get_if<PlaneR31>(&s)) {
    const auto n = p->xi.size();
    const double x1 = p->xi(n - 1);
    if (x1 == 0.0) throw EmbeddingDomainError("sigma is undefined where xi_1 = 0");
    Vector xi(n);
    xi << 1.0 / x1, p->xi.head(n - 1) / x1;
    return Plane(xi.normalized(), p->lambda / x1);
  }
  throw UsageError("sigma acts on spheres of R^n_1");
}

/// Image of a sphere of R^n_0 under tau: C(p) -> S((p1 - r, p0), -p1) for
/// p = (p1 - r, p0, p1); the plane with normal (xi1 + 1, xi0, xi1) maps to
/// P((1 + 1/xi1, xi0/xi1), lambda/xi1).
inline SphereElement tau_image(const SpaceFormSphere& s) {
  if (const auto* q = std::get_if<SphereR30>(&s)) {
    const auto k = q->p.size();
    return Sphere(q->p.head(k - 1), -q->p(k - 1));
  }
  if (const auto* p = std::get_if<PlaneR30>(&s)) {
    const auto k = p->xi.size();
    const double x1 = p->xi(k - 1);
    if (x1 == 0.0) throw EmbeddingDomainError("tau is undefined where xi_1 = 0");
    Vector xi(k - 1);
    xi << 1.0 + 1.0 / x1, p->xi.segment(1, k - 2) / x1;
    return Plane(xi.normalized(), p->lambda / x1);
  }
  throw UsageError("tau acts on spheres of R^n_0");
}

/// Euclidean hypersurface sigma(M) or tau(M) of a space-form patch.
inline SurfaceDef embedded(const SurfaceDef& d) {
  if (d.space == Space::r3) throw UsageError("embedding needs a patch in R^n_1 or R^n_0");
  SurfaceDef out = d;
  out.name = (d.space == Space::r31 ? "sigma(" : "tau(") + d.name + ")";
  out.space = Space::r3;
  const auto base = d.eval;
  const bool sigma = d.space == Space::r31;
  out.eval = [base, sigma](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    std::vector<Jet> x0, xi0;
    base(s, x0, xi0);
    if (sigma)
      sigma_coords(x0, xi0, x, xi);
    else
      tau_coords(x0, xi0, x, xi);
  };
  return out;
}

inline SampleData embedded(const SampleData& d) {
  if (d.space == Space::r3) throw UsageError("embedding needs a patch in R^n_1 or R^n_0");
  SampleData out{Space::r3, d.n, {}, {}};
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    std::vector<double> x, xi;
    if (d.space == Space::r31)
      sigma_coords(detail::to_std(d.points[i]), detail::to_std(d.normals[i]), x, xi);
    else
      tau_coords(detail::to_std(d.points[i]), detail::to_std(d.normals[i]), x, xi);
    out.points.push_back(detail::to_eigen(x));
    out.normals.push_back(detail::to_eigen(xi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transfer of invariants along the embedding

struct TransferReport {
  double radii = 0.0;      // max |r_i' - (r_i xi1 + x1)| (sorted)
  double rho = 0.0;        // max |rho' - |xi1| rho|
  double position = 0.0;   // max |Y' - sign(xi1) Y|
  double gauss_map = 0.0;  // max |eta' - eta|
  double metric = 0.0;     // max |g' - g|
  double probe_rho = 0.0;  // max over both patches of |<Y, c> - rho|
  double probe_r = 0.0;    // max over both patches of |<eta, c> - r|

  double worst() const { return std::max({radii, rho, position, gauss_map, metric, probe_rho, probe_r}); }
};

/// Compares a space-form patch with its Euclidean image node by node; both
/// patches must live on the same grid.
inline TransferReport transfer_check(const SurfacePatch& src, const SurfacePatch& img) {
  if (src.space == Space::r3 || img.space != Space::r3) throw UsageError("transfer check needs a space-form patch and its Euclidean image");
  if (!src.grid.same_shape(img.grid) || src.n != img.n) throw UsageError("transfer check: grids do not match");
  const ShapeData s = shape_data(src), t = shape_data(img);
  const auto Y = position_vector(src, s), Yp = position_vector(img, t);
  const auto eta = gauss_map(src, s), etap = gauss_map(img, t);
  const auto g = laguerre_metric(src, s), gp = laguerre_metric(img, t);
  const LorentzVector c = radius_probe(src.space, src.n), cp = radius_probe(img.space, img.n);
  const Region R = Region::merge(s.region, t.region);
  TransferReport rep;
  for (std::size_t i = 0; i < src.grid.size(); ++i) {
    if (!src.grid.inside(i, R)) continue;
    const auto& nd = src.nodes[i];
    const double xi1 = nd.xi(nd.xi.size() - 1), x1 = nd.x(nd.x.size() - 1);
    const auto &a = s.at[i], &b = t.at[i];
    Vector want = (a.r * xi1).array() + x1;
    rep.radii = std::max(rep.radii, (sorted(b.r) - sorted(want)).cwiseAbs().maxCoeff());
    rep.rho = std::max(rep.rho, std::abs(b.rho - std::abs(xi1) * a.rho));
    const double sg = xi1 > 0 ? 1.0 : -1.0;
    rep.position = std::max(rep.position, (Yp.at[i] - sg * Y.at[i]).cwiseAbs().maxCoeff());
    rep.gauss_map = std::max(rep.gauss_map, (etap.at[i] - eta.at[i]).cwiseAbs().maxCoeff());
    rep.metric = std::max(rep.metric, (gp.at[i] - g.at[i]).cwiseAbs().maxCoeff());
    rep.probe_rho = std::max({rep.probe_rho, std::abs(inner(Y.at[i], c) - a.rho), std::abs(inner(Yp.at[i], cp) - b.rho)});
    rep.probe_r = std::max({rep.probe_r, std::abs(inner(eta.at[i], c) - a.mean_r), std::abs(inner(etap.at[i], cp) - b.mean_r)});
  }
  return rep;
}

}  // namespace laguerre
