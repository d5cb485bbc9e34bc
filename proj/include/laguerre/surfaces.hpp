#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/grid.hpp"
#include "laguerre/group.hpp"
#include "laguerre/jet.hpp"
#include "laguerre/lorentz.hpp"

namespace laguerre {

/// Ambient geometry of a patch: Euclidean R^n, Lorentzian R^n_1 (last
/// coordinate timelike) or the degenerate hyperplane R^n_0 carried inside
/// R^{n+1}_1.
enum class Space { r3, r31, r30 };

inline const char* to_string(Space s) {
  switch (s) {
    case Space::r3:
      return "r3";
    case Space::r31:
      return "r31";
    case Space::r30:
      return "r30";
  }
  return "?";
}

inline Space parse_space(const std::string& s) {
  if (s == "r3" || s == "euclidean") return Space::r3;
  if (s == "r31") return Space::r31;
  if (s == "r30") return Space::r30;
  throw UsageError("unknown space '" + s + "' (expected r3, r31 or r30)");
}

/// Number of coordinates of x for a hypersurface of base dimension n.
inline int ambient_size(Space s, int n) { return s == Space::r30 ? n + 1 : n; }

/// Diagonal of the ambient quadratic form.
inline Vector ambient_form(Space s, int size) {
  Vector d = Vector::Ones(size);
  if (s != Space::r3) d(size - 1) = -1.0;
  return d;
}

/// (1, 0, ..., 0, 1): the null direction defining R^n_0.
inline Vector null_direction(int size) {
  Vector v = Vector::Zero(size);
  v(0) = 1.0;
  v(size - 1) = 1.0;
  return v;
}

/// Parametrized hypersurface with its normal, evaluated on jets so that
/// derivatives come out exactly.
using SurfaceFunction = std::function<void(const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi)>;

struct SurfaceDef {
  std::string name;
  std::map<std::string, double> params;
  Space space = Space::r3;
  int n = 3;
  SurfaceFunction eval;
};

/// Grid samples of x and xi, node order as in Grid (first axis slowest).
struct SampleData {
  Space space = Space::r3;
  int n = 3;
  std::vector<Vector> points;
  std::vector<Vector> normals;
};

struct Node {
  Vector x, xi;
  Matrix dx, dxi;  // columns: partial derivatives along each grid axis
};

struct SurfacePatch {
  std::string source;
  std::map<std::string, double> params;
  Space space = Space::r3;
  int n = 3;
  Grid grid;
  Region region;  // nodes carrying derivative data
  bool analytic = true;
  std::vector<Node> nodes;

  int params_count() const { return n - 1; }
  Vector form() const { return ambient_form(space, ambient_size(space, n)); }
};

namespace builtin {

namespace detail {
inline double get(const std::map<std::string, double>& p, const std::string& k, double fallback) {
  auto it = p.find(k);
  return it == p.end() ? fallback : it->second;
}
inline std::vector<double> get_list(const std::map<std::string, double>& p, const std::string& k, int count,
                                    double fallback) {
  std::vector<double> out(count, fallback);
  for (int i = 0; i < count; ++i) {
    auto it = p.find(k + std::to_string(i + 1));
    if (it != p.end()) out[i] = it->second;
  }
  return out;
}
}  // namespace detail

/// Torus of revolution about the third axis, parameters (u, v): u around the
/// tube, v around the axis. Outward normal unless sign = -1.
inline SurfaceDef torus(double R, double a, double sign = 1.0) {
  if (!(a > 0) || !(R > a)) throw UsageError("torus needs R > a > 0");
  SurfaceDef d{"torus", {{"R", R}, {"a", a}}, Space::r3, 3, {}};
  d.eval = [R, a, sign](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    const Jet cu = cos(s[0]), su = sin(s[0]), cv = cos(s[1]), sv = sin(s[1]);
    const Jet w = R + a * cu;
    x = {w * cv, w * sv, a * su};
    xi = {sign * cu * cv, sign * cu * sv, sign * su};
  };
  return d;
}

inline SurfaceDef sphere(double radius) {
  if (!(radius > 0)) throw UsageError("sphere needs a positive radius");
  SurfaceDef d{"sphere", {{"radius", radius}}, Space::r3, 3, {}};
  d.eval = [radius](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    const Jet cu = cos(s[0]), su = sin(s[0]), cv = cos(s[1]), sv = sin(s[1]);
    xi = {cu * cv, cu * sv, su};
    x = {radius * xi[0], radius * xi[1], radius * xi[2]};
  };
  return d;
}

/// Circular cylinder around the third axis, parameters (u = height, v = angle).
inline SurfaceDef cylinder(double radius) {
  if (!(radius > 0)) throw UsageError("cylinder needs a positive radius");
  SurfaceDef d{"cylinder", {{"radius", radius}}, Space::r3, 3, {}};
  d.eval = [radius](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    const Jet cv = cos(s[1]), sv = sin(s[1]);
    x = {radius * cv, radius * sv, s[0]};
    xi = {cv, sv, Jet(s[0].params(), 0.0)};
  };
  return d;
}

/// Graph of f(s) = sum_i (k_i s_i^2 / 2 + c_i s_i^3 / 6) over R^{n-1} with
/// upward normal.
inline SurfaceDef cubic_graph(int n, std::vector<double> k, std::vector<double> c) {
  if (n < 3 || n > kMaxParams + 1) throw UsageError("graph dimension out of range");
  if (static_cast<int>(k.size()) != n - 1 || static_cast<int>(c.size()) != n - 1)
    throw UsageError("graph needs n-1 coefficients k and c");
  SurfaceDef d{"graph", {}, Space::r3, n, {}};
  for (int i = 0; i < n - 1; ++i) {
    d.params["k" + std::to_string(i + 1)] = k[i];
    d.params["c" + std::to_string(i + 1)] = c[i];
  }
  d.eval = [n, k, c](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    const int m = n - 1;
    Jet f(s[0].params(), 0.0), q(s[0].params(), 1.0);
    std::vector<Jet> df;
    for (int i = 0; i < m; ++i) {
      f += s[i] * s[i] * (0.5 * k[i]) + s[i] * s[i] * s[i] * (c[i] / 6.0);
      df.push_back(s[i] * k[i] + s[i] * s[i] * (0.5 * c[i]));
      q += df.back() * df.back();
    }
    const Jet inv = 1.0 / sqrt(q);
    x.assign(s.begin(), s.begin() + m);
    x.push_back(f);
    xi.clear();
    for (int i = 0; i < m; ++i) xi.push_back(-df[i] * inv);
    xi.push_back(inv);
  };
  return d;
}

/// Maximal catenoid of R^3_1, x = (u cos v, u sin v, asinh u), with the
/// future-pointing unit normal <xi, xi> = -1.
inline SurfaceDef maximal_catenoid_r31() {
  SurfaceDef d{"maximal_catenoid_r31", {}, Space::r31, 3, {}};
  d.eval = [](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    const Jet& u = s[0];
    const Jet cv = cos(s[1]), sv = sin(s[1]);
    x = {u * cv, u * sv, asinh(u)};
    xi = {cv / u, sv / u, sqrt(1.0 + u * u) / u};
  };
  return d;
}

/// Spacelike plane of R^3_1 (zero curvature).
inline SurfaceDef plane_r31() {
  SurfaceDef d{"plane_r31", {}, Space::r31, 3, {}};
  d.eval = [](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    const Jet z(s[0].params(), 0.0);
    x = {s[0], s[1], z};
    xi = {z, z, Jet(s[0].params(), 1.0)};
  };
  return d;
}

/// Graph over the degenerate plane R^3_0 in R^4_1: x = (f, s1, s2, f) with the
/// harmonic height f = exp(s1) cos(s2). The normal is the null vector with
/// <xi, dx> = 0 and <xi, nu> = 1, i.e. xi = (b + 1, -grad f, b) with
/// b = -(1 + |grad f|^2) / 2.
inline SurfaceDef harmonic_graph_r30() {
  SurfaceDef d{"harmonic_graph_r30", {}, Space::r30, 3, {}};
  d.eval = [](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    const Jet e = exp(s[0]);
    const Jet f = e * cos(s[1]);
    const Jet f1 = f, f2 = -(e * sin(s[1]));
    const Jet b = -0.5 * (1.0 + f1 * f1 + f2 * f2);
    x = {f, s[0], s[1], f};
    xi = {b + 1.0, -f1, -f2, b};
  };
  return d;
}

}  // namespace builtin

/// The surface moved by a Laguerre transformation, acting on contact elements.
inline SurfaceDef transformed(const SurfaceDef& d, const LaguerreTransform& T) {
  if (d.space != Space::r3) throw UsageError("Laguerre transforms act on Euclidean patches only");
  if (T.dim() != d.n) throw UsageError("transform dimension does not match the surface");
  SurfaceDef out = d;
  out.name = d.name + "*T";
  const Matrix M = T.matrix();
  const auto base = d.eval;
  out.eval = [M, base](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    std::vector<Jet> x0, xi0;
    base(s, x0, xi0);
    act_on_contact_coords(M, x0, xi0, x, xi);
  };
  return out;
}

inline SampleData transformed(const SampleData& d, const LaguerreTransform& T) {
  if (d.space != Space::r3) throw UsageError("Laguerre transforms act on Euclidean patches only");
  SampleData out = d;
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    const auto c = act_on_contact(T, ContactElement(d.points[i], d.normals[i], 1e-8));
    out.points[i] = c.x();
    out.normals[i] = c.xi();
  }
  return out;
}

struct PatchOptions {
  Scheme scheme{4};
  /// Relative tolerance of the contact condition <dx, xi> = 0.
  double contact_tol = 1e-8;
  /// Same, for sampled patches whose tangents come from finite differences.
  double sample_contact_tol = 1e-4;
  double normal_tol = 1e-10;
};

namespace detail {

inline void validate_node(const SurfacePatch& p, std::size_t i, const PatchOptions& o) {
  const Node& nd = p.nodes[i];
  const Vector D = p.form();
  auto where = [&] { return p.grid.multi_index(i); };
  if (!nd.x.allFinite() || !nd.xi.allFinite() || !nd.dx.allFinite() || !nd.dxi.allFinite())
    throw DegenerateSurface("non-finite surface data", where());
  const double xx = nd.xi.dot(D.asDiagonal() * nd.xi);
  const double want = p.space == Space::r3 ? 1.0 : (p.space == Space::r31 ? -1.0 : 0.0);
  if (std::abs(xx - want) > o.normal_tol) throw UsageError("normal has the wrong length at grid index " +
                                                           DegenerateSurface::format_index(where()));
  if (p.space == Space::r30) {
    const Vector nu = null_direction(static_cast<int>(nd.x.size()));
    if (std::abs(nd.xi.dot(D.asDiagonal() * nu) - 1.0) > o.normal_tol ||
        std::abs(nd.x.dot(D.asDiagonal() * nu)) > o.normal_tol)
      throw UsageError("patch leaves the degenerate hyperplane at grid index " +
                       DegenerateSurface::format_index(where()));
  }
  const Matrix I = nd.dx.transpose() * D.asDiagonal() * nd.dx;
  Eigen::SelfAdjointEigenSolver<Matrix> es(I, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())))
    throw DegenerateSurface("not a spacelike immersion", where());
  const double contact = (nd.dx.transpose() * D.asDiagonal() * nd.xi).cwiseAbs().maxCoeff();
  if (contact > o.contact_tol * std::max(1.0, nd.dx.cwiseAbs().maxCoeff()))
    throw UsageError("normal is not orthogonal to the tangent space at grid index " +
                     DegenerateSurface::format_index(where()));
}

}  // namespace detail

inline SurfacePatch build_patch(const SurfaceDef& d, const Grid& grid, const PatchOptions& o = {}) {
  const int m = d.n - 1;
  if (grid.dims() != m) throw UsageError("grid needs " + std::to_string(m) + " axes for this surface");
  SurfacePatch p;
  p.source = d.name;
  p.params = d.params;
  p.space = d.space;
  p.n = d.n;
  p.grid = grid;
  p.region = grid.full_region();
  p.analytic = true;
  p.nodes.resize(grid.size());
  const int size = ambient_size(d.space, d.n);
  std::vector<Jet> s(m), x, xi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto c = grid.coords(i);
    for (int a = 0; a < m; ++a) s[a] = Jet::variable(m, a, c[a]);
    d.eval(s, x, xi);
    if (static_cast<int>(x.size()) != size || static_cast<int>(xi.size()) != size)
      throw UsageError("surface evaluator returned the wrong number of coordinates");
    Node& nd = p.nodes[i];
    nd.x.resize(size);
    nd.xi.resize(size);
    nd.dx.resize(size, m);
    nd.dxi.resize(size, m);
    for (int k = 0; k < size; ++k) {
      nd.x(k) = x[k].v;
      nd.xi(k) = xi[k].v;
      nd.dx.row(k) = x[k].g.transpose();
      nd.dxi.row(k) = xi[k].g.transpose();
    }
    detail::validate_node(p, i, o);
  }
  return p;
}

/// Patch from raw samples; first derivatives by finite differences, so the
/// usable region loses one stencil radius on non-periodic axes.
inline SurfacePatch build_patch(const SampleData& d, const Grid& grid, PatchOptions o = {}) {
  o.contact_tol = o.sample_contact_tol;
  const int m = d.n - 1;
  if (grid.dims() != m) throw UsageError("grid needs " + std::to_string(m) + " axes for this surface");
  if (d.points.size() != grid.size() || d.normals.size() != grid.size())
    throw UsageError("sample count does not match the grid (" + std::to_string(grid.size()) + " nodes)");
  const int size = ambient_size(d.space, d.n);
  Field<Vector> X, XI;
  X.region = XI.region = grid.full_region();
  X.at = d.points;
  XI.at = d.normals;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (X.at[i].size() != size || XI.at[i].size() != size)
      throw UsageError("sample has the wrong number of coordinates");
  const auto dX = partials(grid, X, o.scheme);
  const auto dXI = partials(grid, XI, o.scheme);
  SurfacePatch p;
  p.source = "samples";
  p.space = d.space;
  p.n = d.n;
  p.grid = grid;
  p.region = dX[0].region;
  p.analytic = false;
  p.nodes.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Node& nd = p.nodes[i];
    nd.x = X.at[i];
    nd.xi = XI.at[i];
    if (!grid.inside(i, p.region)) continue;
    nd.dx.resize(size, m);
    nd.dxi.resize(size, m);
    for (int a = 0; a < m; ++a) {
      nd.dx.col(a) = dX[a].at[i];
      nd.dxi.col(a) = dXI[a].at[i];
    }
    detail::validate_node(p, i, o);
  }
  return p;
}

/// Samples of an analytic surface on a grid (used to exercise the sample path).
inline SampleData sample(const SurfaceDef& d, const Grid& grid) {
  SampleData out{d.space, d.n, {}, {}};
  std::vector<Jet> s(d.n - 1), x, xi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto c = grid.coords(i);
    for (int a = 0; a < d.n - 1; ++a) s[a] = Jet(d.n - 1, c[a]);
    d.eval(s, x, xi);
    Vector X(x.size()), XI(xi.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      X(k) = x[k].v;
      XI(k) = xi[k].v;
    }
    out.points.push_back(X);
    out.normals.push_back(XI);
  }
  return out;
}

}  // namespace laguerre
