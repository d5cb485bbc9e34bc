#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/grid.hpp"
#include "laguerre/lorentz.hpp"
#include "laguerre/spheres.hpp"
#include "laguerre/surfaces.hpp"

namespace laguerre {

// ---------------------------------------------------------------------------
// Shape data

struct ShapeNode {
  Vector k;         // principal curvatures, descending
  Vector r;         // curvature radii 1/k_i
  double mean_r = 0.0;
  double rho = 0.0;
  Matrix dirs;      // principal directions in parameter coordinates, I-orthonormal
  double shape_residual = 0.0;  // max |d xi(e_i) + k_i dx(e_i)|
};

struct ShapeData {
  std::vector<ShapeNode> at;
  Region region;
  double umbilic_tol = 0.0;
  double curvature_zero_tol = 0.0;
};

/// Diagonal of the bounding box of the sampled points.
inline double patch_diameter(const SurfacePatch& p) {
  Vector lo = p.nodes[0].x, hi = p.nodes[0].x;
  for (const auto& nd : p.nodes) {
    lo = lo.cwiseMin(nd.x);
    hi = hi.cwiseMax(nd.x);
  }
  return std::max((hi - lo).norm(), 1e-300);
}

inline ShapeData shape_data(const SurfacePatch& p) {
  ShapeData s;
  s.region = p.region;
  const double diam = patch_diameter(p);
  s.umbilic_tol = 1e-8 * diam;
  s.curvature_zero_tol = 1e-10 / diam;
  s.at.resize(p.grid.size());
  const Vector D = p.form();
  const int m = p.n - 1;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    if (!p.grid.inside(i, p.region)) continue;
    const Node& nd = p.nodes[i];
    const Matrix I = nd.dx.transpose() * D.asDiagonal() * nd.dx;
    const Matrix W = nd.dxi.transpose() * D.asDiagonal() * nd.dx;
    const Matrix M = -0.5 * (W + W.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(M, I);
    if (ges.info() != Eigen::Success) throw DegenerateSurface("shape operator failed", p.grid.multi_index(i));
    ShapeNode& sn = s.at[i];
    sn.k = ges.eigenvalues().reverse();
    sn.dirs = ges.eigenvectors().rowwise().reverse();
    for (int a = 0; a < m; ++a)
      if (!(std::abs(sn.k(a)) > s.curvature_zero_tol))
        throw DegenerateSurface("vanishing principal curvature", p.grid.multi_index(i));
    sn.r = sn.k.cwiseInverse();
    sn.mean_r = sn.r.mean();
    sn.rho = std::sqrt((sn.r.array() - sn.mean_r).square().sum());
    if (!(sn.rho > s.umbilic_tol)) throw DegenerateSurface("umbilic point", p.grid.multi_index(i));
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (std::abs(sn.r(a) - sn.r(b)) <= s.umbilic_tol)
          throw DegenerateSurface("principal curvatures cross inside the patch; re-grid to avoid the crossing",
                                  p.grid.multi_index(i));
    for (int a = 0; a < m; ++a) {
      const Vector e = nd.dxi * sn.dirs.col(a) + sn.k(a) * (nd.dx * sn.dirs.col(a));
      sn.shape_residual = std::max(sn.shape_residual, e.cwiseAbs().maxCoeff());
    }
  }
  return s;
}

/// Eigenvalues rho^{-1}(r_i - r) of the Laguerre shape operator, in the order
/// of the principal curvatures.
inline Vector laguerre_shape_eigenvalues(const ShapeNode& sn) {
  return (sn.r.array() - sn.mean_r).matrix() / sn.rho;
}

// ---------------------------------------------------------------------------
// Lifts to R^{n+3}_2. The coordinate layout depends on the ambient space:
//   r3 : (.,., x, 0)   r31 : (.,., 0, x)   r30 : (.,., x)

inline LorentzVector point_lift(Space sp, const Vector& x, const Vector& D) {
  const double q = x.dot(D.asDiagonal() * x);
  const int k = static_cast<int>(x.size());
  LorentzVector g = LorentzVector::Zero(sp == Space::r30 ? k + 2 : k + 3);
  g(0) = 0.5 * (1 + q);
  g(1) = 0.5 * (1 - q);
  if (sp == Space::r31)
    g.segment(3, k) = x;
  else
    g.segment(2, k) = x;
  return g;
}

inline LorentzVector plane_lift(Space sp, const Vector& x, const Vector& xi, const Vector& D) {
  const double q = x.dot(D.asDiagonal() * xi);
  const int k = static_cast<int>(x.size());
  LorentzVector g = LorentzVector::Zero(sp == Space::r30 ? k + 2 : k + 3);
  g(0) = q;
  g(1) = -q;
  switch (sp) {
    case Space::r3:
      g.segment(2, k) = xi;
      g(k + 2) = 1.0;
      break;
    case Space::r31:
      g(2) = 1.0;
      g.segment(3, k) = xi;
      break;
    case Space::r30:
      g.segment(2, k) = xi;
      break;
  }
  return g;
}

/// Vector c with <Y, c> = rho and <eta, c> = r in the given layout.
inline LorentzVector radius_probe(Space sp, int n) {
  LorentzVector c = LorentzVector::Zero(n + 3);
  switch (sp) {
    case Space::r3:
      c(n + 2) = -1.0;
      break;
    case Space::r31:
      c(2) = 1.0;
      break;
    case Space::r30:
      c(2) = 1.0;
      c(n + 2) = 1.0;
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Pointwise Laguerre data (exact when the patch carries analytic jets)

/// Y = rho (x.xi, -x.xi, xi, 1) in the layout of the patch's space.
inline Field<LorentzVector> position_vector(const SurfacePatch& p, const ShapeData& s) {
  const Vector D = p.form();
  return map_field<LorentzVector>(p.grid, s.region, [&](std::size_t i) {
    return LorentzVector(s.at[i].rho * plane_lift(p.space, p.nodes[i].x, p.nodes[i].xi, D));
  });
}

/// eta = (1/2(1+|x|^2), 1/2(1-|x|^2), x, 0) + r (x.xi, -x.xi, xi, 1).
inline Field<LorentzVector> gauss_map(const SurfacePatch& p, const ShapeData& s) {
  const Vector D = p.form();
  return map_field<LorentzVector>(p.grid, s.region, [&](std::size_t i) {
    const auto& nd = p.nodes[i];
    return LorentzVector(point_lift(p.space, nd.x, D) + s.at[i].mean_r * plane_lift(p.space, nd.x, nd.xi, D));
  });
}

inline Field<Matrix> third_form(const SurfacePatch& p, const ShapeData& s) {
  const Vector D = p.form();
  return map_field<Matrix>(p.grid, s.region, [&](std::size_t i) {
    const auto& nd = p.nodes[i];
    return Matrix(nd.dxi.transpose() * D.asDiagonal() * nd.dxi);
  });
}

/// g = rho^2 III, which equals <dY, dY>.
inline Field<Matrix> laguerre_metric(const SurfacePatch& p, const ShapeData& s) {
  auto III = third_form(p, s);
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    if (p.grid.inside(i, s.region)) III.at[i] *= s.at[i].rho * s.at[i].rho;
  return III;
}

// ---------------------------------------------------------------------------
// Tensor helpers. Covariant tensors are stored flat, first index slowest.

namespace tensor {

inline int pow(int m, int k) {
  int r = 1;
  while (k-- > 0) r *= m;
  return r;
}

/// Append a derivative index (last) from the list of partials of a flat field.
inline Vector with_derivative(const std::vector<Field<Vector>>& d, std::size_t i) {
  const int m = static_cast<int>(d.size());
  const int len = static_cast<int>(d[0].at[i].size());
  Vector out(len * m);
  for (int f = 0; f < len; ++f)
    for (int c = 0; c < m; ++c) out(f * m + c) = d[c].at[i](f);
  return out;
}

/// Components of a rank-k covariant tensor in the frame whose vectors are the
/// columns of E.
inline Vector to_frame(const Vector& T, int rank, const Matrix& E) {
  const int m = static_cast<int>(E.rows());
  Vector cur = T;
  for (int mode = 0; mode < rank; ++mode) {
    const int outer = pow(m, mode), inner = pow(m, rank - mode - 1);
    Vector next = Vector::Zero(cur.size());
    for (int o = 0; o < outer; ++o)
      for (int j = 0; j < m; ++j)
        for (int in = 0; in < inner; ++in) {
          double s = 0.0;
          for (int a = 0; a < m; ++a) s += cur((o * m + a) * inner + in) * E(a, j);
          next((o * m + j) * inner + in) = s;
        }
    cur = std::move(next);
  }
  return cur;
}

inline Vector flatten(const Matrix& M) {
  const int m = static_cast<int>(M.rows());
  Vector v(m * M.cols());
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < M.cols(); ++b) v(a * M.cols() + b) = M(a, b);
  return v;
}

inline Matrix unflatten(const Vector& v, int m) {
  Matrix M(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) M(a, b) = v(a * m + b);
  return M;
}

/// Gram-Schmidt on the coordinate basis with respect to g, fixed axis order.
inline Matrix orthonormal_frame(const Matrix& g) {
  const int m = static_cast<int>(g.rows());
  Matrix E = Matrix::Identity(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < j; ++i) E.col(j) -= (E.col(i).dot(g * E.col(j))) * E.col(i);
    E.col(j) /= std::sqrt(E.col(j).dot(g * E.col(j)));
  }
  return E;
}

}  // namespace tensor

// ---------------------------------------------------------------------------
// Laguerre invariants

struct AnalysisOptions {
  Scheme scheme{4};
};

struct Analysis {
  Grid grid;
  Space space = Space::r3;
  int n = 3;
  int m = 2;
  Scheme scheme{4};
  ShapeData shape;

  Field<LorentzVector> Y, eta;   // position vector and Gauss map
  Field<Matrix> g, III, ginv;    // Laguerre metric = rho^2 III, third form
  Field<Matrix> frame;           // columns: g-orthonormal frame in parameter coordinates
  Field<double> sqrt_det_g;
  std::vector<Field<LorentzVector>> dY, deta, dN;
  Field<LorentzVector> lapY, lapEta, N;
  Field<Matrix> g_fd;            // <dY, dY> by finite differences
  Field<Matrix> B, L;
  Field<Vector> C;
  Field<Vector> Gamma;           // Gamma^k_ab at [k][a][b]
  Field<Vector> Rm;              // Rm_abcd
  Field<Matrix> Ric;
  Field<double> scalar_R;
  Field<Vector> nablaB, nablaB2, nablaC, nablaL;  // derivative indices last
  Field<double> trL, lapY2;
  Field<double> mean_r;
  Field<double> lap_III_r;

  /// Per-node max-abs frame component of every structural identity.
  std::map<std::string, Field<double>> residuals;

  double residual(const std::string& name) const { return max_abs(grid, residuals.at(name)); }
};

namespace detail {

/// Laplace-Beltrami operator of `metric` in the expanded form
/// g^ab d_a d_b f + (1/sqrt g) d_a(sqrt g g^ab) d_b f, with compact second
/// difference stencils. Equal to the divergence form in the continuum.
template <class T>
Field<T> laplace_beltrami(const Grid& grid, const Field<T>& f, const Field<Matrix>& metric, Scheme s) {
  const int m = grid.dims();
  const auto df = partials(grid, f, s);
  const auto ddf = second_partials(grid, f, s);
  Field<Vector> coef = map_field<Vector>(grid, metric.region, [&](std::size_t i) {
    const Matrix& G = metric.at[i];
    return tensor::flatten(std::sqrt(G.determinant()) * G.inverse());
  });
  const auto dcoef = partials(grid, coef, s);
  const Region r = Region::merge(df[0].region, dcoef[0].region);
  return map_field<T>(grid, r, [&](std::size_t i) -> T {
    const Matrix& G = metric.at[i];
    const Matrix Gi = G.inverse();
    const double sq = std::sqrt(G.determinant());
    T acc = ddf[0][0].at[i] * Gi(0, 0);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (a + b > 0) acc = acc + ddf[a][b].at[i] * Gi(a, b);
        double v = 0.0;
        for (int c = 0; c < m; ++c) v += dcoef[c].at[i](c * m + b);
        if (a == 0) acc = acc + df[b].at[i] * (v / sq);
      }
    return acc;
  });
}

inline Field<double> frame_residual(const Analysis& A, const Field<Vector>& T, int rank) {
  return map_field<double>(A.grid, T.region, [&](std::size_t i) {
    return tensor::to_frame(T.at[i], rank, A.frame.at[i]).cwiseAbs().maxCoeff();
  });
}

}  // namespace detail

inline Analysis analyze(const SurfacePatch& p, const AnalysisOptions& opt = {}) {
  Analysis A;
  A.grid = p.grid;
  A.space = p.space;
  A.n = p.n;
  A.m = p.n - 1;
  A.scheme = opt.scheme;
  const int n = A.n, m = A.m;
  const Grid& G = A.grid;
  const Scheme sc = opt.scheme;
  const Vector D = p.form();
  A.shape = shape_data(p);
  const Region R0 = A.shape.region;
  const auto& S = A.shape.at;

  A.Y = position_vector(p, A.shape);
  A.eta = gauss_map(p, A.shape);
  A.mean_r = map_field<double>(G, R0, [&](std::size_t i) { return S[i].mean_r; });
  A.III = third_form(p, A.shape);
  A.g = laguerre_metric(p, A.shape);
  A.ginv = map_field<Matrix>(G, R0, [&](std::size_t i) { return Matrix(A.g.at[i].inverse()); });
  A.sqrt_det_g = map_field<double>(G, R0, [&](std::size_t i) { return std::sqrt(A.g.at[i].determinant()); });
  A.frame = map_field<Matrix>(G, R0, [&](std::size_t i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A.g.at[i], Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0)) throw DegenerateSurface("Laguerre metric not positive definite",
                                                                    G.multi_index(i));
    return tensor::orthonormal_frame(A.g.at[i]);
  });

  // First derivatives.
  A.dY = partials(G, A.Y, sc);
  A.deta = partials(G, A.eta, sc);
  const Region R1 = A.dY[0].region;
  A.g_fd = map_field<Matrix>(G, R1, [&](std::size_t i) {
    Matrix M(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) M(a, b) = inner(A.dY[a].at[i], A.dY[b].at[i]);
    return M;
  });
  A.B = map_field<Matrix>(G, R1, [&](std::size_t i) {
    Matrix M(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) M(a, b) = inner(A.deta[a].at[i], A.dY[b].at[i]);
    return M;
  });

  // Christoffel symbols and curvature of g.
  Field<Vector> gflat = map_field<Vector>(G, R0, [&](std::size_t i) { return tensor::flatten(A.g.at[i]); });
  const auto dg = partials(G, gflat, sc);
  A.Gamma = map_field<Vector>(G, R1, [&](std::size_t i) {
    Vector Gm(m * m * m);
    auto d = [&](int c, int a, int b) { return dg[c].at[i](a * m + b); };  // d_c g_ab
    const Matrix& gi = A.ginv.at[i];
    for (int k = 0; k < m; ++k)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double s = 0.0;
          for (int l = 0; l < m; ++l) s += gi(k, l) * (d(a, l, b) + d(b, l, a) - d(l, a, b));
          Gm((k * m + a) * m + b) = 0.5 * s;
        }
    return Gm;
  });
  const auto dGamma = partials(G, A.Gamma, sc);
  const Region R2 = dGamma[0].region;  // two cascade levels
  A.Rm = map_field<Vector>(G, R2, [&](std::size_t i) {
    const Vector& Gm = A.Gamma.at[i];
    auto Gam = [&](int k, int a, int b) { return Gm((k * m + a) * m + b); };
    auto dGam = [&](int c, int k, int a, int b) { return dGamma[c].at[i]((k * m + a) * m + b); };
    const int m4 = tensor::pow(m, 4);
    Vector Rup(m4);  // R^k_bcd
    for (int k = 0; k < m; ++k)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) {
            double s = dGam(c, k, d, b) - dGam(d, k, c, b);
            for (int l = 0; l < m; ++l) s += Gam(k, c, l) * Gam(l, d, b) - Gam(k, d, l) * Gam(l, c, b);
            Rup(((k * m + b) * m + c) * m + d) = s;
          }
    Vector R(m4);
    const Matrix& g = A.g.at[i];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) {
            double s = 0.0;
            for (int k = 0; k < m; ++k) s += g(a, k) * Rup(((k * m + b) * m + c) * m + d);
            R(((a * m + b) * m + c) * m + d) = s;
          }
    return R;
  });
  auto Rm_at = [&](std::size_t i, int a, int b, int c, int d) { return A.Rm.at[i](((a * m + b) * m + c) * m + d); };
  A.Ric = map_field<Matrix>(G, R2, [&](std::size_t i) {
    Matrix Rc = Matrix::Zero(m, m);
    const Matrix& gi = A.ginv.at[i];
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < m; ++c)
        for (int b = 0; b < m; ++b)
          for (int d = 0; d < m; ++d) Rc(a, c) += gi(b, d) * Rm_at(i, a, b, c, d);
    return Rc;
  });
  A.scalar_R = map_field<double>(G, R2, [&](std::size_t i) { return (A.ginv.at[i].cwiseProduct(A.Ric.at[i])).sum(); });

  // Laplacians, normal vector N and the tensors C, L.
  A.lapY = detail::laplace_beltrami(G, A.Y, A.g, sc);
  A.lapEta = detail::laplace_beltrami(G, A.eta, A.g, sc);
  A.lap_III_r = detail::laplace_beltrami(G, A.mean_r, A.III, sc);
  const Region RN = A.lapY.region;
  A.lapY2 = map_field<double>(G, RN, [&](std::size_t i) { return inner(A.lapY.at[i], A.lapY.at[i]); });
  A.N = map_field<LorentzVector>(G, RN, [&](std::size_t i) {
    const double k = n - 1.0;
    return LorentzVector(A.lapY.at[i] / k + (A.lapY2.at[i] / (2 * k * k)) * A.Y.at[i]);
  });
  A.C = map_field<Vector>(G, Region::merge(RN, R1), [&](std::size_t i) {
    Vector c(m);
    for (int a = 0; a < m; ++a) c(a) = inner(A.deta[a].at[i], A.N.at[i]);
    return c;
  });
  A.dN = partials(G, A.N, sc);
  const Region RL = A.dN[0].region;
  A.L = map_field<Matrix>(G, RL, [&](std::size_t i) {
    Matrix M(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) M(a, b) = inner(A.dN[a].at[i], A.dY[b].at[i]);
    return M;
  });
  A.trL = map_field<double>(G, RL, [&](std::size_t i) { return (A.ginv.at[i].cwiseProduct(A.L.at[i])).sum(); });

  // Covariant derivatives.
  auto Gam = [&](std::size_t i, int k, int a, int b) { return A.Gamma.at[i]((k * m + a) * m + b); };
  // nabla of a covariant rank-k tensor from its partials (derivative index last).
  auto covariant = [&](const Field<Vector>& T, int rank) {
    const auto dT = partials(G, T, sc);
    const int len = tensor::pow(m, rank);
    return map_field<Vector>(G, Region::merge(dT[0].region, A.Gamma.region), [&](std::size_t i) {
      Vector out = tensor::with_derivative(dT, i);
      const Vector& t = T.at[i];
      for (int f = 0; f < len; ++f) {
        std::vector<int> idx(rank);
        for (int q = rank - 1, r = f; q >= 0; --q, r /= m) idx[q] = r % m;
        for (int c = 0; c < m; ++c) {
          double s = 0.0;
          for (int q = 0; q < rank; ++q) {
            const int stride = tensor::pow(m, rank - 1 - q);
            const int base = f - idx[q] * stride;
            for (int k = 0; k < m; ++k) s += Gam(i, k, c, idx[q]) * t(base + k * stride);
          }
          out(f * m + c) -= s;
        }
      }
      return out;
    });
  };
  Field<Vector> Bflat = map_field<Vector>(G, R1, [&](std::size_t i) { return tensor::flatten(A.B.at[i]); });
  Field<Vector> Lflat = map_field<Vector>(G, RL, [&](std::size_t i) { return tensor::flatten(A.L.at[i]); });
  A.nablaB = covariant(Bflat, 2);
  A.nablaB2 = covariant(A.nablaB, 3);
  A.nablaC = covariant(A.C, 1);
  A.nablaL = covariant(Lflat, 2);
  const Region R4 = A.nablaL.region;

  // Structural identities, coordinate form; residuals are reported as
  // max-abs components in the orthonormal frame.
  auto scalar = [&](const Region& r, auto&& fn) { return map_field<double>(G, r, fn); };
  auto tensor_res = [&](const Region& r, int rank, auto&& fn) {
    return detail::frame_residual(A, map_field<Vector>(G, r, fn), rank);
  };
  auto& res = A.residuals;
  const double nn = n;

  res["frame_Y_Y"] = scalar(R0, [&](std::size_t i) { return std::abs(inner(A.Y.at[i], A.Y.at[i])); });
  res["frame_Y_wp"] = scalar(R0, [&](std::size_t i) { return std::abs(inner(A.Y.at[i], wp(n))); });
  res["frame_eta_eta"] = scalar(R0, [&](std::size_t i) { return std::abs(inner(A.eta.at[i], A.eta.at[i])); });
  res["frame_eta_wp"] = scalar(R0, [&](std::size_t i) { return std::abs(inner(A.eta.at[i], wp(n)) + 1.0); });
  res["frame_eta_Y"] = scalar(R0, [&](std::size_t i) { return std::abs(inner(A.eta.at[i], A.Y.at[i])); });
  res["frame_N_N"] = scalar(RN, [&](std::size_t i) { return std::abs(inner(A.N.at[i], A.N.at[i])); });
  res["frame_Y_N"] = scalar(RN, [&](std::size_t i) { return std::abs(inner(A.Y.at[i], A.N.at[i]) + 1.0); });
  res["frame_N_wp"] = scalar(RN, [&](std::size_t i) { return std::abs(inner(A.N.at[i], wp(n))); });
  auto pair_with_dY = [&](const Field<LorentzVector>& V, const Region& r) {
    return tensor_res(r, 1, [&](std::size_t i) {
      Vector v(m);
      for (int a = 0; a < m; ++a) v(a) = inner(V.at[i], A.dY[a].at[i]);
      return v;
    });
  };
  res["frame_eta_dY"] = pair_with_dY(A.eta, R1);
  res["frame_Y_dY"] = pair_with_dY(A.Y, R1);
  res["frame_N_dY"] = pair_with_dY(A.N, Region::merge(RN, R1));
  res["frame_metric"] = tensor_res(R1, 2, [&](std::size_t i) { return tensor::flatten(A.g_fd.at[i] - A.g.at[i]); });

  res["shape_equation"] = scalar(R0, [&](std::size_t i) { return S[i].shape_residual; });
  res["B_symmetry"] = tensor_res(R1, 2, [&](std::size_t i) { return tensor::flatten(A.B.at[i] - A.B.at[i].transpose()); });
  res["B_principal_gauge"] = scalar(R1, [&](std::size_t i) {
    // Principal directions scaled to unit length for g = rho^2 III. With
    // E_i(eta) = sum_j B_ij E_j(Y) one gets B = rho^{-1}(r - r_i) delta_ij there.
    Matrix E = S[i].dirs;
    for (int a = 0; a < m; ++a) E.col(a) /= S[i].rho * std::abs(S[i].k(a));
    const Matrix Bp = E.transpose() * A.B.at[i] * E;
    return (Bp + Matrix(laguerre_shape_eigenvalues(S[i]).asDiagonal())).cwiseAbs().maxCoeff();
  });
  res["norm_B"] = scalar(R1, [&](std::size_t i) {
    const Matrix& gi = A.ginv.at[i];
    const Matrix Bup = gi * A.B.at[i] * gi;  // B^{ab}
    return std::abs(Bup.cwiseProduct(A.B.at[i]).sum() - 1.0);
  });
  res["trace_B"] = scalar(R1, [&](std::size_t i) { return std::abs(A.ginv.at[i].cwiseProduct(A.B.at[i]).sum()); });
  res["trace_L"] = scalar(RL, [&](std::size_t i) { return std::abs(A.trL.at[i] + A.lapY2.at[i] / (2 * (nn - 1))); });
  res["L_symmetry"] = tensor_res(RL, 2, [&](std::size_t i) { return tensor::flatten(A.L.at[i] - A.L.at[i].transpose()); });

  auto nB = [&](std::size_t i, int a, int b, int c) { return A.nablaB.at[i]((a * m + b) * m + c); };
  const Region Rc = Region::merge(A.nablaB.region, A.C.region);
  res["codazzi"] = tensor_res(Rc, 3, [&](std::size_t i) {
    Vector v(m * m * m);
    const Matrix& g = A.g.at[i];
    const Vector& C = A.C.at[i];
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          v((a * m + b) * m + c) = nB(i, a, b, c) - nB(i, a, c, b) - (C(b) * g(a, c) - C(c) * g(a, b));
    return v;
  });
  res["contracted_codazzi"] = tensor_res(Rc, 1, [&](std::size_t i) {
    Vector v(m);
    const Matrix& gi = A.ginv.at[i];
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) s += gi(a, c) * nB(i, a, b, c);
      v(b) = s - (nn - 2) * A.C.at[i](b);
    }
    return v;
  });
  res["C_curl"] = tensor_res(Region::merge(A.nablaC.region, RL), 2, [&](std::size_t i) {
    Vector v(m * m);
    const Matrix BL = A.B.at[i] * A.ginv.at[i] * A.L.at[i];  // B_ac g^cd L_db
    auto dC = [&](int a, int b) { return A.nablaC.at[i](a * m + b); };  // nabla_b C_a
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) v(a * m + b) = dC(a, b) - dC(b, a) - (BL(a, b) - BL(b, a));
    return v;
  });
  res["gauss"] = tensor_res(Region::merge(R2, RL), 4, [&](std::size_t i) {
    const Matrix& g = A.g.at[i];
    const Matrix& L = A.L.at[i];
    Vector v(tensor::pow(m, 4));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d)
            v(((a * m + b) * m + c) * m + d) = Rm_at(i, a, b, c, d) - (L(b, c) * g(a, d) + L(a, d) * g(b, c) -
                                                                       L(a, c) * g(b, d) - L(b, d) * g(a, c));
    return v;
  });
  res["ricci"] = tensor_res(Region::merge(R2, RL), 2, [&](std::size_t i) {
    return tensor::flatten(A.Ric.at[i] + (nn - 3) * A.L.at[i] + A.trL.at[i] * A.g.at[i]);
  });
  res["scalar_curvature"] = scalar(Region::merge(R2, RN), [&](std::size_t i) {
    return std::abs(A.scalar_R.at[i] - (nn - 2) / (nn - 1) * A.lapY2.at[i]);
  });
  res["scalar_curvature_trace"] = scalar(Region::merge(R2, RL), [&](std::size_t i) {
    return std::abs(A.scalar_R.at[i] + 2 * (nn - 2) * A.trL.at[i]);
  });
  res["L_codazzi"] = tensor_res(R4, 3, [&](std::size_t i) {
    Vector v(m * m * m);
    auto nL = [&](int a, int b, int c) { return A.nablaL.at[i]((a * m + b) * m + c); };
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) v((a * m + b) * m + c) = nL(a, b, c) - nL(a, c, b);
    return v;
  });
  if (p.space == Space::r3) {
    res["mean_curvature_sphere"] = scalar(R0, [&](std::size_t i) {
      const auto& nd = p.nodes[i];
      const Sphere want(nd.x + S[i].mean_r * nd.xi, -S[i].mean_r);
      const auto got = classify_coord(ProjectivePoint(A.eta.at[i]), 1e-9);
      if (!std::holds_alternative<Sphere>(got)) return 1.0;
      const auto& s = std::get<Sphere>(got);
      return std::max((s.center() - want.center()).cwiseAbs().maxCoeff(), std::abs(s.radius() - want.radius()));
    });
  }
  return A;
}

/// Gauss curvature of g (surfaces only).
inline Field<double> gauss_curvature(const Analysis& A) {
  if (A.m != 2) throw UsageError("Gauss curvature is defined for surfaces (n = 3)");
  return map_field<double>(A.grid, A.Rm.region, [&](std::size_t i) { return A.Rm.at[i](((0 * 2 + 1) * 2 + 0) * 2 + 1) / A.g.at[i].determinant(); });
}

/// Max over grid nodes of the named residual, restricted to `nodes`.
inline double max_over(const Field<double>& f, const Grid& g, const std::vector<std::size_t>& nodes) {
  double mx = 0.0;
  for (auto i : nodes)
    if (g.inside(i, f.region)) mx = std::max(mx, std::abs(f.at[i]));
  return mx;
}

// ---------------------------------------------------------------------------
// Laguerre volume

struct VolumeResult {
  double volume = 0.0;
  double curvature_form = 0.0;  // 2 int (H^2 - K)/|K| dM, surfaces only
};

/// Integral of rho^{n-1} / |r_1 ... r_{n-1}| dM over the patch.
inline VolumeResult laguerre_volume(const SurfacePatch& p, const ShapeData& s) {
  const auto w = p.grid.quadrature_weights(s.region);
  const Vector D = p.form();
  VolumeResult out;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    if (w[i] == 0.0) continue;
    if (!p.grid.inside(i, s.region)) throw UsageError("volume quadrature touches nodes without shape data");
    const auto& nd = p.nodes[i];
    const auto& sn = s.at[i];
    const double dM = std::sqrt((nd.dx.transpose() * D.asDiagonal() * nd.dx).determinant());
    out.volume += w[i] * std::pow(sn.rho, p.n - 1) / std::abs(sn.r.prod()) * dM;
    if (p.n == 3) {
      const double H = 0.5 * (sn.k(0) + sn.k(1)), K = sn.k(0) * sn.k(1);
      out.curvature_form += w[i] * 2.0 * (H * H - K) / std::abs(K) * dM;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison of two analyses on matching grids

struct Comparison {
  double metric = 0.0;        // max |g1 - g2| over components
  double shape_operator = 0.0;  // max deviation of sorted Laguerre shape spectra
  double B_spectrum = 0.0;    // max deviation of sorted eigenvalues of B w.r.t. g
  std::vector<int> worst_metric_node;
};

inline Vector sorted(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

inline Vector B_spectrum(const Analysis& A, std::size_t i) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(0.5 * (A.B.at[i] + A.B.at[i].transpose()), A.g.at[i],
                                                      Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline Comparison compare_invariants(const Analysis& a, const Analysis& b) {
  if (!a.grid.same_shape(b.grid) || a.n != b.n) throw UsageError("compare: grids do not match");
  Comparison c;
  const Region r0 = Region::merge(a.shape.region, b.shape.region);
  const Region r1 = Region::merge(a.B.region, b.B.region);
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (!a.grid.inside(i, r0)) continue;
    const double dg = (a.g.at[i] - b.g.at[i]).cwiseAbs().maxCoeff();
    if (dg > c.metric || c.worst_metric_node.empty()) {
      c.metric = std::max(c.metric, dg);
      if (dg >= c.metric) c.worst_metric_node = a.grid.multi_index(i);
    }
    c.shape_operator = std::max(c.shape_operator, (sorted(laguerre_shape_eigenvalues(a.shape.at[i])) -
                                                   sorted(laguerre_shape_eigenvalues(b.shape.at[i])))
                                                      .cwiseAbs()
                                                      .maxCoeff());
    if (a.grid.inside(i, r1))
      c.B_spectrum = std::max(c.B_spectrum, (B_spectrum(a, i) - B_spectrum(b, i)).cwiseAbs().maxCoeff());
  }
  return c;
}

}  // namespace laguerre
