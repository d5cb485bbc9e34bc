#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "laguerre/hypersurface.hpp"

namespace laguerre {

namespace detail {

inline double sum_LB(const Analysis& A, std::size_t i) {
  const Matrix& gi = A.ginv.at[i];
  return (gi * A.L.at[i] * gi).cwiseProduct(A.B.at[i]).sum();
}

/// sum_i C_{i,i} = g^{ab} nabla_b C_a.
inline double div_C(const Analysis& A, std::size_t i) {
  return (A.ginv.at[i].cwiseProduct(tensor::unflatten(A.nablaC.at[i], A.m))).sum();
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

inline Region deepest(const Analysis& A) {
  return Region::merge(Region::merge(A.nablaB2.region, A.nablaC.region), A.L.region);
}

}  // namespace detail

/// sum_ij (B_ij,ij - L_ij B_ij): Euler-Lagrange expression of the Laguerre volume.
inline Field<double> el_residual(const Analysis& A) {
  const int m = A.m;
  return map_field<double>(A.grid, detail::deepest(A), [&](std::size_t i) {
    const Matrix& gi = A.ginv.at[i];
    const Vector& d2 = A.nablaB2.at[i];
    double s = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) s += gi(a, c) * gi(b, d) * d2(((a * m + b) * m + c) * m + d);
    return s - detail::sum_LB(A, i);
  });
}

/// sum_i C_i,i - sum_ij L_ij B_ij / (n - 2): the same equation after the
/// contracted Codazzi identity.
inline Field<double> el_residual_reduced(const Analysis& A) {
  return map_field<double>(A.grid, detail::deepest(A), [&](std::size_t i) {
    return detail::div_C(A, i) - detail::sum_LB(A, i) / (A.n - 2.0);
  });
}

/// Delta_III r, Laplacian of the mean curvature radius for the third form.
inline const Field<double>& third_form_laplacian_r(const Analysis& A) {
  if (A.n != 3) throw UsageError("the Delta_III r criterion applies to surfaces (n = 3)");
  return A.lap_III_r;
}

struct MinimalityOptions {
  /// Absolute threshold on the Euler-Lagrange residual; default is scale aware.
  std::optional<double> threshold;
};

struct MinimalityReport {
  Field<double> el;          // sum (B_ij,ij - L_ij B_ij)
  Field<double> el_reduced;  // sum C_i,i - sum L_ij B_ij / (n-2)
  Field<double> laplacian_r; // surfaces only
  double max_el = 0.0;
  double max_el_reduced = 0.0;
  double form_discrepancy = 0.0;  // max |el - (n-2) el_reduced|
  double max_laplacian_r = 0.0;
  double crosscheck = 0.0;  // max |Delta_III r - rho^3 (-sum C_i,i + sum L_ij B_ij)|
  /// crosscheck over max(max |Delta_III r|, median rho^3 (|L| + |nabla C|)),
  /// so that it stays meaningful when Delta_III r vanishes.
  double crosscheck_relative = 0.0;
  double threshold = 0.0;
  double threshold_r = 0.0;
  bool minimal = false;
  bool minimal_r = false;
  bool inconsistent = false;
  // Expansion of Delta eta in the moving frame.
  double laplace_eta_wp = 0.0;       // max |-<D eta, eta> - 1|
  double laplace_eta_tangent = 0.0;  // max |<D eta, E_i(Y)> - (n-3) C_i|
  double laplace_eta_normal = 0.0;   // max |-<D eta, N> - (-sum C_i,i + sum L_ij B_ij)|
};

inline MinimalityReport minimality_report(const Analysis& A, const MinimalityOptions& o = {}) {
  MinimalityReport rep;
  const Grid& G = A.grid;
  const int m = A.m;
  rep.el = el_residual(A);
  rep.el_reduced = el_residual_reduced(A);
  const Region R = rep.el.region;
  const auto nodes = G.nodes(R);
  if (nodes.empty()) throw UsageError("grid interior too small for second covariant derivatives");
  rep.max_el = max_abs(G, rep.el);
  rep.max_el_reduced = max_abs(G, rep.el_reduced);

  // Scale of the terms entering the equation: frame norms of L and nabla C.
  std::vector<double> scale, scale_r;
  for (auto i : nodes) {
    const Matrix& E = A.frame.at[i];
    const double nL = (E.transpose() * A.L.at[i] * E).norm();
    const double nC = tensor::to_frame(A.nablaC.at[i], 2, E).norm();
    const double rho = A.shape.at[i].rho;
    scale.push_back(nL + nC);
    scale_r.push_back(rho * rho * rho * (nL + nC));
    rep.form_discrepancy = std::max(rep.form_discrepancy, std::abs(rep.el.at[i] - (A.n - 2.0) * rep.el_reduced.at[i]));
    const double elp = -detail::div_C(A, i) + detail::sum_LB(A, i);
    const auto& le = A.lapEta.at[i];
    rep.laplace_eta_wp = std::max(rep.laplace_eta_wp, std::abs(-inner(le, A.eta.at[i]) - 1.0));
    Vector t(m);
    for (int a = 0; a < m; ++a) t(a) = inner(le, A.dY[a].at[i]) - (A.n - 3.0) * A.C.at[i](a);
    rep.laplace_eta_tangent = std::max(rep.laplace_eta_tangent, (E.transpose() * t).cwiseAbs().maxCoeff());
    rep.laplace_eta_normal = std::max(rep.laplace_eta_normal, std::abs(-inner(le, A.N.at[i]) - elp));
  }
  const double med = detail::median(scale), med_r = detail::median(scale_r);
  rep.threshold = o.threshold ? *o.threshold : std::max(1e-3 * med, 1e-12);
  rep.threshold_r = o.threshold ? *o.threshold * (med > 0 ? med_r / med : 1.0) : std::max(1e-3 * med_r, 1e-12);
  rep.minimal = rep.max_el <= rep.threshold;

  if (A.n == 3) {
    rep.laplacian_r = A.lap_III_r;
    double mx = 0.0;
    for (auto i : nodes) {
      const double lr = A.lap_III_r.at[i];
      mx = std::max(mx, std::abs(lr));
      const double rho = A.shape.at[i].rho;
      const double rhs = rho * rho * rho * (-detail::div_C(A, i) + detail::sum_LB(A, i));
      rep.crosscheck = std::max(rep.crosscheck, std::abs(lr - rhs));
    }
    rep.max_laplacian_r = max_abs(G, A.lap_III_r);
    rep.crosscheck_relative = rep.crosscheck / std::max({mx, med_r, 1e-300});
    rep.minimal_r = rep.max_laplacian_r <= rep.threshold_r;
    rep.inconsistent = rep.minimal != rep.minimal_r;
  }
  return rep;
}

}  // namespace laguerre
