#pragma once

// Closed-form and independent reference values for the test suites. Nothing
// here goes through the shape-operator or frame pipeline of the library.

#include <cmath>
#include <numbers>
#include <random>

#include "laguerre/laguerre.hpp"

namespace oracle {

using laguerre::Vector;

constexpr double pi = std::numbers::pi;

/// Torus of revolution (R, a) with outward normal: radii along u and v.
inline double torus_r_u(double, double a, double) { return -a; }
inline double torus_r_v(double R, double a, double u) { return -a - R / std::cos(u); }
inline double torus_mean_r(double R, double a, double u) { return -a - 0.5 * R / std::cos(u); }
inline double torus_rho(double R, double, double u) { return R / (std::sqrt(2.0) * std::cos(u)); }

/// Laguerre volume of the torus strip |u| <= U: the integrand reduces to
/// (R^2/2) sec u du dv.
inline double torus_volume(double R, double U) {
  return 2 * pi * R * R * std::log(1 / std::cos(U) + std::tan(U));
}

/// Third form du^2 + cos^2 u dv^2 and r = -a - (R/2) sec u.
inline double torus_laplacian_r(double R, double u) { return -0.5 * R / std::pow(std::cos(u), 3); }

/// Laguerre metric (R^2/2)(sec^2 u du^2 + dv^2).
inline laguerre::Matrix torus_metric(double R, double u) {
  laguerre::Matrix g = laguerre::Matrix::Zero(2, 2);
  g(0, 0) = 0.5 * R * R / (std::cos(u) * std::cos(u));
  g(1, 1) = 0.5 * R * R;
  return g;
}

/// Mean curvature of a spacelike surface in R^3_1 from the jets of its
/// position alone: the normal is the Lorentz cross product of the tangents.
inline double lorentz_mean_curvature(const laguerre::SurfaceDef& d, double u, double v) {
  std::vector<laguerre::Jet> s{laguerre::Jet::variable(2, 0, u), laguerre::Jet::variable(2, 1, v)}, x, xi;
  d.eval(s, x, xi);
  Eigen::Vector3d xu, xv, xuu, xuv, xvv;
  for (int k = 0; k < 3; ++k) {
    xu(k) = x[k].g(0);
    xv(k) = x[k].g(1);
    xuu(k) = x[k].h(0, 0);
    xuv(k) = x[k].h(0, 1);
    xvv(k) = x[k].h(1, 1);
  }
  const Eigen::Vector3d D(1, 1, -1);
  auto dot = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return a.dot(D.asDiagonal() * b); };
  Eigen::Vector3d nrm = D.asDiagonal() * xu.cross(xv);
  nrm /= std::sqrt(std::abs(dot(nrm, nrm)));
  const double E = dot(xu, xu), F = dot(xu, xv), G = dot(xv, xv);
  const double L = dot(xuu, nrm), M = dot(xuv, nrm), N = dot(xvv, nrm);
  return (E * N - 2 * F * M + G * L) / (2 * (E * G - F * F));
}

/// Max of |Laplacian of a constant| for the third-form Laplacian would be zero;
/// this helper builds a constant field for that check.
inline laguerre::Field<double> constant_field(const laguerre::Grid& g, double c) {
  return laguerre::map_field<double>(g, g.full_region(), [c](std::size_t) { return c; });
}

inline Vector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v.normalized();
}

inline Vector random_point(int n, std::mt19937_64& rng, double s = 2.0) {
  std::uniform_real_distribution<double> U(-s, s);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

/// Torus strip |u| <= pi/3 on an N x N grid, periodic in v.
inline laguerre::Grid torus_grid(int N = 64) {
  using laguerre::Axis;
  return laguerre::Grid({Axis{-pi / 3, pi / 3, N, false}, Axis{0, 2 * pi, N, true}});
}

inline laguerre::Grid catenoid_grid(int N = 64) {
  using laguerre::Axis;
  return laguerre::Grid({Axis{0.5, 2.0, N, false}, Axis{0, 2 * pi, N, true}});
}

/// Max over the nodes of the coarse grid (in region `r`) of |f|; `fine`
/// fields are read at the matching nodes of the refined grid.
inline std::pair<double, double> coarse_node_max(const laguerre::Grid& coarse, const laguerre::Grid& fine,
                                                 const laguerre::Field<double>& fc, const laguerre::Field<double>& ff) {
  double mc = 0.0, mf = 0.0;
  for (auto i : coarse.nodes(fc.region)) {
    auto m = coarse.multi_index(i);
    for (auto& k : m) k *= 2;
    mc = std::max(mc, std::abs(fc.at[i]));
    mf = std::max(mf, std::abs(ff.at[fine.flat_index(m)]));
  }
  return {mc, mf};
}

}  // namespace oracle
