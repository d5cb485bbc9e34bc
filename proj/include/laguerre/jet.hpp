#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "laguerre/errors.hpp"

namespace laguerre {

/// Largest number of surface parameters carried by a jet (hypersurfaces of
/// R^n with n <= 5).
inline constexpr int kMaxParams = 4;

using JetGrad = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxParams, 1>;
using JetHess = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxParams, kMaxParams>;

/// Second-order forward-mode jet: value, gradient and Hessian with respect to
/// m surface parameters. Lets closed-form surfaces and the pointwise maps
/// (group action, embeddings) carry exact derivatives through composition.
struct Jet {
  double v = 0.0;
  JetGrad g;
  JetHess h;

  Jet() = default;
  Jet(int m, double value) : v(value), g(JetGrad::Zero(m)), h(JetHess::Zero(m, m)) {}

  static Jet variable(int m, int i, double value) {
    Jet j(m, value);
    j.g(i) = 1.0;
    return j;
  }
  int params() const { return static_cast<int>(g.size()); }

  /// f(x) lifted by the chain rule given f, f', f'' at v.
  Jet apply(double f0, double f1, double f2) const {
    Jet r;
    r.v = f0;
    r.g = f1 * g;
    r.h = f1 * h + f2 * (g * g.transpose());
    return r;
  }

  Jet operator-() const { return apply(-v, -1.0, 0.0); }
  Jet& operator+=(const Jet& o) {
    v += o.v;
    g += o.g;
    h += o.h;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    g -= o.g;
    h -= o.h;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    h = v * o.h + o.v * h + g * o.g.transpose() + o.g * g.transpose();
    g = v * o.g + o.v * g;
    v *= o.v;
    return *this;
  }
  Jet& operator/=(const Jet& o) { return *this *= o.apply(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v)); }
  Jet& operator+=(double c) {
    v += c;
    return *this;
  }
  Jet& operator-=(double c) {
    v -= c;
    return *this;
  }
  Jet& operator*=(double c) {
    v *= c;
    g *= c;
    h *= c;
    return *this;
  }
  Jet& operator/=(double c) { return *this *= (1.0 / c); }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator+(Jet a, double c) { return a += c; }
inline Jet operator+(double c, Jet a) { return a += c; }
inline Jet operator-(Jet a, double c) { return a -= c; }
inline Jet operator-(double c, const Jet& a) { return (-a) += c; }
inline Jet operator*(Jet a, double c) { return a *= c; }
inline Jet operator*(double c, Jet a) { return a *= c; }
inline Jet operator/(Jet a, double c) { return a /= c; }
inline Jet operator/(double c, const Jet& a) { return a.apply(c / a.v, -c / (a.v * a.v), 2.0 * c / (a.v * a.v * a.v)); }

inline Jet sin(const Jet& a) { return a.apply(std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return a.apply(std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return a.apply(e, e, e);
}
inline Jet sinh(const Jet& a) { return a.apply(std::sinh(a.v), std::cosh(a.v), std::sinh(a.v)); }
inline Jet cosh(const Jet& a) { return a.apply(std::cosh(a.v), std::sinh(a.v), std::cosh(a.v)); }
inline Jet sqrt(const Jet& a) {
  if (a.v <= 0.0) throw UsageError("jet sqrt of non-positive value");
  const double s = std::sqrt(a.v);
  return a.apply(s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet asinh(const Jet& a) {
  const double q = 1.0 + a.v * a.v;
  return a.apply(std::asinh(a.v), 1.0 / std::sqrt(q), -a.v / (q * std::sqrt(q)));
}

inline double value(double x) { return x; }
inline double value(const Jet& x) { return x.v; }

/// Scalar factory usable for both double and Jet code paths.
template <class S>
S constant_like(const S& proto, double c) {
  if constexpr (std::is_same_v<S, Jet>)
    return Jet(proto.params(), c);
  else
    return c;
}

}  // namespace laguerre
