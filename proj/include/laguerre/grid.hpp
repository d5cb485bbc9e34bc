#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "laguerre/errors.hpp"

namespace laguerre {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
  bool periodic = false;

  /// Periodic axes sample [lo, hi) so the last node does not repeat the first.
  double step() const { return periodic ? (hi - lo) / count : (hi - lo) / (count - 1); }
  double coord(int i) const { return lo + i * step(); }
};

/// Per-axis number of nodes excluded at each end of a non-periodic axis.
struct Region {
  std::vector<int> margin;

  Region grown(int by, const std::vector<Axis>& axes) const {
    Region r = *this;
    for (std::size_t a = 0; a < axes.size(); ++a)
      if (!axes[a].periodic) r.margin[a] += by;
    return r;
  }
  static Region merge(const Region& a, const Region& b) {
    Region r = a;
    for (std::size_t i = 0; i < r.margin.size(); ++i) r.margin[i] = std::max(a.margin[i], b.margin[i]);
    return r;
  }
};

class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || static_cast<int>(axes_.size()) > 4) throw UsageError("grid needs 1 to 4 axes");
    strides_.assign(axes_.size(), 1);
    size_ = 1;
    for (int a = static_cast<int>(axes_.size()) - 1; a >= 0; --a) {
      const auto& ax = axes_[a];
      if (ax.count < 2) throw UsageError("grid axis needs at least 2 nodes");
      if (!(ax.hi > ax.lo) || !std::isfinite(ax.lo) || !std::isfinite(ax.hi))
        throw UsageError("grid axis range must satisfy lo < hi");
      strides_[a] = size_;
      size_ *= static_cast<std::size_t>(ax.count);
    }
  }

  int dims() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  const Axis& axis(int a) const { return axes_[a]; }
  const std::vector<Axis>& axes() const { return axes_; }
  Region full_region() const { return Region{std::vector<int>(axes_.size(), 0)}; }

  std::vector<int> multi_index(std::size_t idx) const {
    std::vector<int> m(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      m[a] = static_cast<int>(idx / strides_[a]);
      idx %= strides_[a];
    }
    return m;
  }
  std::size_t flat_index(const std::vector<int>& m) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) idx += static_cast<std::size_t>(m[a]) * strides_[a];
    return idx;
  }
  std::vector<double> coords(std::size_t idx) const {
    const auto m = multi_index(idx);
    std::vector<double> c(m.size());
    for (std::size_t a = 0; a < m.size(); ++a) c[a] = axes_[a].coord(m[a]);
    return c;
  }

  /// Index of the node `offset` steps along `axis`; wraps on periodic axes.
  std::size_t neighbor(std::size_t idx, int axis, int offset) const {
    const int i = static_cast<int>((idx / strides_[axis]) % axes_[axis].count);
    int j = i + offset;
    const int c = axes_[axis].count;
    if (axes_[axis].periodic) j = ((j % c) + c) % c;
    return idx + static_cast<std::size_t>(j - i) * strides_[axis];
  }

  bool inside(std::size_t idx, const Region& r) const {
    const auto m = multi_index(idx);
    for (std::size_t a = 0; a < m.size(); ++a) {
      if (axes_[a].periodic) continue;
      if (m[a] < r.margin[a] || m[a] >= axes_[a].count - r.margin[a]) return false;
    }
    return true;
  }
  bool region_empty(const Region& r) const {
    for (std::size_t a = 0; a < axes_.size(); ++a)
      if (!axes_[a].periodic && 2 * r.margin[a] >= axes_[a].count) return true;
    return false;
  }

  std::vector<std::size_t> nodes(const Region& r) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size_; ++i)
      if (inside(i, r)) out.push_back(i);
    return out;
  }

  /// Quadrature weights: trapezoid on periodic axes, composite Simpson on the
  /// others (with a 3/8-rule panel at the end when the interval count is odd).
  std::vector<double> quadrature_weights(const Region& region) const {
    std::vector<std::vector<double>> w1(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      const auto& ax = axes_[a];
      const double h = ax.step();
      auto& w = w1[a];
      w.assign(ax.count, 0.0);
      if (ax.periodic) {
        std::fill(w.begin(), w.end(), h);
        continue;
      }
      const int first = region.margin[a];
      const int intervals = ax.count - 1 - 2 * first;
      if (intervals < 1) throw UsageError("quadrature region is empty");
      if (intervals == 1) {
        w[first] = w[first + 1] = h / 2;
        continue;
      }
      const int simpson = first + ((intervals % 2 == 0) ? intervals : intervals - 3);
      for (int i = first; i + 2 <= simpson; i += 2) {
        w[i] += h / 3;
        w[i + 1] += 4 * h / 3;
        w[i + 2] += h / 3;
      }
      if (simpson != first + intervals) {
        const int s = simpson;
        w[s] += 3 * h / 8;
        w[s + 1] += 9 * h / 8;
        w[s + 2] += 9 * h / 8;
        w[s + 3] += 3 * h / 8;
      }
    }
    std::vector<double> w(size_, 1.0);
    for (std::size_t i = 0; i < size_; ++i) {
      const auto m = multi_index(i);
      for (std::size_t a = 0; a < m.size(); ++a) w[i] *= w1[a][m[a]];
    }
    return w;
  }

  /// Same axes with roughly half the step: 2N-1 nodes on non-periodic axes,
  /// 2N on periodic ones, so every node of this grid is a node of the result.
  Grid refined(int times = 1) const {
    auto axes = axes_;
    for (int k = 0; k < times; ++k)
      for (auto& ax : axes) ax.count = ax.periodic ? 2 * ax.count : 2 * ax.count - 1;
    return Grid(axes);
  }

  bool same_shape(const Grid& o) const {
    if (o.axes_.size() != axes_.size()) return false;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      const auto &p = axes_[a], &q = o.axes_[a];
      if (p.count != q.count || p.periodic != q.periodic || p.lo != q.lo || p.hi != q.hi) return false;
    }
    return true;
  }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Values on every grid node; only nodes inside `region` are meaningful.
template <class T>
struct Field {
  std::vector<T> at;
  Region region;
};

template <class T, class Fn>
Field<T> map_field(const Grid& g, const Region& r, Fn&& fn) {
  Field<T> out;
  out.at.resize(g.size());
  out.region = r;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.inside(i, r)) out.at[i] = fn(i);
  return out;
}

/// Central finite differences of order 2 or 4 (stencil radius 1 or 2).
struct Scheme {
  int order = 4;

  explicit Scheme(int o = 4) : order(o) {
    if (o != 2 && o != 4) throw UsageError("finite-difference order must be 2 or 4");
  }
  int radius() const { return order / 2; }
};

/// Partial derivatives of `f` along every axis. The result region shrinks by
/// the stencil radius on non-periodic axes; no one-sided stencils are used.
template <class T>
std::vector<Field<T>> partials(const Grid& g, const Field<T>& f, Scheme s) {
  const Region r = f.region.grown(s.radius(), g.axes());
  if (g.region_empty(r)) throw UsageError("grid too small for the requested derivative order");
  std::vector<Field<T>> out(g.dims());
  for (int a = 0; a < g.dims(); ++a) {
    const double h = g.axis(a).step();
    out[a] = map_field<T>(g, r, [&](std::size_t i) -> T {
      if (s.order == 2) return T((f.at[g.neighbor(i, a, 1)] - f.at[g.neighbor(i, a, -1)]) * (1.0 / (2 * h)));
      return T(((f.at[g.neighbor(i, a, -2)] - f.at[g.neighbor(i, a, 2)]) +
                (f.at[g.neighbor(i, a, 1)] - f.at[g.neighbor(i, a, -1)]) * 8.0) *
               (1.0 / (12 * h)));
    });
  }
  return out;
}

/// Second partial derivatives d_a d_b f (a <= b filled, result symmetric),
/// compact stencils: the region shrinks by one stencil radius only.
template <class T>
std::vector<std::vector<Field<T>>> second_partials(const Grid& g, const Field<T>& f, Scheme s) {
  const Region r = f.region.grown(s.radius(), g.axes());
  if (g.region_empty(r)) throw UsageError("grid too small for the requested derivative order");
  const int m = g.dims();
  static const double d1_4[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  static const double d2_4[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  static const double d1_2[3] = {-0.5, 0.0, 0.5};
  static const double d2_2[3] = {1.0, -2.0, 1.0};
  const int rad = s.radius();
  const double* d1 = s.order == 4 ? d1_4 : d1_2;
  const double* d2 = s.order == 4 ? d2_4 : d2_2;
  std::vector<std::vector<Field<T>>> out(m, std::vector<Field<T>>(m));
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      const double ha = g.axis(a).step(), hb = g.axis(b).step();
      out[a][b] = map_field<T>(g, r, [&](std::size_t i) -> T {
        if (a == b) {
          T acc = f.at[g.neighbor(i, a, -rad)] * d2[0];
          for (int k = 1; k <= 2 * rad; ++k) acc = acc + f.at[g.neighbor(i, a, k - rad)] * d2[k];
          return T(acc * (1.0 / (ha * ha)));
        }
        T acc = f.at[i] * 0.0;
        for (int k = 0; k <= 2 * rad; ++k) {
          if (d1[k] == 0.0) continue;
          const std::size_t j = g.neighbor(i, a, k - rad);
          for (int l = 0; l <= 2 * rad; ++l)
            if (d1[l] != 0.0) acc = acc + f.at[g.neighbor(j, b, l - rad)] * (d1[k] * d1[l]);
        }
        return T(acc * (1.0 / (ha * hb)));
      });
      if (b != a) out[b][a] = out[a][b];
    }
  return out;
}

inline double max_abs(const Grid& g, const Field<double>& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.inside(i, f.region)) m = std::max(m, std::abs(f.at[i]));
  return m;
}

}  // namespace laguerre
