#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "laguerre/jet.hpp"
#include "laguerre/spheres.hpp"

namespace laguerre {

/// Element of the Laguerre group: an (n+3)x(n+3) matrix preserving the
/// inner product of R^{n+3}_2 and fixing wp. Acts on row vectors, X -> X T,
/// so a product S*T applies S first.
class LaguerreTransform {
 public:
  explicit LaguerreTransform(Matrix m, double tol = kDefaultTol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 6)
      throw UsageError("Laguerre transform must be square of size n+3 with n >= 3");
    if (!is_laguerre_matrix(m_, tol)) throw InvalidElement("matrix is not in the Laguerre group");
    const int n = dim();
    const double w = m_(n + 2, n + 2);
    const double v2 = m_.row(n + 2).segment(2, n).squaredNorm();
    if (std::abs(w * w - 1.0 - v2) > tol * std::max(1.0, w * w))
      throw InvalidElement("Lorentz block violates w^2 = 1 + |v|^2");
  }

  static LaguerreTransform identity(int n) { return LaguerreTransform(Matrix::Identity(n + 3, n + 3)); }

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()) - 3; }

  /// Apply *this first, then o.
  LaguerreTransform operator*(const LaguerreTransform& o) const {
    if (o.dim() != dim()) throw UsageError("compose: dimension mismatch");
    return LaguerreTransform(m_ * o.m_, 1e-8);
  }
  LaguerreTransform inverse() const {
    const Matrix G = SignatureMatrix(dim()).dense();
    return LaguerreTransform(G * m_.transpose() * G, 1e-8);
  }

  LorentzVector apply(const LorentzVector& X) const {
    if (X.size() != m_.rows()) throw UsageError("apply: dimension mismatch");
    return (X.transpose() * m_).transpose();
  }

 private:
  Matrix m_;
};

inline bool is_orthogonal(const Matrix& A, double tol = 1e-10) {
  return A.rows() == A.cols() &&
         (A * A.transpose() - Matrix::Identity(A.rows(), A.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Matrix of the isometry (x, xi) -> (xA + a, xi A).
inline LaguerreTransform isometry(const Matrix& A, const Vector& a) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || a.size() != n) throw UsageError("isometry: A must be n x n and a an n-vector");
  if (!is_orthogonal(A)) throw UsageError("isometry: A is not orthogonal");
  const double a2 = a.squaredNorm();
  Matrix T = Matrix::Zero(n + 3, n + 3);
  T(0, 0) = 1.0 + 0.5 * a2;
  T(0, 1) = -0.5 * a2;
  T.block(0, 2, 1, n) = a.transpose();
  T(1, 0) = 0.5 * a2;
  T(1, 1) = 1.0 - 0.5 * a2;
  T.block(1, 2, 1, n) = a.transpose();
  const Vector Aa = A * a;
  T.block(2, 0, n, 1) = Aa;
  T.block(2, 1, n, 1) = -Aa;
  T.block(2, 2, n, n) = A;
  T(n + 2, n + 2) = 1.0;
  return LaguerreTransform(std::move(T));
}

/// Parallel transformation (x, xi) -> (x + t xi, xi); shifts every signed
/// radius by +t.
inline LaguerreTransform parabolic(int n, double t) {
  if (!std::isfinite(t)) throw UsageError("parabolic: t must be finite");
  Matrix T = Matrix::Identity(n + 3, n + 3);
  T(0, 0) = 1.0 - 0.5 * t * t;
  T(0, 1) = 0.5 * t * t;
  T(0, n + 2) = -t;
  T(1, 0) = -0.5 * t * t;
  T(1, 1) = 1.0 + 0.5 * t * t;
  T(1, n + 2) = -t;
  T(n + 2, 0) = t;
  T(n + 2, 1) = -t;
  return LaguerreTransform(std::move(T));
}

/// Boost in the plane of the last spatial coordinate and the last slot.
inline LaguerreTransform hyperbolic(int n, double t) {
  if (!std::isfinite(t)) throw UsageError("hyperbolic: t must be finite");
  Matrix T = Matrix::Identity(n + 3, n + 3);
  const double c = std::cosh(t), s = std::sinh(t);
  T(n + 1, n + 1) = c;
  T(n + 1, n + 2) = s;
  T(n + 2, n + 1) = s;
  T(n + 2, n + 2) = c;
  return LaguerreTransform(std::move(T));
}

/// Block data of a group element: linear part [[A,u],[v,w]] in O(n,1) and
/// translation (a, rho) of the affine Lorentz group of R^{n+1}_1.
struct BlockData {
  Matrix A;
  Vector u;
  Vector v;
  double w = 1.0;
  Vector a;
  double rho = 0.0;

  int dim() const { return static_cast<int>(A.rows()); }

  Matrix lorentz_block() const {
    const int n = dim();
    Matrix M(n + 1, n + 1);
    M.block(0, 0, n, n) = A;
    M.block(0, n, n, 1) = u;
    M.block(n, 0, 1, n) = v.transpose();
    M(n, n) = w;
    return M;
  }

  /// The (n+2)x(n+2) affine matrix [[A,u,0],[v,w,0],[a,rho,1]].
  Matrix affine_matrix() const {
    const int n = dim();
    Matrix M = Matrix::Zero(n + 2, n + 2);
    M.block(0, 0, n + 1, n + 1) = lorentz_block();
    M.block(n + 1, 0, 1, n) = a.transpose();
    M(n + 1, n) = rho;
    M(n + 1, n + 1) = 1.0;
    return M;
  }
};

inline bool preserves_lorentz_form(const Matrix& M, double tol = kDefaultTol) {
  const auto k = M.rows();
  Vector d = Vector::Ones(k);
  d(k - 1) = -1.0;
  const Matrix J = d.asDiagonal();
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M * J * M.transpose() - J).cwiseAbs().maxCoeff() <= tol * scale * scale;
}

inline LaguerreTransform from_blocks(const BlockData& b) {
  const int n = b.dim();
  if (b.A.cols() != n || b.u.size() != n || b.v.size() != n || b.a.size() != n)
    throw UsageError("from_blocks: inconsistent block sizes");
  if (!preserves_lorentz_form(b.lorentz_block()))
    throw UsageError("from_blocks: [[A,u],[v,w]] does not preserve the Lorentz form");
  const double h = 0.5 * (b.a.squaredNorm() - b.rho * b.rho);
  Matrix T(n + 3, n + 3);
  T(0, 0) = 1.0 + h;
  T(0, 1) = -h;
  T.block(0, 2, 1, n) = b.a.transpose();
  T(0, n + 2) = b.rho;
  T(1, 0) = h;
  T(1, 1) = 1.0 - h;
  T.block(1, 2, 1, n) = b.a.transpose();
  T(1, n + 2) = b.rho;
  const Vector c = b.A * b.a - b.rho * b.u;
  T.block(2, 0, n, 1) = c;
  T.block(2, 1, n, 1) = -c;
  T.block(2, 2, n, n) = b.A;
  T.block(2, n + 2, n, 1) = b.u;
  const double d = b.v.dot(b.a) - b.rho * b.w;
  T(n + 2, 0) = d;
  T(n + 2, 1) = -d;
  T.block(n + 2, 2, 1, n) = b.v.transpose();
  T(n + 2, n + 2) = b.w;
  return LaguerreTransform(std::move(T));
}

inline BlockData to_blocks(const LaguerreTransform& T) {
  const Matrix& m = T.matrix();
  const int n = T.dim();
  BlockData b;
  b.a = m.block(0, 2, 1, n).transpose();
  b.rho = m(0, n + 2);
  b.A = m.block(2, 2, n, n);
  b.u = m.block(2, n + 2, n, 1);
  b.v = m.block(n + 2, 2, 1, n).transpose();
  b.w = m(n + 2, n + 2);
  if (!preserves_lorentz_form(b.lorentz_block(), 1e-8))
    throw InvalidElement("to_blocks: linear part is not Lorentzian");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((from_blocks(b).matrix() - m).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw InvalidElement("to_blocks: matrix does not have the block form");
  return b;
}

inline ProjectivePoint act_on_coord(const LaguerreTransform& T, const ProjectivePoint& g) {
  return ProjectivePoint(T.apply(g.representative()));
}

/// Image of a contact element under T: both pencil generators are mapped and
/// the point sphere / plane of the image line are re-extracted.
inline ContactElement act_on_contact(const LaguerreTransform& T, const ContactElement& c) {
  if (c.dim() != T.dim()) throw UsageError("act_on_contact: dimension mismatch");
  auto [g1, g2] = lie_pair(c);
  try {
    return detail::contact_from_span(T.apply(g1), T.apply(g2));
  } catch (const InvalidLine& e) {
    throw InvalidElement(std::string("act_on_contact: ") + e.what());
  }
}

/// Same action written out in coordinates, generic over the scalar type so
/// that jets of a surface pass through it. With a, b the last entries of
/// gamma1 T and gamma2 T: x~ = mid(gamma1 T) - (a/b) mid(gamma2 T),
/// xi~ = mid(gamma2 T) / b.
template <class S>
void act_on_contact_coords(const Matrix& T, const std::vector<S>& x, const std::vector<S>& xi,
                           std::vector<S>& x_out, std::vector<S>& xi_out) {
  const int n = static_cast<int>(x.size());
  if (T.rows() != n + 3 || static_cast<int>(xi.size()) != n)
    throw UsageError("act_on_contact_coords: dimension mismatch");
  S x2 = x[0] * x[0], xx = x[0] * xi[0];
  for (int i = 1; i < n; ++i) {
    x2 += x[i] * x[i];
    xx += x[i] * xi[i];
  }
  std::vector<S> g1, g2;
  g1.reserve(n + 3);
  g2.reserve(n + 3);
  g1.push_back(0.5 * (1.0 + x2));
  g1.push_back(0.5 * (1.0 - x2));
  g2.push_back(xx);
  g2.push_back(-xx);
  for (int i = 0; i < n; ++i) {
    g1.push_back(x[i]);
    g2.push_back(xi[i]);
  }
  g1.push_back(constant_like(x[0], 0.0));
  g2.push_back(constant_like(x[0], 1.0));
  auto col = [&](const std::vector<S>& g, int j) {
    S s = g[0] * T(0, j);
    for (int i = 1; i < n + 3; ++i)
      if (T(i, j) != 0.0) s += g[i] * T(i, j);
    return s;
  };
  const S a = col(g1, n + 2);
  const S b = col(g2, n + 2);
  if (value(b) == 0.0) throw InvalidElement("act_on_contact: image plane has zero last entry");
  const S q = a / b;
  x_out.clear();
  xi_out.clear();
  for (int j = 2; j < n + 2; ++j) {
    const S c2 = col(g2, j);
    x_out.push_back(col(g1, j) - q * c2);
    xi_out.push_back(c2 / b);
  }
}

/// Closed form of the parabolic flow on contact elements.
inline ContactElement parabolic_flow(const ContactElement& c, double t) {
  return ContactElement(c.x() + t * c.xi(), c.xi());
}

/// Closed form of the hyperbolic flow with x = (x0, x1), xi = (xi0, xi1).
inline ContactElement hyperbolic_flow(const ContactElement& c, double t) {
  const int n = c.dim();
  const double ch = std::cosh(t), sh = std::sinh(t);
  const double x1 = c.x()(n - 1), xi1 = c.xi()(n - 1);
  const double d = sh * xi1 + ch;
  Vector x(n), xi(n);
  x.head(n - 1) = c.x().head(n - 1) - (sh * x1 / d) * c.xi().head(n - 1);
  x(n - 1) = x1 / d;
  xi.head(n - 1) = c.xi().head(n - 1) / d;
  xi(n - 1) = (ch * xi1 + sh) / d;
  return ContactElement(std::move(x), std::move(xi), 1e-10);
}

inline ContactElement isometry_flow(const ContactElement& c, const Matrix& A, const Vector& a) {
  return ContactElement((c.x().transpose() * A).transpose() + a, (c.xi().transpose() * A).transpose(), 1e-10);
}

/// Isometry part of a factorization: x -> xA + a.
struct IsometryData {
  Matrix A;
  Vector a;
};

/// T = epsilon * T(sigma2) T(psi_t) T(phi_s) T(sigma1).
struct Factorization {
  int epsilon = 1;
  IsometryData sigma2;
  double t = 0.0;
  double s = 0.0;
  IsometryData sigma1;

  Matrix reconstruct() const {
    const int n = static_cast<int>(sigma1.A.rows());
    const Matrix P = isometry(sigma2.A, sigma2.a).matrix() * hyperbolic(n, t).matrix() *
                     parabolic(n, s).matrix() * isometry(sigma1.A, sigma1.a).matrix();
    return static_cast<double>(epsilon) * P;
  }
};

/// Orthogonal A with v A = (0,...,0,|v|): the Householder reflection taking
/// v/|v| to the last axis, or the identity when v is already there or zero.
inline Matrix align_to_last_axis(const Vector& v) {
  const int n = static_cast<int>(v.size());
  Matrix A = Matrix::Identity(n, n);
  const double nv = v.norm();
  if (nv == 0.0) return A;
  Vector h = v / nv;
  h(n - 1) -= 1.0;
  const double hh = h.squaredNorm();
  if (hh < 1e-28) return A;
  A -= (2.0 / hh) * h * h.transpose();
  return A;
}

/// Constructive factorization into isometries, a parallel transformation and
/// a hyperbolic transformation. Accepts T with wp T = +-wp; the sign becomes
/// epsilon. The orientation-reversing component (w < 0 after the sign fix)
/// is not generated by these families and is rejected.
inline Factorization decompose(const Matrix& Tin, double tol = kDefaultTol) {
  if (Tin.rows() != Tin.cols() || Tin.rows() < 6) throw UsageError("decompose: bad matrix size");
  const int n = static_cast<int>(Tin.rows()) - 3;
  Factorization f;
  Matrix T = Tin;
  if (!is_laguerre_matrix(T, tol)) {
    if (is_laguerre_matrix(-T, tol)) {
      f.epsilon = -1;
      T = -T;
    } else {
      throw InvalidElement("decompose: matrix is not in the Laguerre group");
    }
  }
  const double w = T(n + 2, n + 2);
  if (w < 0.0) throw InvalidElement("decompose: orientation-reversing element (w < 0) is not generated by the flows");
  const Vector v = T.block(n + 2, 2, 1, n).transpose();
  const double c = T(n + 2, 0);
  f.t = std::asinh(v.norm());
  f.s = c / w;
  const Matrix A1 = align_to_last_axis(v);
  f.sigma1 = {A1.transpose(), Vector::Zero(n)};
  const Matrix Tstar = T * isometry(A1, Vector::Zero(n)).matrix() * parabolic(n, -f.s).matrix() *
                       hyperbolic(n, -f.t).matrix();
  f.sigma2.A = Tstar.block(2, 2, n, n);
  f.sigma2.a = Tstar.block(0, 2, 1, n).transpose();
  // Re-orthogonalize the rotation block against rounding.
  Eigen::JacobiSVD<Matrix> svd(f.sigma2.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  f.sigma2.A = svd.matrixU() * svd.matrixV().transpose();
  const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  if ((isometry(f.sigma2.A, f.sigma2.a).matrix() - Tstar).cwiseAbs().maxCoeff() > 1e-7 * scale)
    throw InvalidElement("decompose: residual factor is not an isometry");
  return f;
}

inline Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = N(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

/// Parameter ranges for random group elements built from all three
/// generator kinds.
struct RandomTransformOptions {
  double translation = 1.0;
  double parabolic = 0.3;
  double hyperbolic = 0.3;
};

/// isometry * hyperbolic * parabolic * isometry with uniformly drawn
/// parameters.
inline LaguerreTransform random_laguerre_transform(int n, std::mt19937_64& rng,
                                                   const RandomTransformOptions& o = {}) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto rand_vec = [&](double s) {
    Vector a(n);
    for (int i = 0; i < n; ++i) a(i) = s * U(rng);
    return a;
  };
  const Matrix A1 = random_orthogonal(n, rng);
  const Vector a1 = rand_vec(o.translation);
  const double th = o.hyperbolic * U(rng);
  const double tp = o.parabolic * U(rng);
  const Matrix A2 = random_orthogonal(n, rng);
  const Vector a2 = rand_vec(o.translation);
  return isometry(A1, a1) * hyperbolic(n, th) * parabolic(n, tp) * isometry(A2, a2);
}

}  // namespace laguerre
