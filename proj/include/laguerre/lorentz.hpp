#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "laguerre/errors.hpp"

namespace laguerre {

/// Point of R^{n+3}_2, signature (-,+,...,+,-). Length is n+3 for base
/// dimension n.
using LorentzVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;

/// Base dimension n encoded by a vector of R^{n+3}_2.
inline int base_dim(const LorentzVector& X) { return static_cast<int>(X.size()) - 3; }

/// Diagonal (-1, +1, ..., +1, -1) of size n+3.
struct SignatureMatrix {
  int n;

  explicit SignatureMatrix(int base) : n(base) {
    if (base < 1) throw UsageError("base dimension must be positive");
  }
  int size() const { return n + 3; }
  Vector diagonal() const {
    Vector d = Vector::Ones(n + 3);
    d(0) = -1.0;
    d(n + 2) = -1.0;
    return d;
  }
  Matrix dense() const { return diagonal().asDiagonal(); }
};

inline LorentzVector make_lorentz_vector(int n, const Vector& entries) {
  if (entries.size() != n + 3)
    throw UsageError("Lorentz vector needs n+3 = " + std::to_string(n + 3) + " entries");
  if (!entries.allFinite()) throw UsageError("Lorentz vector entries must be finite");
  return entries;
}

/// Standard basis vector e_i, 1-based as in the usual notation.
inline LorentzVector basis_vector(int n, int i) {
  if (i < 1 || i > n + 3) throw UsageError("basis index out of range");
  LorentzVector e = LorentzVector::Zero(n + 3);
  e(i - 1) = 1.0;
  return e;
}

/// The fixed light-like vector (1,-1,0,...,0) defining the Laguerre group.
inline LorentzVector wp(int n) {
  LorentzVector p = LorentzVector::Zero(n + 3);
  p(0) = 1.0;
  p(1) = -1.0;
  return p;
}

template <class DerivedA, class DerivedB>
auto inner(const Eigen::MatrixBase<DerivedA>& X, const Eigen::MatrixBase<DerivedB>& Y) {
  const auto k = X.size();
  if (k != Y.size()) throw UsageError("inner: dimension mismatch");
  if (k < 2) throw UsageError("inner: vectors too short");
  using S = typename DerivedA::Scalar;
  S s = -X(0) * Y(0) - X(k - 1) * Y(k - 1);
  for (Eigen::Index i = 1; i + 1 < k; ++i) s += X(i) * Y(i);
  return s;
}

enum class CausalType { lightlike, timelike, spacelike, zero };

inline const char* to_string(CausalType c) {
  switch (c) {
    case CausalType::lightlike: return "lightlike";
    case CausalType::timelike: return "timelike";
    case CausalType::spacelike: return "spacelike";
    case CausalType::zero: return "zero";
  }
  return "?";
}

/// Sign of <X,X>, with |<X,X>| <= tol*|X|^2 reported as lightlike.
inline CausalType causal_type(const LorentzVector& X, double tol = kDefaultTol) {
  const double e2 = X.squaredNorm();
  if (e2 == 0.0) return CausalType::zero;
  const double q = inner(X, X);
  if (std::abs(q) <= tol * e2) return CausalType::lightlike;
  return q < 0 ? CausalType::timelike : CausalType::spacelike;
}

inline bool is_lightlike(const LorentzVector& X, double tol = kDefaultTol) {
  return causal_type(X, tol) == CausalType::lightlike;
}

/// True iff T G T^t = G and wp T = wp, both entrywise within tol scaled by
/// the magnitude of T. Vectors act as rows: X -> X T.
inline bool is_laguerre_matrix(const Matrix& T, double tol = kDefaultTol) {
  if (T.rows() != T.cols()) throw UsageError("is_laguerre_matrix: matrix is not square");
  if (T.rows() < 4) throw UsageError("is_laguerre_matrix: size must be n+3 with n >= 1");
  if (!T.allFinite()) return false;
  const int n = static_cast<int>(T.rows()) - 3;
  const SignatureMatrix G(n);
  const Matrix Gd = G.dense();
  const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  const Matrix defect = T * Gd * T.transpose() - Gd;
  if (defect.cwiseAbs().maxCoeff() > tol * scale * scale) return false;
  const Vector p = wp(n);
  const Vector fixed = (p.transpose() * T).transpose() - p;
  return fixed.cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace laguerre
