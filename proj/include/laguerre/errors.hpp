#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace laguerre {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate a documented precondition
/// (dimension mismatch, non-orthogonal matrix, wrong variant, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A vector that should lie on the light cone does not.
class InvalidCoordinate : public Error {
 public:
  using Error::Error;
};

/// A projective line that is not the image of a contact element.
class InvalidLine : public Error {
 public:
  using Error::Error;
};

/// A matrix that is not a Laguerre transformation.
class InvalidElement : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of a Laguerre embedding (xi_1 = 0).
class EmbeddingDomainError : public Error {
 public:
  using Error::Error;
};

/// Surface fails a regularity requirement at a grid node: umbilic,
/// vanishing principal curvature, non-immersion, ...
class DegenerateSurface : public Error {
 public:
  DegenerateSurface(const std::string& what, std::vector<int> node)
      : Error(what + " at grid index " + format_index(node)), node_(std::move(node)) {}
  explicit DegenerateSurface(const std::string& what) : Error(what) {}

  const std::vector<int>& node() const noexcept { return node_; }

  static std::string format_index(const std::vector<int>& node) {
    std::string s = "(";
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(node[i]);
    }
    return s + ")";
  }

 private:
  std::vector<int> node_;
};

/// A numerical identity failed its declared tolerance.
class ToleranceBreach : public Error {
 public:
  using Error::Error;
};

}  // namespace laguerre
