#pragma once

// JSON ingestion of surface specs, sphere elements and transform scripts.

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "laguerre/group.hpp"
#include "laguerre/spaceforms.hpp"
#include "laguerre/spheres.hpp"
#include "laguerre/surfaces.hpp"

namespace laguerre::io {

using nlohmann::json;

/// Reads a JSON document from a file, or parses the argument itself when it
/// starts with '{' or '['.
inline json load(const std::string& path_or_text) {
  const auto first = path_or_text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && (path_or_text[first] == '{' || path_or_text[first] == '['))
      return json::parse(path_or_text);
    std::ifstream in(path_or_text);
    if (!in) throw UsageError("cannot read '" + path_or_text + "'");
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in '" + path_or_text + "': " + e.what());
  }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(what + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(what + ": \"" + key + "\" has the wrong type");
  }
}

inline Vector to_vector(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw UsageError(what + " must be a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw UsageError(what + " must contain numbers only");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Matrix to_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw UsageError(what + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(to_vector(j[0], what).size());
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = to_vector(j[static_cast<std::size_t>(r)], what);
    if (row.size() != cols) throw UsageError(what + " rows must have equal length");
    M.row(r) = row.transpose();
  }
  return M;
}

inline json from_vector(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json from_matrix(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) rows.push_back(from_vector(M.row(r).transpose()));
  return rows;
}

// ---------------------------------------------------------------------------
// Sphere elements: {"center":[...],"radius":r} or {"normal":[...],"offset":l}

inline SphereElement parse_sphere(const json& j) {
  if (j.contains("center")) return Sphere(to_vector(j.at("center"), "sphere center"), get<double>(j, "radius", "sphere"));
  if (j.contains("normal")) return Plane(to_vector(j.at("normal"), "plane normal"), get<double>(j, "offset", "plane"));
  throw UsageError("sphere element needs \"center\"/\"radius\" or \"normal\"/\"offset\"");
}

// ---------------------------------------------------------------------------
// Transform scripts: {"n":3,"steps":[{"kind":"parabolic","t":1}, ...]}.
// Steps apply in order. Kinds: parabolic {t}, hyperbolic {t},
// isometry {A?, a?}, matrix {matrix}, random {seed?}.

inline LaguerreTransform parse_transform(const json& j, std::uint64_t seed = 0) {
  if (j.contains("matrix") && !j.contains("steps")) return LaguerreTransform(to_matrix(j.at("matrix"), "transform matrix"));
  const int n = get<int>(j, "n", "transform script");
  if (n < 3) throw UsageError("transform script: n must be at least 3");
  if (!j.contains("steps") || !j.at("steps").is_array()) throw UsageError("transform script: missing \"steps\" array");
  LaguerreTransform T = LaguerreTransform::identity(n);
  std::size_t index = 0;
  for (const auto& st : j.at("steps")) {
    const std::string what = "transform step " + std::to_string(index++);
    const auto kind = get<std::string>(st, "kind", what);
    LaguerreTransform S = LaguerreTransform::identity(n);
    if (kind == "parabolic") {
      S = parabolic(n, get<double>(st, "t", what));
    } else if (kind == "hyperbolic") {
      S = hyperbolic(n, get<double>(st, "t", what));
    } else if (kind == "isometry") {
      const Matrix A = st.contains("A") ? to_matrix(st.at("A"), what + " A") : Matrix(Matrix::Identity(n, n));
      const Vector a = st.contains("a") ? to_vector(st.at("a"), what + " a") : Vector(Vector::Zero(n));
      if (A.rows() != n || A.cols() != n || a.size() != n) throw UsageError(what + ": dimension mismatch");
      S = isometry(A, a);
    } else if (kind == "matrix") {
      S = LaguerreTransform(to_matrix(get<json>(st, "matrix", what), what));
    } else if (kind == "random") {
      std::mt19937_64 rng(st.contains("seed") ? st.at("seed").get<std::uint64_t>() : seed);
      S = random_laguerre_transform(n, rng);
    } else {
      throw UsageError(what + ": unknown kind '" + kind + "'");
    }
    if (S.dim() != n) throw UsageError(what + ": dimension mismatch");
    T = T * S;
  }
  return T;
}

/// Raw (n+3)x(n+3) matrix of a transform document, without group validation.
inline Matrix parse_raw_matrix(const json& j, std::uint64_t seed = 0) {
  if (j.contains("matrix") && !j.contains("steps")) return to_matrix(j.at("matrix"), "transform matrix");
  if (j.is_array()) return to_matrix(j, "transform matrix");
  return parse_transform(j, seed).matrix();
}

// ---------------------------------------------------------------------------
// Surface specs

struct SurfaceSpec {
  std::optional<SurfaceDef> def;
  std::optional<SampleData> samples;
  Grid grid;
  Space space = Space::r3;
  int n = 3;
};

inline Grid parse_grid(const json& j, int m) {
  if (!j.is_object()) throw UsageError("surface spec: \"grid\" must be an object");
  std::vector<Axis> axes;
  if (j.contains("axes")) {
    for (const auto& a : j.at("axes")) {
      const auto r = to_vector(get<json>(a, "range", "grid axis"), "grid axis range");
      if (r.size() != 2) throw UsageError("grid axis range needs [lo, hi]");
      axes.push_back(Axis{r(0), r(1), get<int>(a, "count", "grid axis"), a.value("periodic", false)});
    }
  } else {
    static const char* names[] = {"u", "v", "w", "z"};
    std::vector<std::string> periodic;
    if (j.contains("periodic")) periodic = get<std::vector<std::string>>(j, "periodic", "grid");
    for (int a = 0; a < m && a < 4; ++a) {
      if (!j.contains(names[a])) break;
      const auto r = to_vector(j.at(names[a]), std::string("grid axis ") + names[a]);
      if (r.size() != 3) throw UsageError(std::string("grid axis ") + names[a] + " needs [lo, hi, count]");
      const bool per = std::find(periodic.begin(), periodic.end(), names[a]) != periodic.end();
      axes.push_back(Axis{r(0), r(1), static_cast<int>(r(2)), per});
    }
  }
  if (static_cast<int>(axes.size()) != m)
    throw UsageError("surface spec: grid needs " + std::to_string(m) + " axes");
  return Grid(axes);
}

namespace detail {

inline SurfaceDef flipped(SurfaceDef d) {
  if (d.space == Space::r30) throw UsageError("R^n_0 normals are fixed by <xi, nu> = 1 and cannot be flipped");
  const auto base = d.eval;
  d.eval = [base](const std::vector<Jet>& s, std::vector<Jet>& x, std::vector<Jet>& xi) {
    base(s, x, xi);
    for (auto& c : xi) c = -c;
  };
  return d;
}

inline SurfaceDef builtin_surface(const std::string& name, const std::map<std::string, double>& p, int n) {
  using builtin::detail::get;
  using builtin::detail::get_list;
  if (name == "torus") return builtin::torus(get(p, "R", 2.0), get(p, "a", 1.0));
  if (name == "sphere") return builtin::sphere(get(p, "radius", 1.0));
  if (name == "cylinder") return builtin::cylinder(get(p, "radius", 1.0));
  if (name == "graph" || name == "translational_graph") {
    std::vector<double> k = get_list(p, "k", n - 1, 0.0), c = get_list(p, "c", n - 1, 0.0);
    for (int i = 0; i < n - 1; ++i)
      if (!p.count("k" + std::to_string(i + 1))) k[i] = i + 1.0;
    return builtin::cubic_graph(n, k, c);
  }
  if (name == "maximal_catenoid_r31") return builtin::maximal_catenoid_r31();
  if (name == "plane_r31") return builtin::plane_r31();
  if (name == "harmonic_graph_r30") return builtin::harmonic_graph_r30();
  throw UsageError("unknown builtin '" + name + "'");
}

}  // namespace detail

inline SurfaceSpec parse_surface_spec(const json& j) {
  if (!j.is_object()) throw UsageError("surface spec must be a JSON object");
  SurfaceSpec s;
  if (j.contains("builtin")) {
    std::map<std::string, double> params;
    if (j.contains("params")) params = get<std::map<std::string, double>>(j, "params", "surface spec");
    const int n = j.value("n", params.count("n") ? static_cast<int>(params.at("n")) : 3);
    params.erase("n");
    SurfaceDef d = detail::builtin_surface(get<std::string>(j, "builtin", "surface spec"), params, n);
    if (j.contains("space") && parse_space(get<std::string>(j, "space", "surface spec")) != d.space)
      throw UsageError("surface spec: \"space\" does not match builtin '" + d.name + "'");
    const std::string normal = j.value("normal", std::string("outward"));
    if (normal == "inward")
      d = detail::flipped(d);
    else if (normal != "outward")
      throw UsageError("surface spec: \"normal\" must be \"outward\" or \"inward\"");
    s.space = d.space;
    s.n = d.n;
    s.def = d;
  } else if (j.contains("samples")) {
    s.space = parse_space(j.value("space", std::string("r3")));
    s.n = j.value("n", 3);
    const auto& sm = j.at("samples");
    SampleData d{s.space, s.n, {}, {}};
    for (const auto& p : get<json>(sm, "points", "samples")) d.points.push_back(to_vector(p, "sample point"));
    for (const auto& p : get<json>(sm, "normals", "samples")) d.normals.push_back(to_vector(p, "sample normal"));
    s.samples = d;
  } else {
    throw UsageError("surface spec needs \"builtin\" or \"samples\"");
  }
  s.grid = parse_grid(get<json>(j, "grid", "surface spec"), s.n - 1);
  return s;
}

/// Writes `text` to `path` through a temporary file and a rename.
inline void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw UsageError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw UsageError("cannot move output into place at '" + path + "': " + ec.message());
}

}  // namespace laguerre::io
