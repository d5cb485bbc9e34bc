#pragma once

// Command implementations of the laguerre CLI. `run` is the whole program
// minus process setup, so tests can drive it in-process.

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "laguerre/laguerre.hpp"
#include "laguerre_io.hpp"

namespace laguerre::cli {

using io::json;

enum ExitCode { ok = 0, input_error = 2, invalid_element = 3, degenerate = 4, breach = 5 };

struct RunConfig {
  std::vector<std::string> inputs;
  std::vector<std::string> specs;
  std::vector<std::string> transforms;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  int grid_refine = 0;
  int fd_order = 4;
  std::optional<double> tol;
  std::optional<double> threshold;
  std::uint64_t seed = 0;
  bool strict = false;
};

/// Named checks with their values and limits; any failure is a breach.
class Checks {
 public:
  void add(const std::string& name, double value, double limit) {
    const bool pass = value <= limit;
    j_[name] = {{"value", value}, {"limit", limit}, {"pass", pass}};
    if (!pass) failed_.push_back(name);
  }
  void add_flag(const std::string& name, bool pass) {
    j_[name] = {{"pass", pass}};
    if (!pass) failed_.push_back(name);
  }
  const json& to_json() const { return j_; }
  const std::vector<std::string>& failed() const { return failed_; }

 private:
  json j_ = json::object();
  std::vector<std::string> failed_;
};

namespace detail {

inline std::shared_ptr<spdlog::logger> logger() {
  auto lg = spdlog::get("laguerre");
  if (!lg) {
    lg = spdlog::stderr_logger_mt("laguerre");
    const char* lv = std::getenv("LAGUERRE_LOG");
    lg->set_level(lv ? spdlog::level::from_str(lv) : spdlog::level::warn);
  }
  return lg;
}

inline json grid_json(const Grid& g) {
  json axes = json::array();
  for (const auto& a : g.axes()) axes.push_back({{"range", {a.lo, a.hi}}, {"count", a.count}, {"periodic", a.periodic}});
  return axes;
}

inline json surface_json(const SurfacePatch& p) {
  return {{"source", p.source},    {"params", p.params},          {"space", to_string(p.space)},
          {"n", p.n},              {"analytic", p.analytic},      {"grid", grid_json(p.grid)}};
}

struct Loaded {
  io::SurfaceSpec spec;
  SurfacePatch patch;
};

inline std::optional<LaguerreTransform> combined_transform(const RunConfig& c) {
  if (c.transforms.empty()) return std::nullopt;
  std::optional<LaguerreTransform> T;
  for (const auto& t : c.transforms) {
    const auto S = io::parse_transform(io::load(t), c.seed);
    T = T ? *T * S : S;
  }
  return T;
}

inline Loaded load_surface(const std::string& path, const RunConfig& c, const std::optional<LaguerreTransform>& T) {
  Loaded L{io::parse_surface_spec(io::load(path)), {}};
  auto& s = L.spec;
  if (c.grid_refine < 0) throw UsageError("--grid-refine must be non-negative");
  if (c.grid_refine > 0) {
    if (s.samples) throw UsageError("--grid-refine needs an analytic builtin; samples are fixed to their grid");
    s.grid = s.grid.refined(c.grid_refine);
  }
  PatchOptions po;
  po.scheme = Scheme(c.fd_order);
  if (s.def) {
    SurfaceDef d = T ? transformed(*s.def, *T) : *s.def;
    L.patch = build_patch(d, s.grid, po);
  } else {
    SampleData d = T ? transformed(*s.samples, *T) : *s.samples;
    L.patch = build_patch(d, s.grid, po);
  }
  logger()->info("built patch '{}' with {} nodes", L.patch.source, L.patch.grid.size());
  return L;
}

inline const std::string& single_spec(const RunConfig& c) {
  if (c.specs.size() != 1) throw UsageError("this command needs exactly one --spec");
  return c.specs[0];
}

inline json analysis_summary(const SurfacePatch& p, const Analysis& A, Checks& checks, double tol) {
  json res = json::object();
  for (const auto& [name, f] : A.residuals) {
    const double v = max_abs(A.grid, f);
    res[name] = v;
    checks.add("residual:" + name, v, tol);
  }
  const auto nodes = A.grid.nodes(A.shape.region);
  const int m = A.m;
  Vector lo = Vector::Constant(m, 1e300), hi = Vector::Constant(m, -1e300);
  for (auto i : nodes) {
    const Vector e = sorted(laguerre_shape_eigenvalues(A.shape.at[i]));
    lo = lo.cwiseMin(e);
    hi = hi.cwiseMax(e);
  }
  json out = {{"surface", surface_json(p)},
              {"residuals", res},
              {"shape_spectrum", {{"min", io::from_vector(lo)}, {"max", io::from_vector(hi)}}},
              {"volume", laguerre_volume(p, A.shape).volume}};
  if (A.n == 3) out["max_abs_gauss_curvature"] = max_abs(A.grid, gauss_curvature(A));
  return out;
}

inline json point_arrays(const Analysis& A) {
  json params = json::array(), spec = json::array(), r = json::array(), rho = json::array(), g = json::array();
  for (auto i : A.grid.nodes(A.shape.region)) {
    params.push_back(A.grid.coords(i));
    spec.push_back(io::from_vector(sorted(laguerre_shape_eigenvalues(A.shape.at[i]))));
    r.push_back(A.shape.at[i].mean_r);
    rho.push_back(A.shape.at[i].rho);
    std::vector<double> gv;
    for (int a = 0; a < A.m; ++a)
      for (int b = a; b < A.m; ++b) gv.push_back(A.g.at[i](a, b));
    g.push_back(gv);
  }
  return {{"params", params}, {"shape_spectrum", spec}, {"mean_radius", r}, {"rho", rho}, {"metric_upper", g}};
}

inline std::string points_csv(const Analysis& A) {
  std::ostringstream os;
  os.precision(17);
  const int m = A.m;
  for (int a = 0; a < m; ++a) os << "s" << a + 1 << ",";
  for (int a = 0; a < m; ++a) os << "k" << a + 1 << ",";
  os << "mean_radius,rho";
  for (int a = 0; a < m; ++a) os << ",S" << a + 1;
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) os << ",g" << a + 1 << b + 1;
  os << "\n";
  for (auto i : A.grid.nodes(A.shape.region)) {
    const auto& sn = A.shape.at[i];
    for (double c : A.grid.coords(i)) os << c << ",";
    for (int a = 0; a < m; ++a) os << sn.k(a) << ",";
    os << sn.mean_r << "," << sn.rho;
    const Vector e = laguerre_shape_eigenvalues(sn);
    for (int a = 0; a < m; ++a) os << "," << e(a);
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) os << "," << A.g.at[i](a, b);
    os << "\n";
  }
  return os.str();
}

inline json minimality_json(const MinimalityReport& r, int n) {
  json j = {{"verdict", r.minimal ? "minimal" : "non-minimal"},
            {"max_el_residual", r.max_el},
            {"max_el_residual_reduced", r.max_el_reduced},
            {"form_discrepancy", r.form_discrepancy},
            {"threshold", r.threshold},
            {"laplace_eta", {{"wp_component", r.laplace_eta_wp},
                             {"tangent_components", r.laplace_eta_tangent},
                             {"normal_component", r.laplace_eta_normal}}}};
  if (n == 3) {
    j["max_laplacian_r"] = r.max_laplacian_r;
    j["threshold_laplacian_r"] = r.threshold_r;
    j["verdict_laplacian_r"] = r.minimal_r ? "minimal" : "non-minimal";
    j["crosscheck"] = r.crosscheck;
    j["crosscheck_relative"] = r.crosscheck_relative;
    j["inconsistent"] = r.inconsistent;
  } else {
    j["max_laplacian_r"] = nullptr;
    j["crosscheck"] = nullptr;
  }
  return j;
}

inline void minimality_checks(const MinimalityReport& r, int n, Checks& checks) {
  if (n != 3) return;
  checks.add_flag("verdicts_agree", !r.inconsistent);
  checks.add("crosscheck_relative", r.crosscheck_relative, 1e-3);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands. Each fills `report` and the list of checks.

inline void cmd_spheres_contact(const RunConfig& c, json& report, Checks&) {
  if (c.inputs.size() != 2) throw UsageError("spheres contact needs two sphere elements");
  const auto a = io::parse_sphere(io::load(c.inputs[0]));
  const auto b = io::parse_sphere(io::load(c.inputs[1]));
  if (dim(a) != dim(b)) throw UsageError("sphere elements have different dimensions");
  report["contact"] = oriented_contact(a, b, c.tol.value_or(kDefaultTol));
  if (std::holds_alternative<Sphere>(a) && std::holds_alternative<Sphere>(b))
    report["F"] = tangential_invariant(a, b);
  else
    report["F"] = nullptr;
  report["coords"] = {io::from_vector(sphere_coord(a).representative()), io::from_vector(sphere_coord(b).representative())};
}

inline json blocks_json(const BlockData& b) {
  return {{"A", io::from_matrix(b.A)}, {"u", io::from_vector(b.u)}, {"v", io::from_vector(b.v)},
          {"w", b.w},                  {"a", io::from_vector(b.a)}, {"rho", b.rho}};
}

inline void cmd_group_compose(const RunConfig& c, json& report, Checks&) {
  std::vector<std::string> docs = c.inputs;
  docs.insert(docs.end(), c.transforms.begin(), c.transforms.end());
  if (docs.empty()) throw UsageError("group compose needs at least one transform");
  std::optional<LaguerreTransform> T;
  for (const auto& d : docs) {
    const auto S = io::parse_transform(io::load(d), c.seed);
    T = T ? *T * S : S;
  }
  report["n"] = T->dim();
  report["matrix"] = io::from_matrix(T->matrix());
  report["blocks"] = blocks_json(to_blocks(*T));
}

inline void cmd_group_decompose(const RunConfig& c, json& report, Checks& checks) {
  std::vector<std::string> docs = c.inputs;
  docs.insert(docs.end(), c.transforms.begin(), c.transforms.end());
  if (docs.size() != 1) throw UsageError("group decompose needs exactly one matrix or transform script");
  const Matrix M = io::parse_raw_matrix(io::load(docs[0]), c.seed);
  const auto f = decompose(M);
  const double err = (f.reconstruct() - M).cwiseAbs().maxCoeff();
  auto iso = [](const IsometryData& d) { return json{{"A", io::from_matrix(d.A)}, {"a", io::from_vector(d.a)}}; };
  report["epsilon"] = f.epsilon;
  report["sigma2"] = iso(f.sigma2);
  report["hyperbolic_t"] = f.t;
  report["parabolic_s"] = f.s;
  report["sigma1"] = iso(f.sigma1);
  report["reconstruction_error"] = err;
  checks.add("reconstruction_error", err, c.tol.value_or(1e-10) * std::max(1.0, M.cwiseAbs().maxCoeff()));
}

inline void cmd_surface_analyze(const RunConfig& c, json& report, Checks& checks) {
  const auto L = detail::load_surface(detail::single_spec(c), c, detail::combined_transform(c));
  const auto A = analyze(L.patch, {Scheme(c.fd_order)});
  report = detail::analysis_summary(L.patch, A, checks, c.tol.value_or(1e-4));
  report["points"] = detail::point_arrays(A);
  if (c.csv) io::write_atomic(*c.csv, detail::points_csv(A));
}

inline void cmd_surface_minimality(const RunConfig& c, json& report, Checks& checks) {
  const auto L = detail::load_surface(detail::single_spec(c), c, detail::combined_transform(c));
  const auto A = analyze(L.patch, {Scheme(c.fd_order)});
  MinimalityOptions mo;
  mo.threshold = c.threshold;
  const auto r = minimality_report(A, mo);
  report = detail::minimality_json(r, A.n);
  report["surface"] = detail::surface_json(L.patch);
  detail::minimality_checks(r, A.n, checks);
}

inline void cmd_surface_volume(const RunConfig& c, json& report, Checks& checks) {
  const auto L = detail::load_surface(detail::single_spec(c), c, detail::combined_transform(c));
  const auto s = shape_data(L.patch);
  const auto v = laguerre_volume(L.patch, s);
  report["surface"] = detail::surface_json(L.patch);
  report["volume"] = v.volume;
  if (L.patch.n == 3) {
    report["curvature_form"] = v.curvature_form;
    const double rel = std::abs(v.volume - v.curvature_form) / std::max(std::abs(v.volume), 1e-300);
    report["relative_difference"] = rel;
    checks.add("curvature_form_agreement", rel, c.tol.value_or(1e-6));
  }
}

inline void cmd_surface_compare(const RunConfig& c, json& report, Checks& checks) {
  const auto T = detail::combined_transform(c);
  if (c.specs.empty() || c.specs.size() > 2) throw UsageError("surface compare needs one or two --spec files");
  if (c.specs.size() == 1 && !T) throw UsageError("surface compare with one --spec needs a --transform");
  const auto a = detail::load_surface(c.specs[0], c, std::nullopt);
  const auto b = detail::load_surface(c.specs.back(), c, T);
  const auto Aa = analyze(a.patch, {Scheme(c.fd_order)});
  const auto Ab = analyze(b.patch, {Scheme(c.fd_order)});
  const auto cmp = compare_invariants(Aa, Ab);
  const double tol = c.tol.value_or(1e-6);
  report = {{"first", detail::surface_json(a.patch)},
            {"second", detail::surface_json(b.patch)},
            {"metric", cmp.metric},
            {"shape_operator", cmp.shape_operator},
            {"B_spectrum", cmp.B_spectrum},
            {"worst_metric_node", cmp.worst_metric_node}};
  report["equivalent"] = cmp.metric <= tol && cmp.shape_operator <= tol;
  checks.add("metric", cmp.metric, tol);
  checks.add("shape_operator", cmp.shape_operator, tol);
}

inline void cmd_surface_embed(const RunConfig& c, json& report, Checks& checks) {
  if (!c.transforms.empty()) throw UsageError("Laguerre transforms act on Euclidean patches; embed takes none");
  const auto L = detail::load_surface(detail::single_spec(c), c, std::nullopt);
  if (L.patch.space == Space::r3) throw UsageError("embed needs a surface in r31 or r30");
  PatchOptions po;
  po.scheme = Scheme(c.fd_order);
  const SurfacePatch img = L.spec.def ? build_patch(embedded(*L.spec.def), L.spec.grid, po)
                                      : build_patch(embedded(*L.spec.samples), L.spec.grid, po);
  const auto tr = transfer_check(L.patch, img);
  const double tol = c.tol.value_or(1e-8);
  report["embedding"] = L.patch.space == Space::r31 ? "sigma" : "tau";
  report["transfer"] = {{"radii", tr.radii},          {"rho", tr.rho},         {"position_vector", tr.position},
                        {"gauss_map", tr.gauss_map},  {"metric", tr.metric},   {"probe_rho", tr.probe_rho},
                        {"probe_r", tr.probe_r}};
  for (const auto& [k, v] : report["transfer"].items()) checks.add("transfer:" + k, v.get<double>(), tol);
  const auto A = analyze(img, {Scheme(c.fd_order)});
  Checks ignored;
  report["analysis"] = detail::analysis_summary(img, A, ignored, 1e-4);
  report["source"] = detail::surface_json(L.patch);
  MinimalityOptions mo;
  mo.threshold = c.threshold;
  const auto r = minimality_report(A, mo);
  report["minimality"] = detail::minimality_json(r, A.n);
  detail::minimality_checks(r, A.n, checks);
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Laguerre geometry of hypersurfaces"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--spec", cfg.specs, "surface spec JSON (twice for compare)");
  app.add_option("--transform", cfg.transforms, "transform script JSON (repeatable, applied in order)");
  app.add_option("--out", cfg.out, "write the JSON report here instead of stdout");
  app.add_option("--csv", cfg.csv, "per-point CSV export (surface analyze)");
  app.add_option("--grid-refine", cfg.grid_refine, "halve the grid step K times");
  app.add_option("--fd-order", cfg.fd_order, "finite-difference order")->check(CLI::IsMember({2, 4}));
  app.add_option("--tol", cfg.tol, "tolerance override for the command's checks");
  app.add_option("--threshold", cfg.threshold, "minimality threshold on the Euler-Lagrange residual");
  app.add_option("--seed", cfg.seed, "seed for random transform steps");
  app.add_flag("--strict", cfg.strict, "exit 5 when a check fails");

  using Cmd = void (*)(const RunConfig&, json&, Checks&);
  std::vector<std::pair<CLI::App*, Cmd>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Cmd fn) {
    auto* s = parent->add_subcommand(name, help);
    s->add_option("inputs", cfg.inputs, "input JSON files or inline JSON");
    leaves.emplace_back(s, fn);
  };
  auto* spheres = app.add_subcommand("spheres", "sphere elements");
  spheres->require_subcommand(1);
  leaf(spheres, "contact", "oriented contact and tangential invariant of two sphere elements", cmd_spheres_contact);
  auto* group = app.add_subcommand("group", "Laguerre group elements");
  group->require_subcommand(1);
  leaf(group, "compose", "compose transform scripts", cmd_group_compose);
  leaf(group, "decompose", "factor an element into isometries, a hyperbolic and a parabolic transformation",
       cmd_group_decompose);
  auto* surface = app.add_subcommand("surface", "hypersurface invariants");
  surface->require_subcommand(1);
  leaf(surface, "analyze", "Laguerre invariants and structure-equation residuals", cmd_surface_analyze);
  leaf(surface, "minimality", "Euler-Lagrange residual and minimality verdict", cmd_surface_minimality);
  leaf(surface, "volume", "Laguerre volume of the patch", cmd_surface_volume);
  leaf(surface, "compare", "compare invariants of two patches", cmd_surface_compare);
  leaf(surface, "embed", "embed a space-form patch into Euclidean space and check the transfer", cmd_surface_embed);

  std::vector<const char*> argv;
  argv.push_back("laguerre");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return input_error;
  }

  auto log = detail::logger();
  try {
    json report = json::object();
    Checks checks;
    for (const auto& [cmd, fn] : leaves)
      if (cmd->parsed()) fn(cfg, report, checks);
    report["checks"] = checks.to_json();
    const std::string text = report.dump(2) + "\n";
    if (cfg.out)
      io::write_atomic(*cfg.out, text);
    else
      out << text;
    if (cfg.strict && !checks.failed().empty()) {
      for (const auto& f : checks.failed()) err << "check failed: " << f << "\n";
      return breach;
    }
    return ok;
  } catch (const InvalidElement& e) {
    err << "error: " << e.what() << "\n";
    return invalid_element;
  } catch (const DegenerateSurface& e) {
    err << "error: " << e.what() << "\n";
    return degenerate;
  } catch (const ToleranceBreach& e) {
    err << "error: " << e.what() << "\n";
    return breach;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  }
}

}  // namespace laguerre::cli
