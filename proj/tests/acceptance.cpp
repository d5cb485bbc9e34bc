// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace laguerre;

namespace {

const double R = 2.0, a = 1.0;

/// A measured quantity and the bound it must stay under.
struct Measure {
  std::string what;
  double value;
  double limit;
  bool ok() const { return value < limit; }
};

struct Outcome {
  std::vector<Measure> measures;
  std::vector<std::pair<std::string, bool>> flags;
  bool ok() const {
    for (const auto& m : measures)
      if (!m.ok()) return false;
    for (const auto& f : flags)
      if (!f.second) return false;
    return true;
  }
};

double maxabs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Outcome torus_spectrum() {
  const auto p = build_patch(builtin::torus(R, a), oracle::torus_grid(64));
  const auto s = shape_data(p);
  double worst = 0.0;
  for (auto i : p.grid.nodes(s.region)) {
    const Vector e = sorted(laguerre_shape_eigenvalues(s.at[i]));
    worst = std::max(worst, (e - Vector{{-M_SQRT1_2, M_SQRT1_2}}).cwiseAbs().maxCoeff());
  }
  return {{{"max |eig - (-1/sqrt2, 1/sqrt2)|", worst, 1e-6}}, {{"analytic jets", p.analytic}}};
}

Outcome torus_volume() {
  const auto p = build_patch(builtin::torus(R, a), oracle::torus_grid(64));
  const auto v = laguerre_volume(p, shape_data(p));
  const double want = oracle::torus_volume(R, oracle::pi / 3);
  std::printf("    volume %.7f, closed form 2 pi R^2 ln(2 + sqrt 3) = %.7f\n", v.volume, want);
  return {{{"relative error vs closed form", std::abs(v.volume - want) / want, 1e-4},
           {"relative error vs 33.1003", std::abs(v.volume - 33.1003) / 33.1003, 1e-4},
           {"curvature-form path", std::abs(v.volume - v.curvature_form) / v.volume, 1e-6}},
          {}};
}

Outcome flat_metric(const Analysis& A) {
  return {{{"max |K| of g", max_abs(A.grid, gauss_curvature(A)), 1e-5},
           {"tr L vs <Lap Y, Lap Y>", A.residual("trace_L"), 1e-4}},
          {}};
}

Outcome residual_suite(const Analysis& A) {
  Outcome o;
  double worst_res = 0.0;
  for (const auto& [name, f] : A.residuals) {
    o.measures.push_back({name, max_abs(A.grid, f), 1e-4});
    worst_res = std::max(worst_res, o.measures.back().value);
  }
  std::printf("    %zu residuals, largest %.3e\n", A.residuals.size(), worst_res);
  const Grid g = oracle::torus_grid(64), f = g.refined();
  const auto Af = analyze(build_patch(builtin::torus(R, a), f));
  double worst_ratio = 1e300;
  std::string worst_name;
  int limited = 0;
  for (const auto& [name, fc] : A.residuals) {
    const auto [mc, mf] = oracle::coarse_node_max(g, f, fc, Af.residuals.at(name));
    if (mc < 1e-9) continue;  // round-off level, not limited by the scheme
    ++limited;
    if (mc / mf < worst_ratio) {
      worst_ratio = mc / mf;
      worst_name = name;
    }
  }
  std::printf("    %d FD-limited residuals, slowest (%s) shrinks %.1fx on halving the step\n", limited,
              worst_name.c_str(), worst_ratio);
  o.measures.push_back({"1 / worst refinement ratio", 1.0 / worst_ratio, 1.0 / 8.0});
  o.flags.push_back({"some residuals FD-limited", limited > 0});
  return o;
}

Outcome invariance(const Analysis& A) {
  std::mt19937_64 rng(2024);
  double gm = 0.0, sm = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto T = random_laguerre_transform(3, rng);
    const auto B = analyze(build_patch(transformed(builtin::torus(R, a), T), A.grid));
    const auto c = compare_invariants(A, B);
    gm = std::max(gm, c.metric);
    sm = std::max(sm, c.shape_operator);
  }
  std::uniform_real_distribution<double> U(-3, 3);
  double fw = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto T = random_laguerre_transform(3, rng);
    const Sphere s1(oracle::random_point(3, rng), U(rng)), s2(oracle::random_point(3, rng), U(rng));
    const SphereElement i1 = std::get<Sphere>(classify_coord(act_on_coord(T, sphere_coord(s1))));
    const SphereElement i2 = std::get<Sphere>(classify_coord(act_on_coord(T, sphere_coord(s2))));
    const double F = tangential_invariant(s1, s2), Ft = tangential_invariant(i1, i2);
    fw = std::max(fw, std::abs(F - Ft) / std::max(1.0, std::abs(F)));
  }
  return {{{"metric deviation, 20 transforms", gm, 1e-6},
           {"shape spectrum deviation", sm, 1e-6},
           {"tangential invariant, 1e4 pairs", fw, 1e-10}},
          {}};
}

Outcome factorization() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(-2, 2);
  double rec = 0.0, flow = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 3 + k % 3;
    const auto T = random_laguerre_transform(n, rng) * random_laguerre_transform(n, rng);
    const auto f = decompose(T.matrix());
    rec = std::max(rec, maxabs(f.reconstruct() - T.matrix()) / std::max(1.0, maxabs(T.matrix())));
    const double s = U(rng), t = U(rng);
    flow = std::max({flow, maxabs((parabolic(n, s) * parabolic(n, t)).matrix() - parabolic(n, s + t).matrix()),
                     maxabs((hyperbolic(n, s) * hyperbolic(n, t)).matrix() - hyperbolic(n, s + t).matrix()) /
                         std::max(1.0, maxabs(hyperbolic(n, s + t).matrix()))});
  }
  return {{{"reconstruction error, 1e3 elements", rec, 1e-10}, {"flow laws", flow, 1e-12}}, {}};
}

Outcome minimality_transfer(const Analysis& torus) {
  const auto def = builtin::maximal_catenoid_r31();
  const Grid g = oracle::catenoid_grid(64);
  double H = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    H = std::max(H, std::abs(oracle::lorentz_mean_curvature(def, c[0], c[1])));
  }
  const auto cat = minimality_report(analyze(build_patch(embedded(def), g)));
  const Grid g65 = oracle::torus_grid(65);
  const auto T65 = analyze(build_patch(builtin::torus(R, a), g65));
  const double mid = T65.lap_III_r.at[g65.flat_index({32, 0})];
  const auto tor = minimality_report(torus);
  std::printf("    torus Laplacian of r at u = 0: %.8f\n", mid);
  return {{{"catenoid |H| (independent oracle)", H, 1e-12},
           {"sigma(catenoid) max |Lap_III r|", cat.max_laplacian_r, 1e-6},
           {"sigma(catenoid) max |EL|", cat.max_el_reduced, 1e-4},
           {"torus |Lap_III r(u=0) + 1|", std::abs(mid + 1.0), 1e-4}},
          {{"sigma(catenoid) verdict minimal", cat.minimal}, {"torus verdict non-minimal", !tor.minimal}}};
}

Outcome crosscheck(const Analysis& A) {
  const auto r = minimality_report(A);
  return {{{"relative deviation of Lap_III r from rho^3 sum(-C_i,i + L B)", r.crosscheck_relative, 1e-3}}, {}};
}

Outcome probes(const Analysis& torus) {
  Outcome o;
  auto check = [&](const std::string& label, const Analysis& A) {
    const LorentzVector c = radius_probe(A.space, A.n);
    double wy = 0.0, we = 0.0;
    for (auto i : A.grid.nodes(A.shape.region)) {
      wy = std::max(wy, std::abs(inner(A.Y.at[i], c) - A.shape.at[i].rho));
      we = std::max(we, std::abs(inner(A.eta.at[i], c) - A.shape.at[i].mean_r));
    }
    o.measures.push_back({label + " <Y,c> - rho", wy, 1e-10});
    o.measures.push_back({label + " <eta,c> - r", we, 1e-10});
  };
  check("r3 torus", torus);
  check("r31 catenoid", analyze(build_patch(builtin::maximal_catenoid_r31(), oracle::catenoid_grid(64))));
  check("r30 graph", analyze(build_patch(builtin::harmonic_graph_r30(),
                                         Grid({Axis{-0.5, 0.5, 48, false}, Axis{-0.7, 0.7, 48, false}}))));
  return o;
}

Outcome round_trip() {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> U(-4, 4);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const int n = 3 + k % 3;
    if (k % 2 == 0) {
      const Sphere s(oracle::random_point(n, rng), U(rng));
      const auto b = std::get<Sphere>(classify_coord(sphere_coord(s)));
      worst = std::max({worst, (b.center() - s.center()).cwiseAbs().maxCoeff() / std::max(1.0, s.center().cwiseAbs().maxCoeff()),
                        std::abs(b.radius() - s.radius()) / std::max(1.0, std::abs(s.radius()))});
    } else {
      const Plane p(oracle::random_unit(n, rng), U(rng));
      const auto b = std::get<Plane>(classify_coord(sphere_coord(p)));
      worst = std::max({worst, (b.normal() - p.normal()).cwiseAbs().maxCoeff(),
                        std::abs(b.offset() - p.offset()) / std::max(1.0, std::abs(p.offset()))});
    }
  }
  int mismatches = 0;
  std::bernoulli_distribution coin(0.5);
  for (int k = 0; k < 10000; ++k) {
    const Sphere s1(oracle::random_point(3, rng), U(rng));
    const double r2 = U(rng);
    const Sphere s2 = coin(rng) ? Sphere(s1.center() + std::abs(r2 - s1.radius()) * oracle::random_unit(3, rng), r2)
                                : Sphere(oracle::random_point(3, rng), r2);
    const double F = tangential_invariant(s1, s2);
    const double scale = maxabs(sphere_vector(s1)) * maxabs(sphere_vector(s2));
    mismatches += oriented_contact(s1, s2, 1e-9) != (std::abs(F) <= 2e-9 * scale);
  }
  const bool infinity = std::holds_alternative<PointAtInfinity>(classify_coord(ProjectivePoint(wp(3))));
  return {{{"round-trip error, 1e4 elements", worst, 1e-10}, {"contact vs F = 0 mismatches", double(mismatches), 0.5}},
          {{"[wp] is the point at infinity", infinity}}};
}

}  // namespace

int main() {
  const auto torus = analyze(build_patch(builtin::torus(R, a), oracle::torus_grid(64)));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"torus shape spectrum", torus_spectrum},
      {"Laguerre volume of the torus strip", torus_volume},
      {"flat Laguerre metric", [&] { return flat_metric(torus); }},
      {"structure-equation residuals and convergence", [&] { return residual_suite(torus); }},
      {"Laguerre invariance", [&] { return invariance(torus); }},
      {"factorization and flow laws", factorization},
      {"minimality transfer", [&] { return minimality_transfer(torus); }},
      {"Laplacian of r cross-check", [&] { return crosscheck(torus); }},
      {"radius probe in all space forms", [&] { return probes(torus); }},
      {"sphere coordinates round trip and contact", round_trip},
  };
  int failed = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    std::string error;
    try {
      o = fn();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = error.empty() && o.ok();
    failed += !ok;
    std::printf("%s  %2d  %s  (%.1f s)\n", ok ? "PASS" : "FAIL", k, name.c_str(), sec);
    if (!error.empty()) std::printf("    error: %s\n", error.c_str());
    for (const auto& m : o.measures)
      if (!m.ok() || o.measures.size() <= 6)
        std::printf("    %-4s %s = %.3e (limit %.0e)\n", m.ok() ? "ok" : "FAIL", m.what.c_str(), m.value, m.limit);
    for (const auto& [what, pass] : o.flags) std::printf("    %-4s %s\n", pass ? "ok" : "FAIL", what.c_str());
  }
  std::printf("%d of %zu criteria passed\n", k - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
