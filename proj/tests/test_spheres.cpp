#include <gtest/gtest.h>

#include <random>

#include "laguerre/spheres.hpp"

using namespace laguerre;

namespace {

Vector v3(double a, double b, double c) { return Vector{{a, b, c}}; }

LorentzVector vec(std::initializer_list<double> v) {
  LorentzVector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

void expect_vec_near(const Vector& a, const Vector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << a.transpose() << " vs " << b.transpose();
}

Vector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v.normalized();
}

Vector random_point(int n, std::mt19937_64& rng, double s = 3.0) {
  std::uniform_real_distribution<double> U(-s, s);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

}  // namespace

TEST(Spheres, SphereCoordExamples) {
  expect_vec_near(sphere_vector(Sphere(Vector::Zero(3), 1.0)), vec({0, 1, 0, 0, 0, -1}), 0);
  expect_vec_near(sphere_vector(Plane(v3(0, 0, 1), 0.0)), vec({0, 0, 0, 0, 1, 1}), 0);
  expect_vec_near(sphere_vector(Sphere(Vector::Zero(3), 0.0)), vec({0.5, 0.5, 0, 0, 0, 0}), 0);
  EXPECT_TRUE(sphere_coord(Sphere(Vector::Zero(3), 0.0))
                  .proportional_to(ProjectivePoint(vec({0.5, 0.5, 0, 0, 0, 0}))));
}

TEST(Spheres, ProjectiveNormalization) {
  const ProjectivePoint p(vec({-2, 2, 0, 0, 0, 0}));
  expect_vec_near(p.representative(), vec({1, -1, 0, 0, 0, 0}), 0);
  EXPECT_THROW(ProjectivePoint(vec({1, 0, 0, 0, 0, 0})), InvalidCoordinate);
  EXPECT_THROW(ProjectivePoint(LorentzVector::Zero(6)), InvalidCoordinate);
}

TEST(Spheres, PlaneRejectsNonUnitNormal) {
  EXPECT_THROW(Plane(v3(0, 0, 2), 1.0), UsageError);
  EXPECT_THROW(ContactElement(v3(0, 0, 0), v3(0, 1, 1)), UsageError);
}

TEST(Spheres, ClassifyExamples) {
  const auto a = classify_coord(ProjectivePoint(vec({0, 1, 0, 0, 0, -1})));
  ASSERT_TRUE(std::holds_alternative<Sphere>(a));
  expect_vec_near(std::get<Sphere>(a).center(), Vector::Zero(3), 1e-15);
  EXPECT_DOUBLE_EQ(std::get<Sphere>(a).radius(), 1.0);

  EXPECT_TRUE(std::holds_alternative<PointAtInfinity>(classify_coord(ProjectivePoint(wp(3)))));

  const auto c = classify_coord(ProjectivePoint(vec({0, 0, 0, 0, 1, 1})));
  ASSERT_TRUE(std::holds_alternative<Plane>(c));
  expect_vec_near(std::get<Plane>(c).normal(), v3(0, 0, 1), 1e-15);
  EXPECT_DOUBLE_EQ(std::get<Plane>(c).offset(), 0.0);

  EXPECT_THROW(classify_coord(ProjectivePoint(vec({1, 0, 0, 0, 0, 1}), 1e-9)), InvalidCoordinate);
}

TEST(Spheres, OrientedContactExamples) {
  const Sphere unit(Vector::Zero(3), 1.0);
  EXPECT_TRUE(oriented_contact(unit, Plane(v3(0, 0, 1), 1.0)));
  EXPECT_TRUE(oriented_contact(unit, Sphere(v3(3, 0, 0), -2.0)));
  EXPECT_FALSE(oriented_contact(unit, Sphere(Vector::Zero(3), 2.0)));
  // Same sphere, opposite orientation: not in contact.
  EXPECT_FALSE(oriented_contact(unit, Sphere(Vector::Zero(3), -1.0)));
}

TEST(Spheres, TangentialInvariantExamples) {
  const Sphere unit(Vector::Zero(3), 1.0);
  EXPECT_DOUBLE_EQ(tangential_invariant(unit, Sphere(v3(3, 0, 0), 1.0)), 9.0);
  EXPECT_DOUBLE_EQ(tangential_invariant(unit, unit), 0.0);
  EXPECT_DOUBLE_EQ(tangential_invariant(unit, Sphere(v3(3, 0, 0), -2.0)), 0.0);
  EXPECT_THROW(tangential_invariant(unit, Plane(v3(0, 0, 1), 0.0)), UsageError);
}

TEST(Spheres, LieLineExamples) {
  const ContactElement c(Vector::Zero(3), v3(0, 0, 1));
  const auto [g1, g2] = lie_pair(c);
  expect_vec_near(g1, vec({0.5, 0.5, 0, 0, 0, 0}), 0);
  expect_vec_near(g2, vec({0, 0, 0, 0, 1, 1}), 0);
  EXPECT_EQ(inner(g1, g2), 0.0);
  // Pencil member gamma1 - r gamma2 is the sphere through x=0 with normal xi.
  for (double r : {-2.0, 0.5, 3.0}) {
    const LorentzVector m = g1 - r * g2;
    expect_vec_near(m, sphere_vector(Sphere(-r * v3(0, 0, 1), r)), 1e-15);
  }
  const auto back = contact_from_line(lie_line(c));
  expect_vec_near(back.x(), c.x(), 1e-15);
  expect_vec_near(back.xi(), c.xi(), 1e-15);
}

TEST(Spheres, ContactFromLineReadsNormalFromPlane) {
  const double lam = 0.7;
  const Vector xi = v3(0.6, 0.0, 0.8);
  const Vector x = lam * xi;  // a point on the plane
  const LieLine l(ProjectivePoint(lie_pair(ContactElement(x, xi)).first),
                  ProjectivePoint(sphere_vector(Plane(xi, lam))));
  const auto c = contact_from_line(l);
  expect_vec_near(c.xi(), xi, 1e-14);
  expect_vec_near(c.x(), x, 1e-14);
}

TEST(Spheres, LieLineRejectsDegenerateInput) {
  const ProjectivePoint ps(vec({0.5, 0.5, 0, 0, 0, 0}));
  // Not orthogonal members.
  EXPECT_THROW(LieLine(ps, ProjectivePoint(vec({1, -1, 0, 0, 1, 1}))), InvalidLine);
  // Plane member used twice.
  const ProjectivePoint pl(vec({0, 0, 0, 0, 1, 1}));
  EXPECT_THROW(LieLine(pl, pl), InvalidLine);
}

TEST(Spheres, LieLineRoundTripProperty) {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const int n = 3 + k % 3;
    const ContactElement c(random_point(n, rng), random_unit(n, rng));
    const auto l = lie_line(c);
    EXPECT_LE(std::abs(inner(l.gamma1().representative(), l.gamma2().representative())), 1e-12);
    const auto b = contact_from_line(l);
    worst = std::max({worst, (b.x() - c.x()).cwiseAbs().maxCoeff(), (b.xi() - c.xi()).cwiseAbs().maxCoeff()});
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Spheres, CoordinatesAreLightlikeAndClassifyRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  for (int k = 0; k < 10000; ++k) {
    const int n = 3 + k % 3;
    if (k % 2 == 0) {
      const Sphere s(random_point(n, rng), U(rng));
      const LorentzVector g = sphere_vector(s);
      EXPECT_LT(std::abs(inner(g, g)), 1e-12 * g.squaredNorm());
      EXPECT_NE(inner(g, wp(n)), 0.0);
      const auto c = classify_coord(sphere_coord(s));
      ASSERT_TRUE(std::holds_alternative<Sphere>(c));
      const auto& b = std::get<Sphere>(c);
      const double scale = std::max(1.0, s.center().cwiseAbs().maxCoeff());
      EXPECT_LT((b.center() - s.center()).cwiseAbs().maxCoeff(), 1e-10 * scale);
      EXPECT_LT(std::abs(b.radius() - s.radius()), 1e-10 * std::max(1.0, std::abs(s.radius())));
    } else {
      const Plane p(random_unit(n, rng), U(rng));
      const LorentzVector g = sphere_vector(p);
      EXPECT_LT(std::abs(inner(g, g)), 1e-12 * g.squaredNorm());
      EXPECT_EQ(inner(g, wp(n)), 0.0);
      const auto c = classify_coord(sphere_coord(p));
      ASSERT_TRUE(std::holds_alternative<Plane>(c));
      EXPECT_LT((std::get<Plane>(c).normal() - p.normal()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT(std::abs(std::get<Plane>(c).offset() - p.offset()), 1e-10 * std::max(1.0, std::abs(p.offset())));
    }
  }
}

TEST(Spheres, ContactIffTangentialInvariantVanishes) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  std::bernoulli_distribution coin(0.5);
  int contacts = 0;
  for (int k = 0; k < 10000; ++k) {
    const int n = 3;
    const Sphere a(random_point(n, rng), U(rng));
    Vector pb;
    double rb;
    if (coin(rng)) {
      // Build b in oriented contact with a: |pb - pa| = |rb - ra|.
      rb = U(rng);
      pb = a.center() + std::abs(rb - a.radius()) * random_unit(n, rng);
    } else {
      pb = random_point(n, rng);
      rb = U(rng);
    }
    const Sphere b(pb, rb);
    const double F = tangential_invariant(a, b);
    // Matched tolerance: oriented_contact works on max-normalized vectors and
    // <g_a, g_b> = -F/2 for raw coordinates.
    const double ma = sphere_vector(a).cwiseAbs().maxCoeff(), mb = sphere_vector(b).cwiseAbs().maxCoeff();
    const double tol = 1e-9;
    const bool zero_F = std::abs(F) <= 2.0 * tol * ma * mb;
    EXPECT_EQ(oriented_contact(a, b, tol), zero_F) << "F=" << F;
    contacts += zero_F;
  }
  EXPECT_GT(contacts, 4000);
}
