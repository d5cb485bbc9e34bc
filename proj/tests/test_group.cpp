#include <gtest/gtest.h>

#include <random>

#include "laguerre/group.hpp"

using namespace laguerre;

namespace {

Vector v3(double a, double b, double c) { return Vector{{a, b, c}}; }

double maxabs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Vector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v.normalized();
}

Vector random_point(int n, std::mt19937_64& rng, double s = 2.0) {
  std::uniform_real_distribution<double> U(-s, s);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = U(rng);
  return v;
}

}  // namespace

TEST(Group, GeneratorExamples) {
  EXPECT_EQ(maxabs(parabolic(3, 0.0).matrix() - Matrix::Identity(6, 6)), 0.0);
  const auto iso = isometry(Matrix::Identity(3, 3), v3(1, 0, 0));
  const Vector row0 = iso.matrix().row(0).transpose();
  const Vector expect{{1.5, -0.5, 1, 0, 0, 0}};
  EXPECT_EQ(maxabs(row0 - expect), 0.0);
  EXPECT_THROW(isometry(2.0 * Matrix::Identity(3, 3), v3(0, 0, 0)), UsageError);
}

TEST(Group, FlowLaws) {
  for (double s : {-0.8, 0.1, 1.3})
    for (double t : {-1.1, 0.4, 2.0}) {
      EXPECT_LE(maxabs(parabolic(3, s).matrix() * parabolic(3, t).matrix() - parabolic(3, s + t).matrix()), 1e-12);
      EXPECT_LE(maxabs(hyperbolic(4, s).matrix() * hyperbolic(4, t).matrix() - hyperbolic(4, s + t).matrix()),
                1e-12 * std::cosh(s + t));
    }
}

TEST(Group, GeneratorsFixWp) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const auto A = random_orthogonal(3, rng);
    for (const auto& T : {isometry(A, random_point(3, rng)), parabolic(3, 1.7), hyperbolic(3, -0.9)}) {
      const Vector fixed = (wp(3).transpose() * T.matrix()).transpose() - wp(3);
      EXPECT_LE(fixed.cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Group, FromBlocksExamples) {
  BlockData b{Matrix::Identity(3, 3), Vector::Zero(3), Vector::Zero(3), 1.0, Vector::Zero(3), 0.0};
  EXPECT_EQ(maxabs(from_blocks(b).matrix() - Matrix::Identity(6, 6)), 0.0);
  const double t = 0.75;
  b.rho = -t;
  EXPECT_LE(maxabs(from_blocks(b).matrix() - parabolic(3, t).matrix()), 1e-15);

  BlockData h{Matrix::Identity(3, 3), Vector::Zero(3), Vector::Zero(3), std::cosh(t), Vector::Zero(3), 0.0};
  h.A(2, 2) = std::cosh(t);
  h.u(2) = std::sinh(t);
  h.v(2) = std::sinh(t);
  EXPECT_LE(maxabs(from_blocks(h).matrix() - hyperbolic(3, t).matrix()), 1e-15);

  BlockData bad = b;
  bad.w = 2.0;
  EXPECT_THROW(from_blocks(bad), UsageError);
}

TEST(Group, ToBlocksExamples) {
  const auto id = to_blocks(LaguerreTransform::identity(3));
  EXPECT_EQ(maxabs(id.A - Matrix::Identity(3, 3)), 0.0);
  EXPECT_EQ(id.w, 1.0);
  EXPECT_EQ(id.rho, 0.0);
  const auto p = to_blocks(parabolic(3, 0.4));
  EXPECT_DOUBLE_EQ(p.rho, -0.4);
  EXPECT_EQ(p.a.norm(), 0.0);
  EXPECT_EQ(maxabs(p.lorentz_block() - Matrix::Identity(4, 4)), 0.0);
}

TEST(Group, BlocksRoundTripAndAffineIsomorphism) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 1000; ++k) {
    const int n = 3 + k % 2;
    const auto S = random_laguerre_transform(n, rng);
    const auto T = random_laguerre_transform(n, rng);
    const auto bS = to_blocks(S);
    EXPECT_LE(maxabs(from_blocks(bS).matrix() - S.matrix()), 1e-10 * maxabs(S.matrix()));
    // Homomorphism onto the affine Lorentz group of R^{n+1}_1.
    const Matrix lhs = to_blocks(S * T).affine_matrix();
    const Matrix rhs = bS.affine_matrix() * to_blocks(T).affine_matrix();
    EXPECT_LE(maxabs(lhs - rhs), 1e-9 * maxabs(lhs));
  }
}

TEST(Group, ToBlocksRejectsNonMembers) {
  Matrix m = Matrix::Identity(6, 6);
  m(0, 3) = 1.0;
  EXPECT_THROW(to_blocks(LaguerreTransform(m)), InvalidElement);
}

TEST(Group, ActOnCoordExamples) {
  const Sphere s(v3(1, -2, 0.5), 1.5);
  EXPECT_TRUE(act_on_coord(LaguerreTransform::identity(3), sphere_coord(s)).proportional_to(sphere_coord(s)));
  const double t = 0.6;
  const auto img = classify_coord(act_on_coord(parabolic(3, t), sphere_coord(s)));
  ASSERT_TRUE(std::holds_alternative<Sphere>(img));
  // The parallel transformation shifts the signed radius by +t.
  EXPECT_NEAR(std::get<Sphere>(img).radius(), 1.5 + t, 1e-14);
  EXPECT_LE((std::get<Sphere>(img).center() - s.center()).norm(), 1e-14);

  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const auto T = random_laguerre_transform(3, rng);
    const auto g = act_on_coord(T, sphere_coord(Plane(random_unit(3, rng), 0.3)));
    EXPECT_LE(std::abs(inner(g.representative(), wp(3))), 1e-12);
  }
}

TEST(Group, ActOnContactExamples) {
  const ContactElement c(v3(0.3, -1.0, 2.0), v3(0, 0.6, 0.8));
  const auto p = act_on_contact(parabolic(3, 0.9), c);
  EXPECT_LE((p.x() - (c.x() + 0.9 * c.xi())).norm(), 1e-13);
  EXPECT_LE((p.xi() - c.xi()).norm(), 1e-14);

  const ContactElement up(v3(0.3, -1.0, 2.0), v3(0, 0, 1));
  const double t = 0.7;
  const auto h = act_on_contact(hyperbolic(3, t), up);
  EXPECT_LE((h.x() - v3(0.3, -1.0, 2.0 * std::exp(-t))).norm(), 1e-13);
  EXPECT_LE((h.xi() - up.xi()).norm(), 1e-14);
}

TEST(Group, ActOnContactMatchesClosedForms) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const int n = 3 + k % 3;
    const ContactElement c(random_point(n, rng), random_unit(n, rng));
    const double t = U(rng);
    const Matrix A = random_orthogonal(n, rng);
    const Vector a = random_point(n, rng);
    auto diff = [&](const ContactElement& m, const ContactElement& f) {
      return std::max((m.x() - f.x()).cwiseAbs().maxCoeff(), (m.xi() - f.xi()).cwiseAbs().maxCoeff());
    };
    worst = std::max(worst, diff(act_on_contact(parabolic(n, t), c), parabolic_flow(c, t)));
    worst = std::max(worst, diff(act_on_contact(hyperbolic(n, t), c), hyperbolic_flow(c, t)));
    worst = std::max(worst, diff(act_on_contact(isometry(A, a), c), isometry_flow(c, A, a)));
    // Coordinate form (used on jets) agrees with the re-extraction route.
    const auto T = random_laguerre_transform(n, rng);
    std::vector<double> x(c.x().data(), c.x().data() + n), xi(c.xi().data(), c.xi().data() + n), xo, xio;
    act_on_contact_coords(T.matrix(), x, xi, xo, xio);
    const auto m = act_on_contact(T, c);
    for (int i = 0; i < n; ++i)
      worst = std::max({worst, std::abs(xo[i] - m.x()(i)) / (1 + std::abs(m.x()(i))), std::abs(xio[i] - m.xi()(i))});
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Group, TangentialInvariantPreserved) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int k = 0; k < 10000; ++k) {
    const auto T = random_laguerre_transform(3, rng);
    const Sphere a(random_point(3, rng, 3.0), U(rng)), b(random_point(3, rng, 3.0), U(rng));
    const auto ta = classify_coord(act_on_coord(T, sphere_coord(a)));
    const auto tb = classify_coord(act_on_coord(T, sphere_coord(b)));
    const double F = tangential_invariant(a, b);
    const double Ft = tangential_invariant(std::get<Sphere>(ta), std::get<Sphere>(tb));
    EXPECT_NEAR(F, Ft, 1e-10 * std::max(1.0, std::abs(F)));
    EXPECT_EQ(oriented_contact(a, b), oriented_contact(std::get<Sphere>(ta), std::get<Sphere>(tb)));
  }
}

TEST(Group, DecomposeExamples) {
  const auto f = decompose(Matrix::Identity(6, 6));
  EXPECT_EQ(f.epsilon, 1);
  EXPECT_EQ(f.t, 0.0);
  EXPECT_EQ(f.s, 0.0);
  EXPECT_LE(maxabs(f.sigma1.A - Matrix::Identity(3, 3)), 1e-15);
  EXPECT_LE(maxabs(f.sigma2.A - Matrix::Identity(3, 3)), 1e-15);
  EXPECT_LE(f.sigma2.a.norm(), 1e-15);

  const auto h = decompose(hyperbolic(3, 0.7).matrix());
  EXPECT_NEAR(h.t, 0.7, 1e-14);
  EXPECT_NEAR(h.s, 0.0, 1e-14);
  EXPECT_LE(maxabs(h.reconstruct() - hyperbolic(3, 0.7).matrix()), 1e-12);

  // -T: projectively the same transformation, epsilon = -1.
  const Matrix m = -parabolic(3, 0.5).matrix();
  const auto e = decompose(m);
  EXPECT_EQ(e.epsilon, -1);
  EXPECT_LE(maxabs(e.reconstruct() - m), 1e-12);

  Matrix reversal = Matrix::Identity(6, 6);
  reversal(5, 5) = -1.0;
  EXPECT_THROW(decompose(reversal), InvalidElement);
  Matrix junk = Matrix::Identity(6, 6);
  junk(2, 3) = 0.5;
  EXPECT_THROW(decompose(junk), InvalidElement);
}

TEST(Group, DecomposeReconstructsRandomElements) {
  std::mt19937_64 rng(1234);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 3 + k % 3;
    const auto T = random_laguerre_transform(n, rng) * random_laguerre_transform(n, rng);
    const auto f = decompose(T.matrix());
    EXPECT_GE(f.t, 0.0);
    worst = std::max(worst, maxabs(f.reconstruct() - T.matrix()) / std::max(1.0, maxabs(T.matrix())));
  }
  EXPECT_LT(worst, 1e-10);
}
