#include <cmath>
#include <numbers>

#include <doctest.h>

#include "support.hpp"

using namespace testing;

TEST_CASE("axl of a given skew matrix") {
  Mat3 a;
  a << 0, 1, 2, -1, 0, 3, -2, -3, 0;
  CHECK(axl(a).isApprox(Vec3(-3, 2, -1)));
  CHECK(axl(Mat3::Zero()).isZero(0.0));
}

TEST_CASE("anti of (1,2,3)") {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK(anti<double>(Vec3(1, 2, 3)) == expected);
  CHECK(anti<double>(Vec3::Zero()).isZero(0.0));
}

TEST_CASE("axl and anti are inverse and match the cross product") {
  Random r(11);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = r.vec(), w = r.vec();
    const Mat3 a = anti<double>(v);
    CHECK(axl(a) == v);
    CHECK(anti<double>(axl(a)) == a);
    CHECK(rel(a.squaredNorm(), 2.0 * v.squaredNorm()) <= 1e-12);
    CHECK(rel(a * w, v.cross(w)) <= 1e-14);
    CHECK((a * v).norm() <= 1e-14 * v.squaredNorm());
  }
}

TEST_CASE("axl rejects non-skew input") {
  Mat3 a = anti<double>(Vec3(1, 2, 3));
  a(0, 1) += 1e-6;
  CHECK_THROWS_AS(axl(a), std::invalid_argument);
}

TEST_CASE("decomposition") {
  const Decomposition id = decompose(Mat3::Identity());
  CHECK(id.dev_sym.isZero(1e-15));
  CHECK(id.skew.isZero(0.0));
  CHECK(id.trace == doctest::Approx(3.0));

  const Mat3 a = anti<double>(Vec3(0.3, -1.0, 2.0));
  const Decomposition da = decompose(a);
  CHECK(da.dev_sym.isZero(1e-15));
  CHECK(da.skew == a);
  CHECK(da.trace == 0.0);

  Random r(3);
  for (int k = 0; k < 1000; ++k) {
    const Mat3 x = r.mat();
    const Decomposition d = decompose(x);
    const double parts = d.dev_sym.squaredNorm() + d.skew.squaredNorm() + d.trace * d.trace / 3.0;
    CHECK(rel(x.squaredNorm(), parts) <= 1e-12);
    CHECK(std::abs(d.dev_sym.trace()) <= 1e-14 * x.norm());
    CHECK((d.dev_sym - d.dev_sym.transpose()).norm() == 0.0);
    CHECK(std::abs(frobenius_dot(d.dev_sym, d.skew)) <= 1e-14 * x.squaredNorm());
  }
}

TEST_CASE("P operator") {
  const double mu = 2.0, mc = 0.5, ka = 3.0;
  CHECK(rel(p_operator(Mat3::Identity(), mu, mc, ka), Mat3(std::sqrt(ka) * Mat3::Identity())) <= 1e-15);
  const Mat3 a = anti<double>(Vec3(1, -2, 0.5));
  CHECK(rel(p_operator(a, mu, mc, ka), Mat3(std::sqrt(mc) * a)) <= 1e-15);

  Random r(5);
  for (int k = 0; k < 200; ++k) {
    const Mat3 x = r.mat(), y = r.mat();
    const Decomposition d = decompose(x);
    const Mat3 px = p_operator(x, mu, mc, ka);
    // norm identity computed directly from the parts
    const double weighted = mu * d.dev_sym.squaredNorm() + mc * d.skew.squaredNorm() + ka / 3.0 * d.trace * d.trace;
    CHECK(rel(px.squaredNorm(), weighted) <= 1e-12);
    CHECK(rel(frobenius_dot(px, p_operator(y, mu, mc, ka)), frobenius_dot(p_squared(x, mu, mc, ka), y)) <= 1e-11);
    CHECK(rel(frobenius_dot(px, y), frobenius_dot(x, p_operator(y, mu, mc, ka))) <= 1e-11);
    CHECK(rel(p_operator(Mat3(x.transpose()), mu, mc, ka), Mat3(px.transpose())) <= 1e-15);
  }
  CHECK_THROWS_AS(p_operator(Mat3::Identity(), 0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(p_operator(Mat3::Identity(), 1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(p_squared(Mat3::Identity(), 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("P squared is P composed with itself") {
  const double mu = 1.3, mc = 0.2, ka = 4.1;
  CHECK(rel(p_squared(Mat3::Identity(), mu, mc, ka), Mat3(ka * Mat3::Identity())) <= 1e-15);
  Random r(8);
  for (int k = 0; k < 200; ++k) {
    const Mat3 x = r.mat();
    CHECK(rel(p_squared(x, mu, mc, ka), p_operator(p_operator(x, mu, mc, ka), mu, mc, ka)) <= 1e-13);
    CHECK(rel(p_squared(x, 2.5, 2.5, 2.5), Mat3(2.5 * x)) <= 1e-14);
  }
}

TEST_CASE("P squared with the square-root trace coefficient breaks composition") {
  // The alternative coefficient sqrt(kappa)/3 on the trace term.
  const double mu = 1.0, mc = 1.0, ka = 4.0;
  const Mat3 x = Mat3::Identity();
  const Decomposition d = decompose(x);
  const Mat3 alt = mu * d.dev_sym + mc * d.skew + std::sqrt(ka) / 3.0 * d.trace * Mat3::Identity();
  CHECK(rel(alt, p_operator(p_operator(x, mu, mc, ka), mu, mc, ka)) > 0.1);
}

TEST_CASE("exponential map") {
  CHECK(exp_so3(Vec3::Zero()).matrix() == Mat3::Identity());
  const Rotation q = exp_so3(Vec3(0, 0, std::numbers::pi / 2));
  CHECK((q * Vec3::UnitX() - Vec3::UnitY()).norm() <= 1e-15);
  CHECK((q * Vec3::UnitY() + Vec3::UnitX()).norm() <= 1e-15);

  Random r(13);
  for (int k = 0; k < 200; ++k) {
    const Vec3 v = r.uniform(0.0, 10.0) * r.vec().normalized();
    const Mat3 m = exp_so3(v).matrix();
    CHECK((m.transpose() * m - Mat3::Identity()).norm() <= 1e-12);
    CHECK(std::abs(m.determinant() - 1.0) <= 1e-12);
  }
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = r.uniform(0.0, std::numbers::pi - 1e-3) * r.vec().normalized();
    CHECK((log_so3(exp_so3(v)) - v).norm() <= 1e-10);
  }
}

TEST_CASE("exp_so3 agrees with a truncated power series") {
  Random r(17);
  for (int k = 0; k < 20; ++k) {
    const Vec3 v = r.uniform(0.0, 2.0) * r.vec().normalized();
    const Mat3 a = anti<double>(v);
    Mat3 term = Mat3::Identity(), series = Mat3::Identity();
    for (int n = 1; n < 40; ++n) {
      term = term * a / static_cast<double>(n);
      series += term;
    }
    CHECK(rel(exp_so3(v).matrix(), series) <= 1e-13);
    CHECK((expm1_so3(v) - (series - Mat3::Identity())).norm() <= 1e-14 * std::max(1.0, v.norm()));
  }
  const Vec3 tiny(1e-12, -2e-12, 3e-12);
  CHECK(rel(expm1_so3(tiny), anti<double>(tiny)) <= 1e-10);
}

TEST_CASE("logarithm") {
  CHECK(log_so3(Rotation::identity()).isZero(0.0));
  Random r(19);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = 1e-3 * r.vec();
    CHECK((log_so3(exp_so3(v)) - v).norm() <= 1e-15);
    const Rotation q = r.rotation();
    CHECK((exp_so3(log_so3(q)).matrix() - q.matrix()).norm() <= 1e-10);
  }
  CHECK_THROWS_AS(log_so3(exp_so3(Vec3(0, std::numbers::pi, 0))), IllConditionedError);
}

TEST_CASE("rotation construction checks orthogonality") {
  Mat3 m = Mat3::Identity();
  m(0, 0) = 1.0 + 1e-9;
  CHECK_THROWS_AS(Rotation{m}, std::invalid_argument);
  CHECK_THROWS_AS(Rotation{Mat3(-Mat3::Identity())}, std::invalid_argument);
  const Rotation q = Rotation::about_axis(Vec3(1, 1, 0).normalized(), 0.7);
  CHECK(rel(q.matrix(), exp_so3(0.7 * Vec3(1, 1, 0).normalized()).matrix()) <= 1e-15);
  CHECK(((q * q.transpose()).matrix() - Mat3::Identity()).norm() <= 1e-15);
}

TEST_CASE("polar projection") {
  Random r(23);
  for (int k = 0; k < 50; ++k) {
    const Rotation q = r.rotation();
    CHECK(rel(polar_project(q.matrix()).matrix(), q.matrix()) <= 1e-14);
  }
  CHECK(rel(polar_project(2.0 * Mat3::Identity()).matrix(), Mat3::Identity()) <= 1e-15);

  for (int k = 0; k < 50; ++k) {
    const Rotation q = r.rotation();
    const Mat3 b = r.mat();
    const Mat3 spd = b * b.transpose() + 0.1 * Mat3::Identity();
    CHECK(rel(polar_project(q.matrix() * spd).matrix(), q.matrix()) <= 1e-12);
  }

  // The polar factor maximizes <R, X> over rotations.
  const Mat3 x = r.mat() + 3.0 * Mat3::Identity();
  if (x.determinant() > 0.0) {
    const double best = frobenius_dot(polar_project(x).matrix(), x);
    int beaten = 0;
    for (int k = 0; k < 1000; ++k) beaten += frobenius_dot(r.rotation().matrix(), x) > best + 1e-12;
    CHECK(beaten == 0);
  }

  CHECK_THROWS_AS(polar_project(Mat3::Zero()), std::invalid_argument);
  CHECK_THROWS_AS(polar_project(Mat3(-Mat3::Identity())), std::invalid_argument);
  Mat3 singular = Mat3::Identity();
  singular(2, 2) = 0.0;
  CHECK_THROWS_AS(polar_project(singular), std::invalid_argument);
}
