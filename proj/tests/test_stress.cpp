#include <cmath>

#include <doctest.h>

#include "cosserat/energy.hpp"
#include "cosserat/stress.hpp"
#include "support.hpp"

using namespace testing;

namespace {

Mat32 identity32() {
  Mat32 m = Mat32::Zero();
  m(0, 0) = m(1, 1) = 1.0;
  return m;
}

MaterialParams normalized(double mu_c_ratio) {
  MaterialParams p;
  p.variant = Variant::normalized_p;
  p.mu_c = mu_c_ratio * p.mu;
  return p;
}

double w_normalized(const Mat32& dm, const Rotation& r, const MaterialParams& p) {
  return normalized_p_density(dm, r, p.kappa_normalized(), p.mu, p.mu_c);
}

}  // namespace

TEST_CASE("circ product") {
  const Mat32 e = identity32();
  Mat3 half = Mat3::Zero();
  half(0, 0) = half(1, 1) = 0.5;
  CHECK(circ(e, e) == half);
  CHECK(circ(e, Mat32::Zero()).isZero(0.0));
  Random r(61);
  for (int k = 0; k < 100; ++k) {
    const Mat32 b = r.mat32(), c = r.mat32(), d = r.mat32();
    CHECK(rel(Mat3(circ(b, c).transpose()), circ(c, b)) <= 1e-15);
    CHECK(rel(circ(Mat32(2.0 * b + d), c), Mat3(2.0 * circ(b, c) + circ(d, c))) <= 1e-14);
  }
}

TEST_CASE("stress vanishes at the identity configuration") {
  const StressPair s = stress(identity32(), Rotation::identity(), normalized(1.0));
  CHECK(s.T.isZero(0.0));
  CHECK(s.S.isZero(0.0));
}

TEST_CASE("stress is the derivative of the normalized density") {
  Random r(67);
  for (const double ratio : {1.0, 0.3}) {
    const MaterialParams p = normalized(ratio);
    for (int k = 0; k < 50; ++k) {
      const Mat32 dm = r.mat32(), b = r.mat32();
      const Rotation q = r.rotation();
      const StressPair s = stress(dm, q, p);
      CHECK(rel(s.S, pi12(Mat3(q.matrix() * s.T))) == 0.0);
      // the density is quadratic in Dm, so the central difference is exact up to rounding
      const double h = 1e-3;
      const double fd = (w_normalized(Mat32(dm + h * b), q, p) - w_normalized(Mat32(dm - h * b), q, p)) / (2 * h);
      CHECK(std::abs(fd - frobenius_dot(s.S, b)) <= 1e-8 * std::max(1.0, std::abs(fd)) * p.mu);
      // L_R is the derivative of S in Dm
      CHECK(rel(legendre_operator(b, q, p), Mat32(stress(Mat32(dm + b), q, p).S - s.S)) <= 1e-10);
    }
  }
}

TEST_CASE("Biot stress is symmetric for vanishing couple modulus") {
  MaterialParams p = normalized(0.0);
  CHECK_NOTHROW(p.validate());
  Random r(71);
  for (int k = 0; k < 100; ++k) {
    const Mat3 t = stress(r.mat32(), r.rotation(), p).T;
    CHECK((t - t.transpose()).norm() <= 1e-12 * std::max(1.0, t.norm()));
  }
  p.mu_c = p.mu;
  const Mat3 t = stress(r.mat32(), r.rotation(), p).T;
  CHECK((t - t.transpose()).norm() > 1e-6 * t.norm());
}

TEST_CASE("coercivity of the Legendre operator") {
  Random r(73);
  for (int set = 0; set < 5; ++set) {
    MaterialParams p;
    p.variant = Variant::normalized_p;
    p.mu = r.uniform(0.5, 5.0);
    p.lambda = r.uniform(-0.4, 5.0) * p.mu;
    p.mu_c = r.uniform(0.1, 5.0);
    const double lam = std::min({p.mu, p.mu_c, p.kappa_normalized()});
    for (int k = 0; k < 2000; ++k) {
      const Mat32 xi = r.mat32();
      const Rotation q = r.rotation();
      CHECK(frobenius_dot(legendre_operator(xi, q, p), xi) > 2.0 * lam * xi.squaredNorm());
    }
  }
}

TEST_CASE("connection") {
  const Connection zero = connection(Rotation::identity(), Mat3::Zero(), Mat3::Zero());
  CHECK(zero.omega_x.isZero(0.0));
  CHECK(zero.omega_y.isZero(0.0));

  const Vec3 v(0.4, -1.2, 2.0);
  const Connection c = connection(Rotation::identity(), anti<double>(v), Mat3::Zero());
  CHECK(c.omega_x == anti<double>(v));

  Random r(79);
  for (int k = 0; k < 100; ++k) {
    const Rotation q = r.rotation();
    const Mat3 dx = q.matrix() * anti<double>(r.vec()), dy = q.matrix() * anti<double>(r.vec());
    const Connection cc = connection(q, dx, dy);
    CHECK((cc.omega_x + cc.omega_x.transpose()).norm() <= 1e-12 * cc.omega_x.norm());
    CHECK(rel(Mat3(q.matrix().transpose() * cc.omega_x * q.matrix()), Mat3(q.matrix().transpose() * dx)) <= 1e-12);
    CHECK(rel(Mat3(q.matrix().transpose() * cc.omega_y * q.matrix()), Mat3(q.matrix().transpose() * dy)) <= 1e-12);
  }
  CHECK_THROWS_AS(connection(Rotation::identity(), Mat3::Identity(), Mat3::Zero()), std::invalid_argument);
}

TEST_CASE("wryness") {
  CHECK(wryness(Rotation::identity(), Mat3::Zero(), Mat3::Zero()).gamma_hat.isZero(0.0));
  const double omega = 0.8;
  const Rotation q = exp_so3(Vec3(0, 0, omega * 0.7));
  const Mat32 g = wryness(q, Mat3(q.matrix() * anti<double>(Vec3(0, 0, omega))), Mat3::Zero()).gamma_hat;
  Mat32 expect = Mat32::Zero();
  expect(2, 0) = omega;
  CHECK(rel(g, expect) <= 1e-15);

  Random r(83);
  for (int k = 0; k < 100; ++k) {
    const Rotation s = r.rotation();
    const Vec3 a = r.vec(), b = r.vec();
    const Mat3 dx = s.matrix() * anti<double>(a), dy = s.matrix() * anti<double>(b);
    const Mat32 gh = wryness(s, dx, dy).gamma_hat;
    CHECK(rel(Vec3(gh.col(0)), a) <= 1e-12);
    CHECK(rel(Vec3(gh.col(1)), b) <= 1e-12);
    CHECK(rel(dx.squaredNorm() + dy.squaredNorm(), 2.0 * gh.squaredNorm()) <= 1e-12);
  }
  CHECK_THROWS_AS(wryness(Rotation::identity(), Mat3::Zero(), Mat3::Identity()), std::invalid_argument);
}

TEST_CASE("Gamma and alpha") {
  CHECK(rel(gamma_to_alpha(Mat3::Identity()), Mat3(2.0 * Mat3::Identity())) == 0.0);
  Random r(89);
  for (int k = 0; k < 1000; ++k) {
    const Mat3 g = r.mat();
    const Mat3 a = gamma_to_alpha(g);
    const Decomposition dg = decompose(g), da = decompose(a);
    CHECK(rel(alpha_to_gamma(a), g) <= 1e-13);
    CHECK(rel(gamma_to_alpha(alpha_to_gamma(g)), g) <= 1e-13);
    CHECK(rel(da.dev_sym, Mat3(-dg.dev_sym)) <= 1e-13);
    CHECK(rel(da.skew, dg.skew) <= 1e-13);
    CHECK(std::abs(a.trace() - 2.0 * g.trace()) <= 1e-13 * g.norm());
  }
}

TEST_CASE("rotation residual: exact solution and variational consistency") {
  const MaterialParams p = normalized(0.4);
  CHECK(el_residual_R_pointwise(Mat3::Zero(), identity32(), Mat3::Zero(), Mat3::Zero(), Rotation::identity(), p).isZero(0.0));

  // With vanishing rotation derivatives the residual is the membrane moment:
  // d/dt W(Dm, R exp(t A)) = -2 <residual, R A>.
  Random r(97);
  for (int k = 0; k < 50; ++k) {
    const Mat32 dm = r.mat32();
    const Rotation q = r.rotation();
    const Vec3 v = r.vec();
    const Mat3 res = el_residual_R_pointwise(Mat3::Zero(), dm, Mat3::Zero(), Mat3::Zero(), q, p);
    const double h = 1e-5;
    const double fd = (w_normalized(dm, q * exp_so3(h * v), p) - w_normalized(dm, q * exp_so3(-h * v), p)) / (2 * h);
    const double pred = -2.0 * frobenius_dot(res, Mat3(q.matrix() * anti<double>(v)));
    CHECK(std::abs(fd - pred) <= 1e-6 * std::max(std::abs(fd), p.mu));
  }
}

TEST_CASE("rotation residual is tangent when the Laplacian has the right normal part") {
  const MaterialParams p = normalized(0.7);
  Random r(101);
  for (int k = 0; k < 100; ++k) {
    const Rotation q = r.rotation();
    const Mat3 dx = q.matrix() * anti<double>(r.vec()), dy = q.matrix() * anti<double>(r.vec());
    const Mat3 normal = -(dx.transpose() * dx + dy.transpose() * dy);
    const Mat3 lap = q.matrix() * (anti<double>(r.vec()) + normal);
    const Mat3 res = el_residual_R_pointwise(lap, r.mat32(), dx, dy, q, p);
    const Mat3 rt = q.matrix().transpose() * res;
    CHECK((rt + rt.transpose()).norm() <= 1e-10 * std::max(1.0, rt.norm()));
  }
}

TEST_CASE("rotation residual special case mu = mu_c = kappa") {
  MaterialParams p;
  p.variant = Variant::normalized_p;
  p.mu = p.mu_c = 2.3;
  p.lambda = 0.0;  // kappa = 3/2 kappa_hom = mu
  p.L_c = std::sqrt(2.0 / p.mu);
  CHECK(rel(p.kappa_normalized(), p.mu) <= 1e-15);
  Random r(103);
  for (int k = 0; k < 1000; ++k) {
    const Rotation q = r.rotation();
    const Mat32 dm = r.mat32();
    const Mat3 dx = q.matrix() * anti<double>(r.vec()), dy = q.matrix() * anti<double>(r.vec());
    const Mat3 lap = r.mat();
    Mat3 dm0 = Mat3::Zero();
    dm0.leftCols<2>() = dm;
    const Connection c = connection(q, dx, dy);
    const Mat3 omega_dr = c.omega_x * dx + c.omega_y * dy;
    const Mat3 special = lap - omega_dr + p.mu * q.matrix() * skew(Mat3(q.matrix().transpose() * dm0));
    CHECK(rel(el_residual_R_pointwise(lap, dm, dx, dy, q, p), special) <= 1e-12);
  }
}

TEST_CASE("director model") {
  const Mat32 e = identity32();
  CHECK(director_el_residual(e, Vec3::UnitZ(), Vec3::Zero(), Mat32::Zero()).isZero(0.0));
  CHECK(director_force_stress(e, Vec3::UnitZ()).isZero(1e-15));
  CHECK(rel(surface_normal(e), Vec3(Vec3::UnitZ())) == 0.0);
  Mat32 flat = Mat32::Zero();
  flat(0, 0) = 1.0;
  CHECK_THROWS_AS(surface_normal(flat), IllConditionedError);

  Random r(107);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 d = r.vec().normalized();
    const Mat32 dm = r.mat32(), dd = r.mat32();
    const Vec3 lap = r.vec();
    const double lhs = d.dot(director_el_residual(dm, d, lap, dd));
    CHECK(std::abs(lhs - (d.dot(lap) + dd.squaredNorm())) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    const Mat43 a = director_lift_matrix(r.vec());
    CHECK((a.transpose() * a - Mat3((a.col(0).squaredNorm()) * Mat3::Identity())).norm() <= 1e-12 * a.squaredNorm());
  }

  // force stress = derivative of 1/2 |Dm^T Dm - id|^2 + 1/2 |Dm^T d|^2
  auto w = [](const Mat32& dm, const Vec3& d) {
    return 0.5 * (dm.transpose() * dm - Mat2::Identity()).squaredNorm() + 0.5 * (dm.transpose() * d).squaredNorm();
  };
  for (int k = 0; k < 50; ++k) {
    const Mat32 dm = r.mat32(), b = r.mat32();
    const Vec3 d = r.vec().normalized();
    const double h = 1e-5;
    const double fd = (w(Mat32(dm + h * b), d) - w(Mat32(dm - h * b), d)) / (2 * h);
    CHECK(std::abs(fd - frobenius_dot(director_force_stress(dm, d), b)) <= 1e-7 * std::max(1.0, std::abs(fd)));
  }
}
