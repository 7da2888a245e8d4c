#include "cosserat/stress.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cosserat {

namespace {

Mat3 embed(const Mat32& x) {
  Mat3 out = Mat3::Zero();
  out.leftCols<2>() = x;
  return out;
}

void require_unit(const Vec3& d, const char* who) {
  if (std::abs(d.norm() - 1.0) >= 1e-8) {
    throw std::invalid_argument(fmt::format("{}: director must be a unit vector (|d| = {:.17g})", who, d.norm()));
  }
}

void require_tangent(const Rotation& r, const Mat3& dr, const char* who) {
  const double defect = sym(Mat3(r.matrix().transpose() * dr)).norm();
  if (defect > 1e-8 * std::max(1.0, dr.norm())) {
    throw std::invalid_argument(fmt::format("{}: derivative is not tangent to SO(3) at R (|sym R^T dR| = {:.3e})", who, defect));
  }
}

}  // namespace

Mat3 circ(const Mat32& b, const Mat32& c) { return 0.5 * b * c.transpose(); }

Mat3 p_squared_weights(const Mat3& x, double mu, double mu_c, double kappa) {
  const Decomposition d = decompose(x);
  return mu * d.dev_sym + mu_c * d.skew + (kappa / 3.0) * d.trace * Mat3::Identity();
}

StressPair stress(const Mat32& dm, const Rotation& r, const MaterialParams& p) {
  p.validate();
  Mat3 x = r.matrix().transpose() * embed(dm);
  x(0, 0) -= 1.0;
  x(1, 1) -= 1.0;
  StressPair out;
  out.T = 2.0 * p_squared_weights(x, p.mu, p.mu_c, p.kappa_normalized());
  out.S = pi12(Mat3(r.matrix() * out.T));
  return out;
}

Mat32 legendre_operator(const Mat32& xi, const Rotation& r, const MaterialParams& p) {
  const Mat3 x = r.matrix().transpose() * embed(xi);
  return pi12(Mat3(2.0 * r.matrix() * p_squared_weights(x, p.mu, p.mu_c, p.kappa_normalized())));
}

Connection connection(const Rotation& r, const Mat3& dxr, const Mat3& dyr) {
  require_tangent(r, dxr, "connection");
  require_tangent(r, dyr, "connection");
  return {-r.matrix() * dxr.transpose(), -r.matrix() * dyr.transpose()};
}

Wryness wryness(const Rotation& r, const Mat3& dxr, const Mat3& dyr) {
  require_tangent(r, dxr, "wryness");
  require_tangent(r, dyr, "wryness");
  Wryness w;
  w.gamma_hat.col(0) = axl_of_skew_part<double>(Mat3(r.matrix().transpose() * dxr));
  w.gamma_hat.col(1) = axl_of_skew_part<double>(Mat3(r.matrix().transpose() * dyr));
  return w;
}

Mat3 gamma_to_alpha(const Mat3& gamma) { return -gamma.transpose() + gamma.trace() * Mat3::Identity(); }

Mat3 alpha_to_gamma(const Mat3& alpha) { return -alpha.transpose() + 0.5 * alpha.trace() * Mat3::Identity(); }

Mat3 el_residual_R_pointwise(const Mat3& lap_r, const Mat32& dm, const Mat3& dxr, const Mat3& dyr,
                             const Rotation& r, const MaterialParams& p) {
  const Mat3& rm = r.matrix();
  const Mat3 omega_dr = -rm * dxr.transpose() * dxr - rm * dyr.transpose() * dyr;
  const StressPair s = stress(dm, r, p);
  return p.curvature_weight() * (lap_r - omega_dr) - skew(circ(dm, s.S)) * rm;
}

Vec3 surface_normal(const Mat32& dm) {
  const Vec3 n = dm.col(0).cross(dm.col(1));
  const double len = n.norm();
  if (len < 1e-12) throw IllConditionedError(fmt::format("surface_normal: degenerate tangent plane (|dx m x dy m| = {:.3e})", len));
  return n / len;
}

Vec3 director_el_residual(const Mat32& dm, const Vec3& d, const Vec3& lap_d, const Mat32& dd) {
  require_unit(d, "director_el_residual");
  return lap_d + d.cross(dm * (dm.transpose() * d)) + dd.squaredNorm() * d;
}

Mat32 director_force_stress(const Mat32& dm, const Vec3& d) {
  require_unit(d, "director_force_stress");
  Mat3 f;
  f << dm, surface_normal(dm);
  const Mat3 t = f * (2.0 * (f.transpose() * f - Mat3::Identity()));
  return pi12(t) + d * (dm.transpose() * d).transpose();
}

Mat43 director_lift_matrix(const Vec3& d) {
  Mat43 a;
  a.topRows<3>() = anti<double>(d);
  a.row(3) = d.transpose();
  return a;
}

}  // namespace cosserat
