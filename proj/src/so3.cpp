#include "cosserat/so3.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>
#include <fmt/format.h>

namespace cosserat {

Vec3 axl(const Mat3& a) {
  const double asym = sym(a).norm();
  if (asym > 1e-10) {
    throw std::invalid_argument(fmt::format("axl: matrix is not skew-symmetric (|sym A| = {:.3e})", asym));
  }
  return axl_of_skew_part<double>(a);
}

Decomposition decompose(const Mat3& x) {
  Decomposition d;
  d.trace = x.trace();
  d.skew = skew(x);
  d.dev_sym = dev(sym(x));
  return d;
}

namespace {

void require_positive_moduli(double mu, double mu_c, double kappa) {
  if (!(mu > 0.0) || !(mu_c > 0.0) || !(kappa > 0.0)) {
    throw std::invalid_argument(
        fmt::format("P operator needs positive moduli, got mu={}, mu_c={}, kappa={}", mu, mu_c, kappa));
  }
}

Mat3 weighted(const Mat3& x, double w_dev, double w_skew, double w_trace) {
  const Decomposition d = decompose(x);
  return w_dev * d.dev_sym + w_skew * d.skew + (w_trace / 3.0) * d.trace * Mat3::Identity();
}

}  // namespace

Mat3 p_operator(const Mat3& x, double mu, double mu_c, double kappa) {
  require_positive_moduli(mu, mu_c, kappa);
  return weighted(x, std::sqrt(mu), std::sqrt(mu_c), std::sqrt(kappa));
}

Mat3 p_squared(const Mat3& x, double mu, double mu_c, double kappa) {
  require_positive_moduli(mu, mu_c, kappa);
  return weighted(x, mu, mu_c, kappa);
}

// ---------------------------------------------------------------------------

double Rotation::orthogonality_defect(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm() + std::abs(m.determinant() - 1.0);
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!m.allFinite()) throw std::invalid_argument("Rotation: non-finite entries");
  const double orth = (m.transpose() * m - Mat3::Identity()).norm();
  const double det = m.determinant();
  if (orth > tolerance || std::abs(det - 1.0) > tolerance) {
    throw std::invalid_argument(
        fmt::format("Rotation: not in SO(3) (|R^T R - id| = {:.3e}, det = {:.15g})", orth, det));
  }
}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  return exp_so3(angle * axis.normalized());
}

Rotation Rotation::transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

Rotation operator*(const Rotation& a, const Rotation& b) {
  return Rotation(a.m_ * b.m_, Rotation::Unchecked{});
}

Mat3 expm1_so3(const Vec3& v) {
  const double theta2 = v.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a = 0.0;  // sin(theta)/theta
  double b = 0.0;  // (1 - cos(theta))/theta^2
  if (theta2 < 1e-8) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    const double s = std::sin(0.5 * theta);
    b = 2.0 * s * s / theta2;
  }
  const Mat3 w = anti<double>(v);
  return a * w + b * (w * w);
}

Rotation exp_so3(const Vec3& v) { return Rotation(Mat3(Mat3::Identity() + expm1_so3(v))); }

Vec3 log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const Vec3 s = axl_of_skew_part<double>(m);  // sin(theta) * axis
  const double sin_theta = s.norm();
  const double cos_theta = 0.5 * (m.trace() - 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);
  if (theta > std::numbers::pi - 1e-6) {
    throw IllConditionedError(fmt::format("log_so3: rotation angle {:.17g} too close to pi", theta));
  }
  if (sin_theta < 1e-8) {
    const double t2 = theta * theta;
    return (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * s;
  }
  return (theta / sin_theta) * s;
}

Rotation polar_project(const Mat3& x) {
  if (!x.allFinite()) throw std::invalid_argument("polar_project: non-finite entries");
  const double scale = x.norm();
  const double det = x.determinant();
  if (!(scale > 0.0) || det <= 1e-14 * scale * scale * scale) {
    throw std::invalid_argument(fmt::format("polar_project: needs det X > 0, got det = {:.6e}", det));
  }
  Mat3 y = x;
  for (int it = 0; it < 100; ++it) {
    const Mat3 next = 0.5 * (y + y.inverse().transpose());
    const double step = (next - y).norm();
    y = next;
    if (step < 1e-13) break;
  }
  return Rotation(y);
}

}  // namespace cosserat
