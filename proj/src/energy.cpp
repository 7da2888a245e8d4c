#include "cosserat/energy.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cosserat {

namespace {

// a b / (a + b), zero when both vanish.
double half_harmonic(double a, double b) { return a + b > 0.0 ? a * b / (a + b) : 0.0; }

}  // namespace

EnergyCoefficients EnergyCoefficients::from(const MaterialParams& p) {
  p.validate();
  EnergyCoefficients c;
  c.normalized = p.variant == Variant::normalized_p;
  c.mu = p.mu;
  c.mu_c = p.mu_c;
  c.shear = p.shear_coefficient();
  c.elongation = p.elongation_coefficient();
  c.kappa3 = p.kappa_normalized() / 3.0;
  c.curvature = p.curvature;
  c.curv = p.curvature_weight();
  c.g_sym = p.b1;
  c.g_skew = p.b2;
  c.g_trace = half_harmonic(p.b1, p.b3);
  c.g_perp = 2.0 * half_harmonic(p.b1, p.b2);
  return c;
}

double membrane_density(const Mat32& dm, const Rotation& r, const MaterialParams& p) {
  const auto parts = membrane_parts(dm, r, p);
  return parts[0] + parts[1] + parts[2] + parts[3];
}

std::array<double, 4> membrane_parts(const Mat32& dm, const Rotation& r, const MaterialParams& p) {
  const EnergyCoefficients c = EnergyCoefficients::from(p);
  const MembraneStrain<double> s = membrane_strain<double>(r.matrix(), dm);
  return membrane_form_parts(s, s, c);
}

double curvature_density(const Mat3& dxr, const Mat3& dyr, const Rotation& r, const MaterialParams& p) {
  const EnergyCoefficients c = EnergyCoefficients::from(p);
  if (c.curvature == CurvatureModel::uni_constant) return gradient_form<double>(dxr, dyr, dxr, dyr, c);
  const Mat32 g = wryness_strain<double>(r.matrix(), dxr, dyr);
  return wryness_form<double>(g, g, c);
}

double normalized_p_density(const Mat32& dm, const Rotation& r, double kappa, double mu, double mu_c) {
  if (!(kappa > 0.0)) throw std::invalid_argument("normalized_p_density: kappa must be positive");
  Mat3 f;
  f << dm, r.column(2);
  const Mat3 x = r.matrix().transpose() * f - Mat3::Identity();
  const Decomposition d = decompose(x);
  return mu * d.dev_sym.squaredNorm() + mu_c * d.skew.squaredNorm() + (kappa / 3.0) * d.trace * d.trace;
}

double director_density(const Mat32& dm, const Vec3& d, double dd_sq, const MaterialParams& p) {
  p.validate();
  if (std::abs(d.norm() - 1.0) >= 1e-8) {
    throw std::invalid_argument(fmt::format("director_density: director must be a unit vector (|d| = {:.17g})", d.norm()));
  }
  const Mat2 e = dm.transpose() * dm - Mat2::Identity();
  const double mu = p.mu;
  const double tr = e.trace();
  return 0.25 * mu * e.squaredNorm() + 0.125 * (2.0 * mu * p.lambda / (2.0 * mu + p.lambda)) * tr * tr +
         mu * (dm.transpose() * d).squaredNorm() + p.curvature_weight() * dd_sq;
}

}  // namespace cosserat
