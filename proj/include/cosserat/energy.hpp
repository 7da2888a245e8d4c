#pragma once

// Pointwise energy densities. Every quadratic energy is written as
// Q(s) = B(s, s) for a strain s and a symmetric bilinear form B, so that the
// same code serves plain evaluation, automatic differentiation and the
// cancellation-free difference Q(s') - Q(s) = B(s' - s, s' + s).

#include <array>

#include "cosserat/material.hpp"
#include "cosserat/so3.hpp"

namespace cosserat {

/// Material constants in the form consumed by the bilinear forms below.
struct EnergyCoefficients {
  bool normalized = false;
  double mu = 0.0;
  double mu_c = 0.0;
  double shear = 0.0;       // transverse shear coefficient
  double elongation = 0.0;  // mu lambda / (2 mu + lambda)
  double kappa3 = 0.0;      // kappa/3 of the normalized form
  CurvatureModel curvature = CurvatureModel::uni_constant;
  double curv = 0.0;  // mu L_c^2 / 2
  double g_sym = 0.0, g_skew = 0.0, g_trace = 0.0, g_perp = 0.0;

  static EnergyCoefficients from(const MaterialParams& p);
};

/// U = (R1|R2)^T Dm - id2 and w_j = <R3, d_j m>.
template <class T>
struct MembraneStrain {
  Mat2T<T> u;
  Vec2T<T> w;
};

template <class T>
MembraneStrain<T> membrane_strain(const Mat3T<T>& r, const Mat32T<T>& dm) {
  MembraneStrain<T> s;
  s.u = r.template leftCols<2>().transpose() * dm;
  s.u(0, 0) -= 1.0;
  s.u(1, 1) -= 1.0;
  s.w = dm.transpose() * r.col(2);
  return s;
}

/// Strain of (r + dr, dm + ddm) minus strain of (r, dm), linear in the increments.
template <class T>
MembraneStrain<T> membrane_strain_difference(const Mat3T<T>& r, const Mat32T<T>& dm, const Mat3T<T>& dr,
                                             const Mat32T<T>& ddm) {
  const Mat32T<T> dm_new = dm + ddm;
  MembraneStrain<T> s;
  s.u = dr.template leftCols<2>().transpose() * dm_new + r.template leftCols<2>().transpose() * ddm;
  s.w = dm_new.transpose() * dr.col(2) + ddm.transpose() * r.col(2);
  return s;
}

template <class T>
MembraneStrain<T> operator+(const MembraneStrain<T>& a, const MembraneStrain<T>& b) {
  return {Mat2T<T>(a.u + b.u), Vec2T<T>(a.w + b.w)};
}

/// The full 3x3 stretch R^T(Dm|R3) - id3 assembled from the membrane strain.
template <class T>
Mat3T<T> stretch_tensor(const MembraneStrain<T>& s) {
  Mat3T<T> x = Mat3T<T>::Zero();
  x.template topLeftCorner<2, 2>() = s.u;
  x(2, 0) = s.w(0);
  x(2, 1) = s.w(1);
  return x;
}

/// Per-term bilinear contributions: stretch, drill, transverse shear, elongation.
template <class T>
std::array<T, 4> membrane_form_parts(const MembraneStrain<T>& a, const MembraneStrain<T>& b,
                                     const EnergyCoefficients& c) {
  if (c.normalized) {
    const Mat3T<T> xa = stretch_tensor(a);
    const Mat3T<T> xb = stretch_tensor(b);
    return {T(c.mu * frobenius_dot(dev(sym(xa)), xb)), T(c.mu_c * frobenius_dot(skew(xa), xb)), T(0.0),
            T(c.kappa3 * (xa.trace() * xb.trace()))};
  }
  return {T(c.mu * frobenius_dot(sym(a.u), b.u)), T(c.mu_c * frobenius_dot(skew(a.u), b.u)),
          T(c.shear * a.w.dot(b.w)), T(c.elongation * (a.u.trace() * b.u.trace()))};
}

template <class T>
T membrane_form(const MembraneStrain<T>& a, const MembraneStrain<T>& b, const EnergyCoefficients& c) {
  const auto p = membrane_form_parts(a, b, c);
  return p[0] + p[1] + p[2] + p[3];
}

/// Gamma-hat = (axl skew(R^T DxR) | axl skew(R^T DyR)).
template <class T>
Mat32T<T> wryness_strain(const Mat3T<T>& r, const Mat3T<T>& dxr, const Mat3T<T>& dyr) {
  Mat32T<T> g;
  g.col(0) = axl_of_skew_part<T>(Mat3T<T>(r.transpose() * dxr));
  g.col(1) = axl_of_skew_part<T>(Mat3T<T>(r.transpose() * dyr));
  return g;
}

/// General homogenized curvature form on wryness strains (includes mu L_c^2/2).
template <class T>
T wryness_form(const Mat32T<T>& a, const Mat32T<T>& b, const EnergyCoefficients& c) {
  const Mat2T<T> qa = a.template topRows<2>();
  const Mat2T<T> qb = b.template topRows<2>();
  const T s = c.g_sym * frobenius_dot(sym(qa), qb) + c.g_skew * frobenius_dot(skew(qa), qb) +
              c.g_trace * (qa.trace() * qb.trace()) + c.g_perp * a.row(2).dot(b.row(2));
  return c.curv * s;
}

/// Uni-constant curvature form mu L_c^2/2 (<DxR_a, DxR_b> + <DyR_a, DyR_b>).
template <class T>
T gradient_form(const Mat3T<T>& ax, const Mat3T<T>& ay, const Mat3T<T>& bx, const Mat3T<T>& by,
                const EnergyCoefficients& c) {
  return c.curv * (frobenius_dot(ax, bx) + frobenius_dot(ay, by));
}

// ---------------------------------------------------------------------------
// Public pointwise densities.

/// Membrane density. For the gamma_limit and engineering variants:
///   mu|sym U|^2 + mu_c|skew U|^2 + c_s(<R3,dx m>^2 + <R3,dy m>^2) + mu lambda/(2mu+lambda) tr(U)^2
/// with c_s from p.shear_mean. For normalized_p this is normalized_p_density
/// with kappa = 3/2 kappa_hom.
double membrane_density(const Mat32& dm, const Rotation& r, const MaterialParams& p);

/// Stretch, drill, transverse shear and elongation parts of membrane_density.
std::array<double, 4> membrane_parts(const Mat32& dm, const Rotation& r, const MaterialParams& p);

/// Uni-constant: mu L_c^2/2 (|DxR|^2 + |DyR|^2). General: the four-term
/// homogenized form in b1, b2, b3 applied to the wryness Gamma-hat.
double curvature_density(const Mat3& dxr, const Mat3& dyr, const Rotation& r, const MaterialParams& p);

/// |P(R^T(Dm|R3) - id3)|^2 = mu|dev sym X|^2 + mu_c|skew X|^2 + kappa/3 tr(X)^2.
double normalized_p_density(const Mat32& dm, const Rotation& r, double kappa, double mu, double mu_c);

/// Reissner-Mindlin director energy; dd_sq is |Dd|^2 supplied by the caller.
/// Throws std::invalid_argument unless ||d| - 1| < 1e-8.
double director_density(const Mat32& dm, const Vec3& d, double dd_sq, const MaterialParams& p);

}  // namespace cosserat
