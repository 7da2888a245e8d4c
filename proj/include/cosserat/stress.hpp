#pragma once

// Stresses, the rotation connection, wryness and pointwise Euler-Lagrange
// residuals. The membrane quantities refer to the normalized P-form energy
// |P(R^T(Dm|R3) - id3)|^2 + mu L_c^2/2 |DR|^2 with kappa = 3/2 kappa_hom.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "cosserat/material.hpp"
#include "cosserat/so3.hpp"

namespace cosserat {

using Mat43 = Eigen::Matrix<double, 4, 3>;

struct StressPair {
  Mat3 T;   // Biot-type
  Mat32 S;  // first Piola-Kirchhoff type, pi12(R T)
};

struct Connection {
  Mat3 omega_x;
  Mat3 omega_y;
};

struct Wryness {
  Mat32 gamma_hat;
};

/// B o C = 1/2 B C^T.
Mat3 circ(const Mat32& b, const Mat32& c);

/// First two columns.
inline Mat32 pi12(const Mat3& x) { return x.leftCols<2>(); }

/// mu dev sym X + mu_c skew X + kappa/3 tr(X) id; nonnegative moduli allowed.
Mat3 p_squared_weights(const Mat3& x, double mu, double mu_c, double kappa);

/// T = 2 P^2(R^T(Dm|0) - (id2|0)), S = pi12(R T). mu_c = 0 is admitted.
StressPair stress(const Mat32& dm, const Rotation& r, const MaterialParams& p);

/// L_R(xi) = pi12(2 R P^2(R^T(xi|0))).
Mat32 legendre_operator(const Mat32& xi, const Rotation& r, const MaterialParams& p);

/// Omega_i = -R (d_i R)^T. Throws std::invalid_argument unless
/// |sym(R^T d_i R)| <= 1e-8 max(1, |d_i R|).
Connection connection(const Rotation& r, const Mat3& dxr, const Mat3& dyr);

/// Columns axl(R^T DxR), axl(R^T DyR). Same tangency check as connection.
Wryness wryness(const Rotation& r, const Mat3& dxr, const Mat3& dyr);

/// alpha = -Gamma^T + tr(Gamma) id.
Mat3 gamma_to_alpha(const Mat3& gamma);
/// Gamma = -alpha^T + 1/2 tr(alpha) id.
Mat3 alpha_to_gamma(const Mat3& alpha);

/// c (LapR - Omega . DR) - skew(Dm o S) R with c = mu L_c^2/2. For c = 1 this
/// is the boxed rotation equation.
Mat3 el_residual_R_pointwise(const Mat3& lap_r, const Mat32& dm, const Mat3& dxr, const Mat3& dyr,
                             const Rotation& r, const MaterialParams& p);

// Reissner-Mindlin director model (unit-coefficient form).

/// Unit normal of the midsurface. Throws IllConditionedError if |dx m x dy m| < 1e-12.
Vec3 surface_normal(const Mat32& dm);

/// LapD + d x (Dm Dm^T d) + |Dd|^2 d, where dd = (dx d | dy d).
Vec3 director_el_residual(const Mat32& dm, const Vec3& d, const Vec3& lap_d, const Mat32& dd);

/// pi12((Dm|n) 2((Dm|n)^T(Dm|n) - id3)) + d (x) Dm^T d.
Mat32 director_force_stress(const Mat32& dm, const Vec3& d);

/// A-hat = (Anti(d) ; d^T), a 4x3 matrix with A-hat^T A-hat = |d|^2 id.
Mat43 director_lift_matrix(const Vec3& d);

}  // namespace cosserat
