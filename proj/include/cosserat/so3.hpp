#pragma once

// Small-matrix algebra for 3x3 tensors and the rotation group SO(3).

#include <stdexcept>

#include <Eigen/Core>

namespace cosserat {

using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

template <class T>
using Mat3T = Eigen::Matrix<T, 3, 3>;
template <class T>
using Mat32T = Eigen::Matrix<T, 3, 2>;
template <class T>
using Mat2T = Eigen::Matrix<T, 2, 2>;
template <class T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <class T>
using Vec2T = Eigen::Matrix<T, 2, 1>;

/// Raised when an operation is evaluated too close to a singularity of its chart.
class IllConditionedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <class Derived>
auto sym(const Eigen::MatrixBase<Derived>& x) {
  using Plain = typename Derived::PlainObject;
  return Plain(0.5 * (x + x.transpose()));
}

template <class Derived>
auto skew(const Eigen::MatrixBase<Derived>& x) {
  using Plain = typename Derived::PlainObject;
  return Plain(0.5 * (x - x.transpose()));
}

/// Trace-free part, X - tr(X)/n * id.
template <class Derived>
auto dev(const Eigen::MatrixBase<Derived>& x) {
  using Plain = typename Derived::PlainObject;
  using Scalar = typename Derived::Scalar;
  Plain out = x;
  const Scalar t = x.trace() * (1.0 / static_cast<double>(x.rows()));
  for (int i = 0; i < x.rows(); ++i) out(i, i) -= t;
  return out;
}

/// Frobenius inner product, usable with non-double scalars.
template <class A, class B>
auto frobenius_dot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a.array() * b.array()).sum();
}

template <class A>
auto frobenius_sq(const Eigen::MatrixBase<A>& a) {
  return (a.array() * a.array()).sum();
}

/// Matrix of the cross product: anti(v) * w = v x w.
template <class T>
Mat3T<T> anti(const Vec3T<T>& v) {
  Mat3T<T> a;
  a << T(0.0), -v(2), v(1),  //
      v(2), T(0.0), -v(0),   //
      -v(1), v(0), T(0.0);
  return a;
}

/// Axial vector of skew(A); no skewness requirement on A.
template <class T>
Vec3T<T> axl_of_skew_part(const Mat3T<T>& a) {
  return Vec3T<T>(0.5 * (a(2, 1) - a(1, 2)), 0.5 * (a(0, 2) - a(2, 0)), 0.5 * (a(1, 0) - a(0, 1)));
}

/// Axial vector of a skew-symmetric matrix. Throws std::invalid_argument when
/// |sym A| exceeds 1e-10 (absolute, Frobenius).
Vec3 axl(const Mat3& a);

/// Orthogonal split X = dev_sym + skew + (trace/3) id.
struct Decomposition {
  Mat3 dev_sym;
  Mat3 skew;
  double trace = 0.0;
};

Decomposition decompose(const Mat3& x);

/// sqrt(mu) dev sym X + sqrt(mu_c) skew X + sqrt(kappa)/3 tr(X) id.
/// All moduli must be strictly positive.
Mat3 p_operator(const Mat3& x, double mu, double mu_c, double kappa);

/// The operator above applied twice: mu dev sym X + mu_c skew X + kappa/3 tr(X) id.
Mat3 p_squared(const Mat3& x, double mu, double mu_c, double kappa);

/// A proper orthogonal 3x3 matrix. Construction checks |R^T R - id| <= 1e-12
/// (Frobenius) and |det R - 1| <= 1e-12.
class Rotation {
 public:
  static constexpr double tolerance = 1e-12;

  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }
  /// Rotation by `angle` about the unit `axis`.
  static Rotation about_axis(const Vec3& axis, double angle);

  const Mat3& matrix() const { return m_; }
  Vec3 column(int i) const { return m_.col(i); }
  Rotation transpose() const;

  friend Rotation operator*(const Rotation& a, const Rotation& b);
  friend Vec3 operator*(const Rotation& a, const Vec3& v) { return a.m_ * v; }

  /// Frobenius deviation from orthogonality plus |det - 1|.
  static double orthogonality_defect(const Mat3& m);

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

/// Exponential map (Rodrigues formula): exp(anti(v)).
Rotation exp_so3(const Vec3& v);

/// Inverse of exp_so3 for rotation angles below pi - 1e-6. Throws
/// IllConditionedError closer to the branch cut.
Vec3 log_so3(const Rotation& r);

/// Orthogonal polar factor by the Newton-Higham iteration X <- (X + X^{-T})/2.
/// Throws std::invalid_argument for singular or orientation-reversing input.
Rotation polar_project(const Mat3& x);

/// exp(anti(v)) truncated after the quadratic term; first and second
/// derivatives at v = 0 agree with the exponential.
template <class T>
Mat3T<T> exp_so3_second_order(const Vec3T<T>& v) {
  const Mat3T<T> a = anti<T>(v);
  Mat3T<T> out = a + 0.5 * (a * a);
  for (int i = 0; i < 3; ++i) out(i, i) += 1.0;
  return out;
}

/// exp(anti(v)) - id, evaluated without cancellation for small |v|.
Mat3 expm1_so3(const Vec3& v);

}  // namespace cosserat
