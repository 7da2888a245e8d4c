#pragma once

#include <string>
#include <string_view>

namespace cosserat {

enum class ShearMean { arithmetic, harmonic };
enum class Variant { gamma_limit, engineering, normalized_p };
enum class CurvatureModel { uni_constant, general };

/// 2ab/(a+b). Throws std::invalid_argument when a + b <= 0.
double harmonic_mean(double a, double b);

/// Effective two-dimensional bulk modulus (4 mu/3)(2 lambda + mu)/(2 mu + lambda).
/// Throws std::invalid_argument unless mu > 0 and 2 mu + lambda > 0.
double kappa_hom(double mu, double lambda);

struct MaterialParams {
  double mu = 2.7191e4;
  double lambda = 4.4364e4;
  double mu_c = 2.7191e4;
  double L_c = 1e-3;
  double b1 = 1.0;
  double b2 = 1.0;
  double b3 = 1.0;
  ShearMean shear_mean = ShearMean::harmonic;
  Variant variant = Variant::gamma_limit;
  CurvatureModel curvature = CurvatureModel::uni_constant;

  /// Throws std::invalid_argument with a readable message on violation.
  void validate() const;

  /// Coefficient of the transverse shear term; selected by shear_mean.
  double shear_coefficient() const;
  /// mu lambda / (2 mu + lambda)
  double elongation_coefficient() const;
  /// mu L_c^2 / 2
  double curvature_weight() const;
  /// kappa used by the normalized P-form: 3/2 kappa_hom.
  double kappa_normalized() const;
};

ShearMean parse_shear_mean(std::string_view s);
Variant parse_variant(std::string_view s);
CurvatureModel parse_curvature_model(std::string_view s);
std::string to_string(ShearMean s);
std::string to_string(Variant v);
std::string to_string(CurvatureModel c);

}  // namespace cosserat
