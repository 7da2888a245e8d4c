#include "cosserat/material.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace cosserat {

double harmonic_mean(double a, double b) {
  if (!(a + b > 0.0)) throw std::invalid_argument(fmt::format("harmonic_mean: a + b must be positive ({}, {})", a, b));
  return 2.0 * a * b / (a + b);
}

double kappa_hom(double mu, double lambda) {
  if (!(mu > 0.0) || !(2.0 * mu + lambda > 0.0)) {
    throw std::invalid_argument(fmt::format("kappa_hom: needs mu > 0 and 2 mu + lambda > 0 (mu={}, lambda={})", mu, lambda));
  }
  return (4.0 * mu / 3.0) * (2.0 * lambda + mu) / (2.0 * mu + lambda);
}

void MaterialParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("material parameters: " + msg); };
  for (double x : {mu, lambda, mu_c, L_c, b1, b2, b3}) {
    if (!std::isfinite(x)) fail("non-finite value");
  }
  if (!(mu > 0.0)) fail(fmt::format("mu must be positive (got {})", mu));
  if (mu_c < 0.0) fail(fmt::format("mu_c must be nonnegative (got {})", mu_c));
  if (!(L_c > 0.0)) fail(fmt::format("L_c must be positive (got {})", L_c));
  if (!(2.0 * mu + lambda > 0.0)) fail("2 mu + lambda must be positive");
  if (!(2.0 * lambda + mu > 0.0)) fail("2 lambda + mu must be positive (kappa_hom > 0)");
  if (b1 < 0.0 || b2 < 0.0 || b3 < 0.0) fail("curvature weights b1, b2, b3 must be nonnegative");
  if (variant != Variant::normalized_p && shear_mean == ShearMean::harmonic && mu_c == 0.0) {
    fail("harmonic shear mean with mu_c = 0 is not well-posed (transverse shear coefficient vanishes)");
  }
}

double MaterialParams::shear_coefficient() const {
  if (shear_mean == ShearMean::arithmetic) return 0.5 * (mu + mu_c);
  return mu + mu_c > 0.0 ? harmonic_mean(mu, mu_c) : 0.0;
}

double MaterialParams::elongation_coefficient() const { return mu * lambda / (2.0 * mu + lambda); }

double MaterialParams::curvature_weight() const { return 0.5 * mu * L_c * L_c; }

double MaterialParams::kappa_normalized() const { return 1.5 * kappa_hom(mu, lambda); }

ShearMean parse_shear_mean(std::string_view s) {
  if (s == "arithmetic") return ShearMean::arithmetic;
  if (s == "harmonic") return ShearMean::harmonic;
  throw std::invalid_argument(fmt::format("unknown shear_mean '{}' (expected arithmetic|harmonic)", s));
}

Variant parse_variant(std::string_view s) {
  if (s == "gamma_limit") return Variant::gamma_limit;
  if (s == "engineering") return Variant::engineering;
  if (s == "normalized_p") return Variant::normalized_p;
  throw std::invalid_argument(fmt::format("unknown variant '{}' (expected gamma_limit|engineering|normalized_p)", s));
}

CurvatureModel parse_curvature_model(std::string_view s) {
  if (s == "uni_constant") return CurvatureModel::uni_constant;
  if (s == "general") return CurvatureModel::general;
  throw std::invalid_argument(fmt::format("unknown curvature model '{}' (expected uni_constant|general)", s));
}

std::string to_string(ShearMean s) { return s == ShearMean::arithmetic ? "arithmetic" : "harmonic"; }

std::string to_string(Variant v) {
  switch (v) {
    case Variant::gamma_limit: return "gamma_limit";
    case Variant::engineering: return "engineering";
    case Variant::normalized_p: return "normalized_p";
  }
  return "?";
}

std::string to_string(CurvatureModel c) { return c == CurvatureModel::uni_constant ? "uni_constant" : "general"; }

}  // namespace cosserat
