#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "cosserat/so3.hpp"

namespace testing {

using namespace cosserat;

class Random {
 public:
  explicit Random(std::uint64_t seed = 7) : rng_(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  Vec3 vec() { return Vec3(normal(), normal(), normal()); }
  Mat3 mat() {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i) = normal();
    return m;
  }
  Mat32 mat32() {
    Mat32 m;
    for (int i = 0; i < 6; ++i) m(i) = normal();
    return m;
  }
  Rotation rotation() { return exp_so3(uniform(0.0, 3.0) * vec().normalized()); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

template <class A, class B>
double rel(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

}  // namespace testing
