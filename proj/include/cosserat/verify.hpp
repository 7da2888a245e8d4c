#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cosserat/so3.hpp"

namespace cosserat {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed error (or violation) of the suite
  std::string detail;
};

using PSquaredFn = std::function<Mat3(const Mat3&, double, double, double)>;

struct VerifyOptions {
  int samples = 10000;
  std::uint64_t seed = 20240611;
  PSquaredFn p_squared = cosserat::p_squared;  // replaceable for fault injection
};

/// Identity suites across all modules: algebra, P operator, Gamma/alpha,
/// coercivity, mean equivalence, director lift, frame indifference, EL special
/// case and a finite-difference gradient check.
std::vector<SuiteResult> run_verification(const VerifyOptions& opts = {});

}  // namespace cosserat
