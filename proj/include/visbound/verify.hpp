#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace visbound {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  bool quick = false;
  unsigned workers = 0;
  std::uint64_t seed = 20240611;
};

/// Kernel derivative and curvature, oracle comparisons for the transport
/// solver, the quadratic-bound inequality chain and simulator calibration.
/// `quick` shrinks grid sizes and sample counts.
std::vector<CheckResult> run_property_suite(const VerifyOptions& options);

/// Strictly concave cost used by the diagonal-plan checks: cos(theta / 2).
double concave_test_cost(double theta);

/// Solves the transport problem with cost concave_test_cost(mid_i + mid_j) and
/// marginals from dimension d. Returns the objective gap to the diagonal
/// oracle and the largest |i - j| on the support.
struct DiagonalCheck {
  double objective = 0.0;
  double oracle = 0.0;
  std::size_t max_offset = 0;
};
DiagonalCheck diagonal_check(int d, std::size_t n);

}  // namespace visbound
