#pragma once

#include <cstddef>
#include <vector>

#include "visbound/constants.hpp"

namespace visbound {

/// Exact cell masses of the measure on [0, pi/2] with distribution function
/// sin^{d-1}, over the uniform n-cell partition.
struct MarginalWeights {
  int d = 0;
  std::size_t n = 0;
  std::vector<double> weights;
};

/// Dense symmetric n x n cost c_ij = 1 + kappa_Lambda(mid_i + mid_j), row-major.
struct CostMatrix {
  std::size_t n = 0;
  double lambda = 0.0;
  int d = 0;
  std::vector<double> entries;

  double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
};

/// Midpoint of the k-th cell (0-based) of the uniform n-cell partition of [0, pi/2].
inline double cell_midpoint(std::size_t n, std::size_t k) {
  return (static_cast<double>(k) + 0.5) / static_cast<double>(n) * (kPi / 2);
}

/// Throws DomainError for n < 1 or d < 2.
MarginalWeights marginal_weights(int d, std::size_t n);

/// The kernel is evaluated once per distinct i + j (2n - 1 evaluations).
CostMatrix cost_matrix(const DimensionContext& ctx, double lambda, std::size_t n);

}  // namespace visbound
