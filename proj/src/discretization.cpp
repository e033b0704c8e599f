#include "visbound/discretization.hpp"

#include <algorithm>
#include <cmath>

#include "visbound/errors.hpp"
#include "visbound/kernel.hpp"

namespace visbound {

MarginalWeights marginal_weights(int d, std::size_t n) {
  if (d < 2) throw DomainError("marginal_weights: need d >= 2");
  if (n < 1) throw DomainError("marginal_weights: need n >= 1");
  MarginalWeights w;
  w.d = d;
  w.n = n;
  w.weights.resize(n);
  auto cdf = [&](std::size_t k) {
    if (k == n) return 1.0;
    return std::pow(std::sin(static_cast<double>(k) / static_cast<double>(n) * (kPi / 2)), d - 1);
  };
  double previous = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double current = cdf(k);
    w.weights[k - 1] = current - previous;
    previous = current;
  }
  return w;
}

CostMatrix cost_matrix(const DimensionContext& ctx, double lambda, std::size_t n) {
  if (n < 1) throw DomainError("cost_matrix: need n >= 1");
  if (!(lambda > 0.0)) throw DomainError("cost_matrix: lambda must be positive");
  const double Lambda = lambda_to_Lambda(ctx, lambda);
  // theta for index sum s = i + j (0-based) is (s + 1) pi / (2n).
  std::vector<double> by_sum(2 * n - 1);
  for (std::size_t s = 0; s < by_sum.size(); ++s) {
    const double theta = std::min(kPi, static_cast<double>(s + 1) / static_cast<double>(n) * (kPi / 2));
    by_sum[s] = 1.0 + kappa_of_theta(Lambda, theta);
  }
  CostMatrix c;
  c.n = n;
  c.lambda = lambda;
  c.d = ctx.d;
  c.entries.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c.entries[i * n + j] = by_sum[i + j];
  }
  return c;
}

}  // namespace visbound
