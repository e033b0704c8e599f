#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "visbound/constants.hpp"

namespace visbound {

/// Samples of I(lambda) = (d+1)/4 * LP(lambda) - lambda on a grid in (0, lambda_hat].
struct LambdaSweep {
  int d = 0;
  std::size_t n = 0;
  std::vector<double> lambdas;   // increasing, last entry is lambda_hat
  std::vector<double> I_values;
  double m_d_discrete = 0.0;     // (d+1)/4 * LP at Lambda = 1
  std::vector<std::size_t> iterations;
};

enum class BoundSource { LpLegendre, Tt1, Tt2a, Tt2bAsymptotic, PriorT2, Combined };

/// lp-legendre, thm-tt1, thm-tt2a, thm-tt2b-asymptotic, prior-t2, combined
const char* source_tag(BoundSource source);

struct BoundCurve {
  BoundSource source = BoundSource::LpLegendre;
  std::vector<double> xs;
  std::vector<double> ys;
};

/// (d+1)/4 times the optimal value of the discretized transport problem at
/// multiplier lambda. Throws DomainError for lambda <= 0, lambda > lambda_hat
/// or n < 1.
double scaled_lp_value(const DimensionContext& ctx, double lambda, std::size_t n);

/// I(lambda) = scaled_lp_value - lambda, same domain.
double I_of_lambda(const DimensionContext& ctx, double lambda, std::size_t n);

/// m_d^{(n)}: the scaled LP value at Lambda = 1.
double m_d_discrete(const DimensionContext& ctx, std::size_t n);

/// Published values of m_2 and m_3; empty for other d.
std::optional<double> literature_m_d(int d);

/// lambda_k = k lambda_hat / samples, k = 1..samples.
std::vector<double> lambda_grid(const DimensionContext& ctx, std::size_t samples);

/// `count` equally spaced points on [0, 1] (count >= 2).
std::vector<double> unit_grid(std::size_t count);

/// Solves the LP on the whole lambda grid. The grid is cut into contiguous
/// chunks, one per worker; each worker warm-starts its solves from the
/// previous basis. workers == 0 picks the hardware concurrency. Results do not
/// depend on the worker count beyond rounding in the last bits.
LambdaSweep run_lambda_sweep(const DimensionContext& ctx, std::size_t n, std::size_t samples,
                             unsigned workers = 0);

/// I*(x) = max_k (lambda_k x + I(lambda_k)). Throws InvalidInput for an empty
/// sweep or x outside [0, 1].
BoundCurve legendre_transform(const LambdaSweep& sweep, const std::vector<double>& xs);

/// c = 8/(d+1) (b_{d-1}/b_d)^2 [(b_d/b_{d-1})(1 - 1/sqrt2) + sqrt2 (d-1)/d + pi/2 (pi/4 - 1/sqrt2)]
double tt2_constant(const DimensionContext& ctx);

/// d(d+1)/(16(d-1)) (b_d/b_{d-1})^2
double tt2b_coefficient(const DimensionContext& ctx);

/// Coefficient of the earlier cubic bound: pi^3/288 for d = 2, 16/729 for d = 3.
std::optional<double> prior_cubic_coefficient(int d);

struct TheoremBounds {
  int d = 0;
  double m_d = 0.0;
  std::string m_d_source;   // "lp-n<N>" or "literature"
  double c = 0.0;
  std::vector<BoundCurve> curves;   // tt1, tt2a, tt2b, prior (if known), combined
  std::vector<std::string> notices;

  const BoundCurve* find(BoundSource source) const;
};

/// Closed-form curves on `xs`. The combined curve is max(tt1, tt2a, 0); the
/// asymptotic tt2b curve is informational and not part of it.
TheoremBounds theorem_bounds(const DimensionContext& ctx, const std::vector<double>& xs,
                             double m_d, std::string m_d_source);

/// Combined bound at a single x.
double combined_bound(const DimensionContext& ctx, double m_d, double x);

/// Q(Lambda) = (d+1)/4 [(b_d/b_{d-1})(1 - cos(a/2)) + 2 (d-1)/d sin(a/2) + a (a/2 - sin(a/2))] Lambda,
/// a = asin(Lambda).
double Q_of_Lambda(const DimensionContext& ctx, double Lambda);

/// Largest slack (lhs - rhs) of each inequality over the grid; all should be
/// <= 0 up to rounding.
struct ChainReport {
  double half_angle_cosine = -1e300;   // 1 - cos(a/2) <= (1 - 1/sqrt2) Lambda
  double half_angle_sine = -1e300;     // sin(a/2) <= Lambda / sqrt2
  double arc_term = -1e300;            // a (a/2 - sin(a/2)) <= pi/2 (pi/4 - 1/sqrt2) Lambda
  double quadratic = -1e300;           // Q(Lambda) <= c/2 lambda^2
  std::size_t points = 0;

  double worst() const;
};

/// Throws DomainError for grid points outside (0, 1].
ChainReport verify_tt2_chain(const DimensionContext& ctx, const std::vector<double>& Lambda_grid);

}  // namespace visbound
