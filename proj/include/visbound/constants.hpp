#pragma once

namespace visbound {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Dimension-dependent constants shared by every bound computation.
///
/// `sphere_area` is the area of the unit sphere S^{d-1}, `ball_volume` the
/// volume of the unit d-ball, `lower_ball_volume` the volume of the unit
/// (d-1)-ball. `lambda_hat` is the multiplier at which the normalized
/// multiplier Lambda equals one. Immutable after construction.
struct DimensionContext {
  int d = 0;
  double sphere_area = 0.0;
  double ball_volume = 0.0;
  double lower_ball_volume = 0.0;
  double lambda_hat = 0.0;

  /// b_d / b_{d-1}
  double volume_ratio() const { return ball_volume / lower_ball_volume; }
  /// (d + 1) / 4, the normalization factor of the visibility functional.
  double visibility_scale() const { return (d + 1) / 4.0; }
};

/// Gamma(k / 2) for a positive integer k, by exact recursion from
/// Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
double gamma_half_integer(int twice_argument);

/// Area of the unit sphere S^{k-1} in R^k (k >= 1).
double unit_sphere_area(int k);

/// Volume of the unit ball in R^k (k >= 1).
double unit_ball_volume(int k);

/// Throws DomainError for d < 2.
DimensionContext make_dimension_context(int d);

/// Lambda = 4/(d+1) * b_{d-1}/b_d * lambda. Throws DomainError for lambda < 0.
double lambda_to_Lambda(const DimensionContext& ctx, double lambda);

/// Inverse of lambda_to_Lambda.
double Lambda_to_lambda(const DimensionContext& ctx, double Lambda);

}  // namespace visbound
