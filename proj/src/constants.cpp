#include "visbound/constants.hpp"

#include <cmath>
#include <string>

#include "visbound/errors.hpp"

namespace visbound {

double gamma_half_integer(int twice_argument) {
  if (twice_argument < 1) {
    throw DomainError("gamma_half_integer: argument must be positive, got " +
                      std::to_string(twice_argument) + "/2");
  }
  // Walk down in unit steps to either Gamma(1) or Gamma(1/2).
  double value = (twice_argument % 2 == 0) ? 1.0 : std::sqrt(kPi);
  for (int k = (twice_argument % 2 == 0) ? 2 : 1; k + 2 <= twice_argument; k += 2) {
    value *= k / 2.0;
  }
  return value;
}

double unit_sphere_area(int k) {
  if (k < 1) throw DomainError("unit_sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(kPi, k / 2.0) / gamma_half_integer(k);
}

double unit_ball_volume(int k) { return unit_sphere_area(k) / k; }

DimensionContext make_dimension_context(int d) {
  if (d < 2) {
    throw DomainError("invalid dimension " + std::to_string(d) + ": need d >= 2");
  }
  DimensionContext ctx;
  ctx.d = d;
  ctx.sphere_area = unit_sphere_area(d);
  ctx.ball_volume = ctx.sphere_area / d;
  ctx.lower_ball_volume = unit_ball_volume(d - 1);
  ctx.lambda_hat = (d + 1) / 4.0 * ctx.ball_volume / ctx.lower_ball_volume;
  return ctx;
}

double lambda_to_Lambda(const DimensionContext& ctx, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  return lambda / ctx.lambda_hat;
}

double Lambda_to_lambda(const DimensionContext& ctx, double Lambda) {
  if (!(Lambda >= 0.0)) throw DomainError("Lambda must be >= 0");
  return Lambda * ctx.lambda_hat;
}

}  // namespace visbound
