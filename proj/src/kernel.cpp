#include "visbound/kernel.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "visbound/errors.hpp"
#include "visbound/rng.hpp"

namespace visbound {
namespace {

void check_domain(double Lambda, double theta) {
  if (!(Lambda > 0.0) || !std::isfinite(Lambda)) {
    throw DomainError("kernel: Lambda must be positive and finite, got " + std::to_string(Lambda));
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("kernel: theta must lie in [0, pi], got " + std::to_string(theta));
  }
}

// Root of Lambda cos(eta) - sin(theta + 2 eta) on [lo, hi]. The residual is
// negative at lo and positive at hi whenever 0 < Lambda < 1 and
// 0 < theta < pi - asin(Lambda).
double interior_root(double Lambda, double theta) {
  const double lo = std::max(0.0, kPi / 2 - theta);
  const double hi = (kPi - theta) / 2;
  auto residual = [&](double eta) { return Lambda * std::cos(eta) - std::sin(theta + 2 * eta); };
  const double f_lo = residual(lo);
  const double f_hi = residual(hi);
  if (f_lo >= 0.0) return lo;
  if (f_hi <= 0.0) return hi;
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      residual, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(), max_iter);
  // Pick the endpoint with the smaller residual.
  const double a = bracket.first;
  const double b = bracket.second;
  return std::abs(residual(a)) <= std::abs(residual(b)) ? a : b;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double gaussian(CounterRng& rng) {
  // Box-Muller on two uniforms; one value per call is plenty here.
  double u1 = rng.uniform();
  const double u2 = rng.uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void random_unit(CounterRng& rng, std::vector<double>& out) {
  double norm = 0.0;
  do {
    for (auto& c : out) c = gaussian(rng);
    norm = std::sqrt(dot(out, out));
  } while (norm < 1e-12);
  for (auto& c : out) c /= norm;
}

// Unit vector at angle `angle` from the unit vector `n`, tilted towards a
// random direction orthogonal to n.
void tilt(CounterRng& rng, const std::vector<double>& n, double angle, std::vector<double>& out,
          std::vector<double>& scratch) {
  double norm = 0.0;
  do {
    random_unit(rng, scratch);
    const double proj = dot(scratch, n);
    for (std::size_t i = 0; i < n.size(); ++i) scratch[i] -= proj * n[i];
    norm = std::sqrt(dot(scratch, scratch));
  } while (norm < 1e-8);
  for (std::size_t i = 0; i < n.size(); ++i) {
    out[i] = std::cos(angle) * n[i] + std::sin(angle) * scratch[i] / norm;
  }
}

double quadruple_objective(const DimensionContext& ctx, double lambda,
                           const std::vector<double>& v1, const std::vector<double>& n1,
                           const std::vector<double>& v2, const std::vector<double>& n2) {
  double vsum2 = 0.0;
  double ndiff2 = 0.0;
  for (std::size_t i = 0; i < v1.size(); ++i) {
    const double s = v1[i] + v2[i];
    const double t = n1[i] - n2[i];
    vsum2 += s * s;
    ndiff2 += t * t;
  }
  return ctx.visibility_scale() * vsum2 / 2.0 +
         lambda * (std::sqrt(ndiff2) / ctx.volume_ratio() - 1.0);
}

}  // namespace

double kernel_objective(double Lambda, double theta, double eta) {
  return std::cos(theta + 2 * eta) + 2 * Lambda * std::sin(eta);
}

double eta_of_theta(double Lambda, double theta) {
  check_domain(Lambda, theta);
  if (Lambda > 1.0 + kLambdaOneTolerance) return 0.0;
  if (std::abs(Lambda - 1.0) <= kLambdaOneTolerance) return std::max(0.0, kPi / 2 - theta);
  // 0 < Lambda < 1 from here on.
  if (theta >= kPi - std::asin(Lambda)) return 0.0;
  if (theta == 0.0) return kPi / 2;
  return interior_root(Lambda, theta);
}

double kappa_of_theta(double Lambda, double theta) {
  return kernel_objective(Lambda, theta, eta_of_theta(Lambda, theta));
}

KernelPoint evaluate_kernel(double Lambda, double theta) {
  KernelPoint p;
  p.Lambda = Lambda;
  p.theta = theta;
  p.eta = eta_of_theta(Lambda, theta);
  p.kappa = kernel_objective(Lambda, theta, p.eta);
  return p;
}

double kappa_dtheta(double Lambda, double theta) {
  if (!(Lambda > 0.0 && Lambda < 1.0)) {
    throw DomainError("kappa_dtheta: requires 0 < Lambda < 1, got " + std::to_string(Lambda));
  }
  if (!(theta > 0.0 && theta < kPi - std::asin(Lambda))) {
    throw DomainError("kappa_dtheta: requires 0 < theta < pi - asin(Lambda), got " +
                      std::to_string(theta));
  }
  return -Lambda * std::cos(eta_of_theta(Lambda, theta));
}

double kappa_slope(double Lambda, double theta) {
  check_domain(Lambda, theta);
  if (Lambda < 1.0 - kLambdaOneTolerance && theta < kPi - std::asin(Lambda)) {
    return -Lambda * std::cos(eta_of_theta(Lambda, theta));
  }
  return -std::sin(theta);
}

double K_reduced(const DimensionContext& ctx, double lambda, double phi, double psi) {
  if (!(lambda > 0.0)) throw DomainError("K_reduced: lambda must be positive");
  if (!(phi >= 0.0 && phi <= kPi / 2 && psi >= 0.0 && psi <= kPi / 2)) {
    throw DomainError("K_reduced: phi and psi must lie in [0, pi/2]");
  }
  const double Lambda = lambda_to_Lambda(ctx, lambda);
  const double theta = std::min(phi + psi, kPi);
  return ctx.visibility_scale() *
         (1.0 + kappa_of_theta(Lambda, theta) - ctx.volume_ratio() * Lambda);
}

KernelSearchResult K_bruteforce(const DimensionContext& ctx, double lambda, double phi, double psi,
                                int samples, std::uint64_t seed, double scan_step) {
  if (!(lambda > 0.0)) throw DomainError("K_bruteforce: lambda must be positive");
  if (!(phi >= 0.0 && phi <= kPi / 2 && psi >= 0.0 && psi <= kPi / 2)) {
    throw DomainError("K_bruteforce: phi and psi must lie in [0, pi/2]");
  }
  if (!(scan_step > 0.0)) throw DomainError("K_bruteforce: scan_step must be positive");
  const int d = ctx.d;
  std::vector<double> v1(d, 0.0), n1(d, 0.0), v2(d, 0.0), n2(d, 0.0);

  KernelSearchResult result;
  result.scan_value = std::numeric_limits<double>::infinity();
  result.random_value = std::numeric_limits<double>::infinity();

  // (a) Coplanar scan in the (e1, e2) plane: n1 at angle -eta, n2 at +eta,
  // each v tilted by its incidence angle to either side of its normal.
  const long steps = static_cast<long>(std::ceil(kPi / scan_step));
  for (long k = 0; k <= steps; ++k) {
    const double two_eta = kPi * static_cast<double>(k) / static_cast<double>(steps);
    const double a1 = -two_eta / 2;
    const double a2 = two_eta / 2;
    n1[0] = std::cos(a1);
    n1[1] = std::sin(a1);
    n2[0] = std::cos(a2);
    n2[1] = std::sin(a2);
    for (int s1 = -1; s1 <= 1; s1 += 2) {
      v1[0] = std::cos(a1 + s1 * phi);
      v1[1] = std::sin(a1 + s1 * phi);
      for (int s2 = -1; s2 <= 1; s2 += 2) {
        v2[0] = std::cos(a2 + s2 * psi);
        v2[1] = std::sin(a2 + s2 * psi);
        const double value = quadruple_objective(ctx, lambda, v1, n1, v2, n2);
        if (value < result.scan_value) {
          result.scan_value = value;
          result.scan_two_eta = two_eta;
        }
      }
    }
  }

  // (b) Random feasible quadruples on S^{d-1}.
  CounterRng rng(seed);
  std::vector<double> scratch(d, 0.0);
  for (int s = 0; s < samples; ++s) {
    random_unit(rng, n1);
    random_unit(rng, n2);
    tilt(rng, n1, phi, v1, scratch);
    tilt(rng, n2, psi, v2, scratch);
    result.random_value =
        std::min(result.random_value, quadruple_objective(ctx, lambda, v1, n1, v2, n2));
  }

  result.value = std::min(result.scan_value, result.random_value);
  return result;
}

}  // namespace visbound
