#pragma once

#include <cstdint>

#include "visbound/constants.hpp"

namespace visbound {

// The reduced cost of the transport problem depends on the pair of incidence
// angles (phi, psi) only through theta = phi + psi and on the normalized
// multiplier Lambda. For fixed (theta, Lambda) the half-angle eta between the
// two exterior normals is chosen to minimize
//
//     f(eta) = cos(theta + 2 eta) + 2 Lambda sin(eta),   eta in [0, (pi - theta)/2],
//
// and kappa = min f. Interior minimizers solve Lambda cos(eta) = sin(theta + 2 eta).

/// Values within this distance of Lambda = 1 use the closed form
/// eta = (pi/2 - theta)_+.
inline constexpr double kLambdaOneTolerance = 1e-15;

struct KernelPoint {
  double Lambda = 0.0;
  double theta = 0.0;
  double eta = 0.0;
  double kappa = 0.0;
};

/// f(eta) for given theta and Lambda, with no domain checks.
double kernel_objective(double Lambda, double theta, double eta);

/// Minimizing half-angle. Throws DomainError for Lambda <= 0 or theta
/// outside [0, pi].
double eta_of_theta(double Lambda, double theta);

/// Minimal value of f over [0, (pi - theta)/2].
double kappa_of_theta(double Lambda, double theta);

KernelPoint evaluate_kernel(double Lambda, double theta);

/// d kappa / d theta = -Lambda cos(eta) on the open region
/// 0 < Lambda < 1, 0 < theta < pi - asin(Lambda); DomainError elsewhere.
double kappa_dtheta(double Lambda, double theta);

/// Slope of kappa on all of [0, pi]: the identity above where it applies and
/// -sin(theta) where kappa = cos(theta).
double kappa_slope(double Lambda, double theta);

/// (d+1)/4 [1 + kappa_Lambda(phi + psi) - (b_d/b_{d-1}) Lambda] with
/// Lambda = lambda / lambda_hat. phi, psi in [0, pi/2], lambda > 0.
double K_reduced(const DimensionContext& ctx, double lambda, double phi, double psi);

struct KernelSearchResult {
  double value = 0.0;          // overall minimum found
  double scan_value = 0.0;     // best coplanar configuration
  double random_value = 0.0;   // best random quadruple
  double scan_two_eta = 0.0;   // angle between n1 and n2 at the best coplanar point
};

/// Direct minimization of
///     (d+1)/4 |v1 + v2|^2 / 2 + lambda (b_{d-1}/b_d |n1 - n2| - 1)
/// over unit vectors in R^d with <v1, n1> = cos(phi), <v2, n2> = cos(psi).
/// Phase (a) scans coplanar configurations with every side choice for v1 and
/// v2 over an angle 2 eta in [0, pi] between the normals, at step
/// `scan_step`. Phase (b) draws `samples` random feasible quadruples from the
/// seeded counter generator. Vectors are built explicitly and the objective is
/// evaluated from them.
KernelSearchResult K_bruteforce(const DimensionContext& ctx, double lambda, double phi, double psi,
                                int samples, std::uint64_t seed, double scan_step = 1e-4);

}  // namespace visbound
