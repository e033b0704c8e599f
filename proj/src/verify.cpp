#include "visbound/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "visbound/billiard.hpp"
#include "visbound/bounds.hpp"
#include "visbound/constants.hpp"
#include "visbound/discretization.hpp"
#include "visbound/kernel.hpp"
#include "visbound/rng.hpp"
#include "visbound/transport.hpp"
#include "visbound/vertex_enumeration.hpp"

namespace visbound {
namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

CheckResult check_kernel_derivative() {
  double worst = 0.0;
  const double h = 1e-5;
  for (double Lambda : {0.25, 0.5, 0.75}) {
    const double end = kPi - std::asin(Lambda);
    for (int i = 0; i < 50; ++i) {
      const double theta = (i + 0.5) / 50.0 * end;
      const double fd = (kappa_of_theta(Lambda, theta + h) - kappa_of_theta(Lambda, theta - h)) / (2 * h);
      worst = std::max(worst, std::abs(fd - kappa_dtheta(Lambda, theta)));
    }
  }
  return {"kernel-derivative", worst <= 1e-6, fmt("max |analytic - central difference| = %.3g", worst)};
}

CheckResult check_kernel_curvature() {
  std::size_t bad = 0;
  std::size_t total = 0;
  const double h = 1e-3;
  for (double Lambda : {0.25, 0.5, 0.75}) {
    const double sep = kPi - std::asin(Lambda);
    for (int i = 0; i < 50; ++i) {
      const double before = h + (i + 0.5) / 50.0 * (sep - 3 * h);
      const double after = sep + 2 * h + (i + 0.5) / 50.0 * (kPi - sep - 3 * h);
      auto second = [&](double t) {
        return kappa_of_theta(Lambda, t + h) - 2 * kappa_of_theta(Lambda, t) + kappa_of_theta(Lambda, t - h);
      };
      bad += second(before) >= 0.0;
      bad += second(after) <= 0.0;
      total += 2;
    }
  }
  return {"kernel-curvature", bad == 0,
          fmt("%.0f of %.0f second differences with the wrong sign", static_cast<double>(bad),
              static_cast<double>(total))};
}

CheckResult check_chain(bool quick) {
  double worst = -1e300;
  const int points = quick ? 200 : 2000;
  std::vector<double> grid;
  for (int i = 1; i <= points; ++i) grid.push_back(static_cast<double>(i) / points);
  for (int d : {2, 3, 4}) worst = std::max(worst, verify_tt2_chain(make_dimension_context(d), grid).worst());
  return {"quadratic-bound-chain", worst <= 1e-12, fmt("largest slack %.3g", worst)};
}

CheckResult check_diagonal(bool quick) {
  const std::size_t n = quick ? 50 : 200;
  const auto r = diagonal_check(2, n);
  const double gap = std::abs(r.objective - r.oracle);
  return {"diagonal-oracle", gap <= 5e-3 && r.max_offset <= 1,
          fmt("n=%.0f gap %.3g", static_cast<double>(n), gap) +
              fmt(", max |i-j| on support %.0f", static_cast<double>(r.max_offset))};
}

CheckResult check_enumeration(bool quick, std::uint64_t seed) {
  CounterRng rng(seed);
  const int instances = quick ? 40 : 200;
  const std::size_t max_size = quick ? 4 : 5;
  double worst_gap = 0.0;
  double worst_cert = 0.0;
  for (int t = 0; t < instances; ++t) {
    const std::size_t m = 1 + rng.next() % max_size;
    const std::size_t k = 1 + rng.next() % max_size;
    TransportInstance inst;
    inst.row_marginal.resize(m);
    inst.col_marginal.assign(k, 0.0);
    for (auto& a : inst.row_marginal) a = static_cast<double>(1 + rng.next() % 4);
    // Spread each row's integer mass over random columns so the sides balance exactly.
    for (double a : inst.row_marginal) {
      for (int unit = 0; unit < static_cast<int>(a); ++unit) inst.col_marginal[rng.next() % k] += 1.0;
    }
    inst.cost.resize(m * k);
    for (auto& c : inst.cost) c = std::floor(rng.uniform() * 8.0) / 4.0;
    const auto plan = solve_transport(inst);
    worst_gap = std::max(worst_gap, std::abs(plan.objective - enumerate_vertex_minimum(inst)));
    worst_cert = std::max(worst_cert, certificate_violation(inst, plan));
  }
  return {"lp-vs-enumeration", worst_gap <= 1e-10 && worst_cert <= 1e-9,
          fmt("max objective gap %.3g, max certificate violation %.3g", worst_gap, worst_cert)};
}

CheckResult check_kernel_oracle(bool quick, std::uint64_t seed) {
  const int grid = quick ? 2 : 4;
  const int samples = quick ? 2000 : 20000;
  double worst = 0.0;
  for (int d : {2, 3}) {
    const auto ctx = make_dimension_context(d);
    for (int a = 0; a < grid; ++a) {
      for (int b = 0; b < grid; ++b) {
        const double phi = (a + 0.5) / grid * kPi / 2;
        const double psi = (b + 0.5) / grid * kPi / 2;
        for (double frac : {0.4, 1.0}) {
          const double lambda = frac * ctx.lambda_hat;
          const double reduced = K_reduced(ctx, lambda, phi, psi);
          const auto brute = K_bruteforce(ctx, lambda, phi, psi, samples, seed + a * 31 + b, 1e-4);
          worst = std::max(worst, std::abs(reduced - brute.value));
        }
      }
    }
  }
  return {"kernel-vs-bruteforce", worst <= 1e-3, fmt("max |reduced - brute force| = %.3g", worst)};
}

CheckResult check_simulator(bool quick, unsigned workers, std::uint64_t seed) {
  const std::uint64_t samples = quick ? 20000 : 200000;
  const auto disc = make_scene({}, {Disc{{0.0, 0.0}, 0.6}});
  const auto est = estimate_visibility(disc, samples, seed, workers);
  const auto empty = estimate_visibility(make_scene({}, {}), samples, seed, workers);
  const double z = std::abs(est.mean - 0.6) / est.std_error;
  return {"simulator-calibration", z <= 3.0 && empty.mean == 0.0,
          fmt("disc r=0.6: mean %.5f", est.mean) + fmt(" (%.2f sigma); empty scene %.3g", z, empty.mean)};
}

}  // namespace

double concave_test_cost(double theta) { return std::cos(theta / 2); }

DiagonalCheck diagonal_check(int d, std::size_t n) {
  const auto w = marginal_weights(d, n);
  TransportInstance inst;
  inst.row_marginal = w.weights;
  inst.col_marginal = w.weights;
  inst.cost.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      inst.cost[i * n + j] = concave_test_cost(cell_midpoint(n, i) + cell_midpoint(n, j));
    }
  }
  const auto plan = solve_transport(inst);
  DiagonalCheck out;
  out.objective = plan.objective;
  out.oracle = diagonal_oracle(d, n, concave_test_cost);
  for (const auto& e : plan.support) {
    out.max_offset = std::max(out.max_offset, e.i > e.j ? e.i - e.j : e.j - e.i);
  }
  return out;
}

std::vector<CheckResult> run_property_suite(const VerifyOptions& options) {
  std::vector<CheckResult> results;
  auto run = [&](auto&& check) {
    try {
      results.push_back(check());
    } catch (const std::exception& e) {
      results.push_back({"exception", false, e.what()});
    }
  };
  run([] { return check_kernel_derivative(); });
  run([] { return check_kernel_curvature(); });
  run([&] { return check_kernel_oracle(options.quick, options.seed); });
  run([&] { return check_chain(options.quick); });
  run([&] { return check_diagonal(options.quick); });
  run([&] { return check_enumeration(options.quick, options.seed); });
  run([&] { return check_simulator(options.quick, options.workers, options.seed); });
  return results;
}

}  // namespace visbound
