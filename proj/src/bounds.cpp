#include "visbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "visbound/discretization.hpp"
#include "visbound/errors.hpp"
#include "visbound/transport.hpp"

namespace visbound {
namespace {

constexpr double kLambdaSlack = 1e-12;

void check_lambda(const DimensionContext& ctx, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive, got " + std::to_string(lambda));
  if (lambda > ctx.lambda_hat * (1.0 + kLambdaSlack)) {
    throw DomainError("lambda " + std::to_string(lambda) + " exceeds lambda_hat " +
                      std::to_string(ctx.lambda_hat) + "; the Legendre supremum only uses (0, lambda_hat]");
  }
}

double clamp_lambda(const DimensionContext& ctx, double lambda) {
  return std::min(lambda, ctx.lambda_hat);
}

}  // namespace

const char* source_tag(BoundSource source) {
  switch (source) {
    case BoundSource::LpLegendre: return "lp-legendre";
    case BoundSource::Tt1: return "thm-tt1";
    case BoundSource::Tt2a: return "thm-tt2a";
    case BoundSource::Tt2bAsymptotic: return "thm-tt2b-asymptotic";
    case BoundSource::PriorT2: return "prior-t2";
    case BoundSource::Combined: return "combined";
  }
  return "unknown";
}

double scaled_lp_value(const DimensionContext& ctx, double lambda, std::size_t n) {
  check_lambda(ctx, lambda);
  if (n < 1) throw DomainError("n must be at least 1");
  const auto w = marginal_weights(ctx.d, n);
  const auto c = cost_matrix(ctx, clamp_lambda(ctx, lambda), n);
  TransportSolver solver(w.weights, w.weights);
  return ctx.visibility_scale() * solver.solve(c.entries).objective;
}

double I_of_lambda(const DimensionContext& ctx, double lambda, std::size_t n) {
  return scaled_lp_value(ctx, lambda, n) - lambda;
}

double m_d_discrete(const DimensionContext& ctx, std::size_t n) {
  return scaled_lp_value(ctx, ctx.lambda_hat, n);
}

std::optional<double> literature_m_d(int d) {
  if (d == 2) return 0.987820;
  if (d == 3) return 0.969445;
  return std::nullopt;
}

std::vector<double> lambda_grid(const DimensionContext& ctx, std::size_t samples) {
  if (samples < 1) throw InvalidInput("lambda grid needs at least one sample");
  std::vector<double> grid(samples);
  for (std::size_t k = 1; k <= samples; ++k) {
    grid[k - 1] = ctx.lambda_hat * static_cast<double>(k) / static_cast<double>(samples);
  }
  grid.back() = ctx.lambda_hat;
  return grid;
}

std::vector<double> unit_grid(std::size_t count) {
  if (count < 2) throw InvalidInput("x grid needs at least two points");
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) {
    xs[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  xs.back() = 1.0;
  return xs;
}

LambdaSweep run_lambda_sweep(const DimensionContext& ctx, std::size_t n, std::size_t samples,
                             unsigned workers) {
  if (n < 1) throw DomainError("n must be at least 1");
  LambdaSweep sweep;
  sweep.d = ctx.d;
  sweep.n = n;
  sweep.lambdas = lambda_grid(ctx, samples);
  sweep.I_values.assign(samples, 0.0);
  sweep.iterations.assign(samples, 0);
  const auto w = marginal_weights(ctx.d, n);

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, samples));

  // Chunk c covers [begin, end); each chunk walks down from its largest lambda.
  auto solve_chunk = [&](std::size_t begin, std::size_t end) {
    TransportSolver solver(w.weights, w.weights);
    for (std::size_t k = end; k-- > begin;) {
      const double lambda = sweep.lambdas[k];
      const auto c = cost_matrix(ctx, lambda, n);
      const auto plan = solver.solve(c.entries);
      sweep.I_values[k] = ctx.visibility_scale() * plan.objective - lambda;
      sweep.iterations[k] = plan.iterations;
    }
  };

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  auto bounds = [&](unsigned t) { return samples * t / workers; };
  for (unsigned t = 1; t < workers; ++t) {
    threads.emplace_back([&, t] {
      try {
        solve_chunk(bounds(t), bounds(t + 1));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  try {
    solve_chunk(bounds(0), bounds(1));
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  sweep.m_d_discrete = sweep.I_values.back() + sweep.lambdas.back();
  return sweep;
}

BoundCurve legendre_transform(const LambdaSweep& sweep, const std::vector<double>& xs) {
  if (sweep.lambdas.empty() || sweep.lambdas.size() != sweep.I_values.size()) {
    throw InvalidInput("legendre_transform: empty or inconsistent sweep");
  }
  BoundCurve curve;
  curve.source = BoundSource::LpLegendre;
  curve.xs = xs;
  curve.ys.reserve(xs.size());
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InvalidInput("legendre_transform: x must lie in [0, 1], got " + std::to_string(x));
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sweep.lambdas.size(); ++k) {
      best = std::max(best, sweep.lambdas[k] * x + sweep.I_values[k]);
    }
    curve.ys.push_back(best);
  }
  return curve;
}

double tt2_constant(const DimensionContext& ctx) {
  const double d = ctx.d;
  const double ratio = ctx.volume_ratio();
  const double s2 = std::sqrt(2.0);
  const double bracket = ratio * (1.0 - 1.0 / s2) + s2 * (d - 1.0) / d +
                         kPi / 2.0 * (kPi / 4.0 - 1.0 / s2);
  return 8.0 / (d + 1.0) / (ratio * ratio) * bracket;
}

double tt2b_coefficient(const DimensionContext& ctx) {
  const double d = ctx.d;
  const double ratio = ctx.volume_ratio();
  return d * (d + 1.0) / (16.0 * (d - 1.0)) * ratio * ratio;
}

std::optional<double> prior_cubic_coefficient(int d) {
  if (d == 2) return kPi * kPi * kPi / 288.0;
  if (d == 3) return 16.0 / 729.0;
  return std::nullopt;
}

const BoundCurve* TheoremBounds::find(BoundSource source) const {
  for (const auto& c : curves) {
    if (c.source == source) return &c;
  }
  return nullptr;
}

double combined_bound(const DimensionContext& ctx, double m_d, double x) {
  const double tt1 = m_d - ctx.lambda_hat * (1.0 - x);
  const double tt2a = x * x / (2.0 * tt2_constant(ctx));
  return std::max({tt1, tt2a, 0.0});
}

TheoremBounds theorem_bounds(const DimensionContext& ctx, const std::vector<double>& xs,
                             double m_d, std::string m_d_source) {
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InvalidInput("theorem_bounds: x must lie in [0, 1], got " + std::to_string(x));
    }
  }
  TheoremBounds out;
  out.d = ctx.d;
  out.m_d = m_d;
  out.m_d_source = std::move(m_d_source);
  out.c = tt2_constant(ctx);

  auto make = [&](BoundSource source, auto&& f) {
    BoundCurve curve;
    curve.source = source;
    curve.xs = xs;
    for (double x : xs) curve.ys.push_back(f(x));
    out.curves.push_back(std::move(curve));
  };
  const double c = out.c;
  const double coef = tt2b_coefficient(ctx);
  make(BoundSource::Tt1, [&](double x) { return m_d - ctx.lambda_hat * (1.0 - x); });
  make(BoundSource::Tt2a, [&](double x) { return x * x / (2.0 * c); });
  make(BoundSource::Tt2bAsymptotic, [&](double x) { return coef * x * x; });
  if (auto prior = prior_cubic_coefficient(ctx.d)) {
    make(BoundSource::PriorT2, [&](double x) { return *prior * x * x * x; });
  } else {
    out.notices.push_back("no prior cubic bound for d = " + std::to_string(ctx.d) +
                          "; prior-t2 curve omitted");
  }
  make(BoundSource::Combined, [&](double x) { return combined_bound(ctx, m_d, x); });
  return out;
}

double Q_of_Lambda(const DimensionContext& ctx, double Lambda) {
  const double d = ctx.d;
  const double a = std::asin(Lambda);
  return ctx.visibility_scale() *
         (ctx.volume_ratio() * (1.0 - std::cos(a / 2)) + 2.0 * (d - 1.0) / d * std::sin(a / 2) +
          a * (a / 2 - std::sin(a / 2))) *
         Lambda;
}

double ChainReport::worst() const {
  return std::max({half_angle_cosine, half_angle_sine, arc_term, quadratic});
}

ChainReport verify_tt2_chain(const DimensionContext& ctx, const std::vector<double>& Lambda_grid) {
  ChainReport report;
  const double s2 = std::sqrt(2.0);
  const double c = tt2_constant(ctx);
  for (double Lambda : Lambda_grid) {
    if (!(Lambda > 0.0 && Lambda <= 1.0)) {
      throw DomainError("verify_tt2_chain: Lambda must lie in (0, 1], got " + std::to_string(Lambda));
    }
    const double a = std::asin(Lambda);
    const double lambda = Lambda_to_lambda(ctx, Lambda);
    report.half_angle_cosine =
        std::max(report.half_angle_cosine, (1.0 - std::cos(a / 2)) - (1.0 - 1.0 / s2) * Lambda);
    report.half_angle_sine = std::max(report.half_angle_sine, std::sin(a / 2) - Lambda / s2);
    report.arc_term = std::max(report.arc_term, a * (a / 2 - std::sin(a / 2)) -
                                                    kPi / 2 * (kPi / 4 - 1.0 / s2) * Lambda);
    report.quadratic = std::max(report.quadratic, Q_of_Lambda(ctx, Lambda) - c / 2 * lambda * lambda);
    ++report.points;
  }
  return report;
}

}  // namespace visbound
