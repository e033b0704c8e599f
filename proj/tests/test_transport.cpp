#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "visbound/constants.hpp"
#include "visbound/discretization.hpp"
#include "visbound/errors.hpp"
#include "visbound/kernel.hpp"
#include "visbound/rng.hpp"
#include "visbound/transport.hpp"
#include "visbound/vertex_enumeration.hpp"

using namespace visbound;

namespace {

TransportInstance discretized(int d, double Lambda, std::size_t n) {
  const auto ctx = make_dimension_context(d);
  const auto w = marginal_weights(d, n);
  return {cost_matrix(ctx, Lambda * ctx.lambda_hat, n).entries, w.weights, w.weights};
}

void expect_certified(const TransportInstance& inst, const TransportPlan& plan) {
  EXPECT_LE(certificate_violation(inst, plan), 1e-9);
  EXPECT_LE(marginal_violation(inst, plan), 1e-10);
  EXPECT_LE(plan.support.size(), inst.rows() + inst.cols() - 1);
  for (const auto& e : plan.support) EXPECT_GT(e.mass, 0.0);
}

// Small instances with integer data, so every vertex is exact.
std::vector<TransportInstance> integer_corpus(std::uint64_t seed, int count, std::size_t max_side) {
  CounterRng rng(seed);
  std::vector<TransportInstance> out;
  for (int t = 0; t < count; ++t) {
    const std::size_t m = 1 + rng.next() % max_side;
    const std::size_t k = 1 + rng.next() % max_side;
    TransportInstance inst;
    inst.row_marginal.resize(m);
    inst.col_marginal.assign(k, 0.0);
    for (auto& a : inst.row_marginal) a = static_cast<double>(rng.next() % 5);
    if (std::accumulate(inst.row_marginal.begin(), inst.row_marginal.end(), 0.0) == 0.0) inst.row_marginal[0] = 1;
    for (double a : inst.row_marginal) {
      for (int u = 0; u < static_cast<int>(a); ++u) inst.col_marginal[rng.next() % k] += 1.0;
    }
    inst.cost.resize(m * k);
    // Coarse costs force ties and degenerate pivots.
    for (auto& c : inst.cost) c = static_cast<double>(rng.next() % 4);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

TEST(Transport, SingleCell) {
  TransportInstance inst{{2.5}, {1.0}, {1.0}};
  const auto plan = solve_transport(inst);
  ASSERT_EQ(plan.support.size(), 1u);
  EXPECT_EQ(plan.support[0].i, 0u);
  EXPECT_EQ(plan.support[0].j, 0u);
  EXPECT_DOUBLE_EQ(plan.support[0].mass, 1.0);
  EXPECT_DOUBLE_EQ(plan.objective, 2.5);
}

TEST(Transport, ZeroCostMatching) {
  TransportInstance inst{{0, 1, 1, 0}, {0.5, 0.5}, {0.5, 0.5}};
  const auto plan = solve_transport(inst);
  EXPECT_EQ(plan.objective, 0.0);
  for (const auto& e : plan.support) EXPECT_EQ(e.i, e.j);
  expect_certified(inst, plan);
}

TEST(Transport, PermutationCost) {
  const std::size_t n = 9;
  const std::size_t perm[n] = {3, 7, 0, 8, 1, 5, 2, 6, 4};
  TransportInstance inst;
  inst.row_marginal.assign(n, 1.0 / n);
  inst.col_marginal.assign(n, 1.0 / n);
  inst.cost.assign(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) inst.cost[i * n + perm[i]] = 0.0;
  const auto plan = solve_transport(inst);
  EXPECT_EQ(plan.objective, 0.0);
  expect_certified(inst, plan);
}

TEST(Transport, Errors) {
  EXPECT_THROW(solve_transport({{1, 2, 3, 4}, {0.5, 0.5}, {0.5, 0.6}}), Infeasible);
  EXPECT_THROW(solve_transport({{1, NAN, 3, 4}, {0.5, 0.5}, {0.5, 0.5}}), InvalidInput);
  EXPECT_THROW(solve_transport({{1, INFINITY, 3, 4}, {0.5, 0.5}, {0.5, 0.5}}), InvalidInput);
  EXPECT_THROW(solve_transport({{1, 2, 3}, {0.5, 0.5}, {0.5, 0.5}}), InvalidInput);
  EXPECT_THROW(solve_transport({{1, 2, 3, 4}, {-0.5, 1.5}, {0.5, 0.5}}), InvalidInput);
  EXPECT_THROW(solve_transport({{}, {}, {}}), InvalidInput);
}

TEST(Transport, MatchesExternalLpSolver) {
  // Optimal values of the discretized problem from an interior-point/simplex
  // LP code (HiGHS), computed independently of this library.
  struct Case {
    int d;
    std::size_t n;
    double Lambda;
    double objective;
  };
  const Case cases[] = {
      {2, 8, 0.5, 0.7348622008249847}, {2, 8, 1.0, 1.314549962509262},
      {2, 20, 0.5, 0.7360058618442534}, {2, 20, 1.0, 1.3167036746009926},
      {3, 8, 0.5, 0.5931753002030156}, {3, 8, 1.0, 0.9694210091793994},
      {3, 20, 0.5, 0.5939693350779789}, {3, 20, 1.0, 0.9693730460178547},
  };
  for (const auto& c : cases) {
    const auto inst = discretized(c.d, c.Lambda, c.n);
    const auto plan = solve_transport(inst);
    EXPECT_NEAR(plan.objective, c.objective, 1e-9) << c.d << " " << c.n << " " << c.Lambda;
    expect_certified(inst, plan);
  }
}

TEST(Transport, ExhaustiveVerticesOnIntegerCorpus) {
  for (const auto& inst : integer_corpus(17, 300, 6)) {
    const auto plan = solve_transport(inst);
    EXPECT_NEAR(plan.objective, enumerate_vertex_minimum(inst), 1e-10);
    expect_certified(inst, plan);
  }
}

TEST(Transport, ExhaustiveVerticesOnDiscretizedCorpus) {
  for (int d : {2, 3}) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (double Lambda : {0.2, 0.6, 1.0, 1.5}) {
        const auto inst = discretized(d, Lambda, n);
        const auto plan = solve_transport(inst);
        EXPECT_NEAR(plan.objective, enumerate_vertex_minimum(inst), 1e-10);
        expect_certified(inst, plan);
      }
    }
  }
}

TEST(Transport, DeterministicSupport) {
  const auto inst = discretized(2, 0.6, 60);
  const auto a = solve_transport(inst);
  const auto b = solve_transport(inst);
  ASSERT_EQ(a.support.size(), b.support.size());
  for (std::size_t k = 0; k < a.support.size(); ++k) {
    EXPECT_EQ(a.support[k].i, b.support[k].i);
    EXPECT_EQ(a.support[k].j, b.support[k].j);
    EXPECT_EQ(a.support[k].mass, b.support[k].mass);
  }
  EXPECT_EQ(a.objective, b.objective);
}

TEST(Transport, WarmStartAgreesWithColdStart) {
  const std::size_t n = 80;
  const auto w = marginal_weights(3, n);
  TransportSolver warm(w.weights, w.weights);
  for (double Lambda : {1.0, 0.8, 0.3, 0.05, 0.9}) {
    const auto inst = discretized(3, Lambda, n);
    const auto hot = warm.solve(inst.cost);
    const auto cold = solve_transport(inst);
    EXPECT_NEAR(hot.objective, cold.objective, 1e-12);
    expect_certified(inst, hot);
  }
}

TEST(Transport, RectangularAndZeroMarginals) {
  TransportInstance inst{{4, 1, 3, 2, 0, 5}, {0.0, 1.0}, {0.25, 0.0, 0.75}};
  const auto plan = solve_transport(inst);
  EXPECT_NEAR(plan.objective, 0.25 * 2 + 0.75 * 5, 1e-15);
  EXPECT_NEAR(plan.objective, enumerate_vertex_minimum(inst), 1e-12);
  expect_certified(inst, plan);
}

TEST(DiagonalOracle, Examples) {
  for (int d : {2, 3}) EXPECT_NEAR(diagonal_oracle(d, 40, [](double) { return 1.0; }), 1.0, 1e-14);
  const double value = diagonal_oracle(2, 400, [](double x) { return std::cos(x / 2); });
  EXPECT_NEAR(value, kPi / 4, 1e-5);
}

TEST(DiagonalOracle, ConcaveCostHasDiagonalSupport) {
  auto concave = [](double x) { return std::cos(x / 2); };
  for (std::size_t n : {3u, 50u, 100u, 200u}) {
    const auto w = marginal_weights(2, n);
    TransportInstance inst;
    inst.row_marginal = w.weights;
    inst.col_marginal = w.weights;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) inst.cost.push_back(concave(cell_midpoint(n, i) + cell_midpoint(n, j)));
    }
    const auto plan = solve_transport(inst);
    const double oracle = diagonal_oracle(2, n, concave);
    EXPECT_GE(plan.objective, oracle - 1.0 / n);
    EXPECT_LE(std::abs(plan.objective - oracle), kPi / (2 * n));
    for (const auto& e : plan.support) EXPECT_LE(e.i > e.j ? e.i - e.j : e.j - e.i, 1u);
    const auto ctx = make_dimension_context(2);
    const auto mono = check_c_monotonicity(plan, ctx, ctx.lambda_hat, n);
    EXPECT_EQ(mono.concave_violations, 0u);
  }
}

TEST(Monotonicity, LambdaAboveOneIsOneRegion) {
  const auto ctx = make_dimension_context(2);
  const auto inst = discretized(2, 1.0, 40);
  const auto plan = solve_transport(inst);
  const auto report = check_c_monotonicity(plan, ctx, ctx.lambda_hat, 40);
  EXPECT_EQ(report.separator, kPi);
  EXPECT_EQ(report.convex_points, 0u);
  EXPECT_EQ(report.band_points, 0u);
  EXPECT_EQ(report.concave_points, plan.support.size());
}

TEST(Monotonicity, ReportedAtModerateLambda) {
  const auto ctx = make_dimension_context(2);
  const double lambda = 0.7858;
  const std::size_t n = 200;
  const auto w = marginal_weights(2, n);
  TransportInstance inst{cost_matrix(ctx, lambda, n).entries, w.weights, w.weights};
  const auto plan = solve_transport(inst);
  const auto report = check_c_monotonicity(plan, ctx, lambda, n);
  EXPECT_NEAR(report.separator, kPi - std::asin(lambda_to_Lambda(ctx, lambda)), 1e-15);
  EXPECT_EQ(report.concave_points + report.convex_points + report.band_points, plan.support.size());
  EXPECT_GE(report.violation_fraction(), 0.0);
  EXPECT_LE(report.violation_fraction(), 0.1);
}

TEST(VertexEnumeration, TinyHandInstance) {
  TransportInstance inst{{1, 3, 2, 1}, {2, 1}, {1, 2}};
  VertexEnumerationStats stats;
  EXPECT_DOUBLE_EQ(enumerate_vertex_minimum(inst, &stats), 1 * 1 + 1 * 3 + 1 * 1);
  EXPECT_GT(stats.moves, 0u);
  TransportInstance big;
  big.row_marginal.assign(13, 1.0);
  big.col_marginal.assign(1, 13.0);
  big.cost.assign(13, 1.0);
  EXPECT_THROW(enumerate_vertex_minimum(big), InvalidInput);
}
