#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "visbound/constants.hpp"

namespace visbound {

/// Balanced transportation problem: minimize sum c_ij x_ij subject to row sums
/// equal to `row_marginal`, column sums equal to `col_marginal`, x >= 0.
/// `cost` is row-major with rows() * cols() entries.
struct TransportInstance {
  std::vector<double> cost;
  std::vector<double> row_marginal;
  std::vector<double> col_marginal;

  std::size_t rows() const { return row_marginal.size(); }
  std::size_t cols() const { return col_marginal.size(); }
};

struct PlanEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

/// Optimal basic solution with a dual certificate: c_ij - u_i - v_j >= 0
/// everywhere and = 0 on the support.
struct TransportPlan {
  std::vector<PlanEntry> support;
  double objective = 0.0;
  std::vector<double> row_duals;
  std::vector<double> col_duals;
  std::size_t iterations = 0;
};

inline constexpr double kBalanceTolerance = 1e-12;
inline constexpr double kPivotTolerance = 1e-11;
inline constexpr double kZeroMass = 1e-12;

/// Network simplex on the bipartite transportation graph, with a big-M
/// artificial root, block-search pricing and strongly feasible spanning trees
/// (Cunningham's leaving-arc rule), so degenerate pivots cannot cycle.
///
/// The solver keeps its basis between calls: a later `solve` with different
/// costs but the same marginals starts from the previous optimal tree, which
/// stays primal feasible. One solver instance is not thread-safe; use one per
/// worker.
class TransportSolver {
 public:
  TransportSolver(std::vector<double> row_marginal, std::vector<double> col_marginal);

  /// Throws InvalidInput for a cost of the wrong size or with non-finite entries.
  TransportPlan solve(std::span<const double> cost);

  /// Forget the current basis; the next solve starts from the artificial tree.
  void reset() { initialized_ = false; }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return k_; }

 private:
  static constexpr int kNone = -1;

  std::size_t arc_count() const { return m_ * k_ + m_ + k_; }
  int source(std::size_t arc) const;
  int target(std::size_t arc) const;
  double arc_cost(std::size_t arc) const;
  double reduced_cost(std::size_t arc) const;
  double supply(int node) const;

  void init_tree();
  long find_entering();
  void pivot(std::size_t entering);
  void detach_child(int node);
  void attach_child(int parent, int node);
  void recompute_potentials_from(int start);
  void recompute_tree_flows();
  double worst_reduced_cost() const;
  TransportPlan extract_plan() const;

  std::size_t m_;
  std::size_t k_;
  std::vector<double> row_marginal_;
  std::vector<double> col_marginal_;
  std::vector<double> cost_;
  double art_cost_ = 0.0;
  bool initialized_ = false;

  int root_;
  std::vector<std::int8_t> nontree_;   // 1 for arcs at their lower bound, 0 for tree arcs
  std::vector<double> flow_;
  std::vector<std::uint8_t> art_up_;   // artificial arc v: v -> root when set, else root -> v
  std::vector<int> parent_;
  std::vector<long> pred_;             // tree arc joining a node to its parent
  std::vector<std::uint8_t> up_;       // pred arc points from the node to its parent
  std::vector<int> depth_;
  std::vector<double> potential_;
  std::vector<int> first_child_;
  std::vector<int> next_sibling_;
  std::vector<int> prev_sibling_;
  std::vector<int> stack_;
  std::vector<int> path_;
  std::vector<long> path_pred_;
  std::vector<std::uint8_t> path_up_;
  std::size_t block_size_ = 0;
  std::size_t next_arc_ = 0;
  std::size_t iterations_ = 0;
};

/// Throws Infeasible for unbalanced marginals and InvalidInput for malformed
/// instances.
TransportPlan solve_transport(const TransportInstance& instance);

/// Largest violation of the optimality certificate (negative reduced cost
/// anywhere, or nonzero reduced cost on the support). Never negative; values
/// near rounding level certify optimality.
double certificate_violation(const TransportInstance& instance, const TransportPlan& plan);

/// Largest absolute deviation of the plan's row and column sums from the marginals.
double marginal_violation(const TransportInstance& instance, const TransportPlan& plan);

/// Sanity checks shared by the solver entry points.
void validate_instance(const TransportInstance& instance);

/// Pairwise monotonicity of the plan's support, split by the inflection line
/// phi + psi = pi - asin(Lambda). Points in the concave region should form a
/// monotone increasing set, points in the convex region a decreasing one.
/// Points within one cell of the separator are counted in `band_points` and
/// excluded from the pair counts.
struct MonotonicityReport {
  double separator = 0.0;
  double band = 0.0;
  std::size_t concave_points = 0;
  std::size_t convex_points = 0;
  std::size_t band_points = 0;
  std::size_t concave_pairs = 0;
  std::size_t concave_violations = 0;
  std::size_t convex_pairs = 0;
  std::size_t convex_violations = 0;

  double violation_fraction() const;
};

MonotonicityReport check_c_monotonicity(const TransportPlan& plan, const DimensionContext& ctx,
                                        double lambda, std::size_t n);

/// sum_k b_k kappa(2 mid_k): the value of the diagonal plan for a cost
/// depending on phi + psi only.
double diagonal_oracle(int d, std::size_t n, const std::function<double(double)>& kappa);

}  // namespace visbound
