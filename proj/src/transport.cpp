#include "visbound/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "visbound/discretization.hpp"
#include "visbound/errors.hpp"

namespace visbound {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Tree flows recomputed from the basis may come out slightly negative from
// rounding; anything below this is a genuinely infeasible basis.
constexpr double kDriftTolerance = 1e-9;
constexpr int kMaxPolishRounds = 8;

}  // namespace

void validate_instance(const TransportInstance& instance) {
  const std::size_t m = instance.rows();
  const std::size_t k = instance.cols();
  if (m == 0 || k == 0) throw InvalidInput("transport instance has no rows or columns");
  if (instance.cost.size() != m * k) {
    throw InvalidInput("cost has " + std::to_string(instance.cost.size()) + " entries, expected " +
                       std::to_string(m * k));
  }
  for (double c : instance.cost) {
    if (!std::isfinite(c)) throw InvalidInput("cost matrix has a non-finite entry");
  }
  auto check_marginal = [](const std::vector<double>& marginal, const char* name) {
    for (double w : marginal) {
      if (!std::isfinite(w) || w < 0.0) {
        throw InvalidInput(std::string(name) + " marginal has a negative or non-finite entry");
      }
    }
  };
  check_marginal(instance.row_marginal, "row");
  check_marginal(instance.col_marginal, "column");
  const double rows = std::accumulate(instance.row_marginal.begin(), instance.row_marginal.end(), 0.0);
  const double cols = std::accumulate(instance.col_marginal.begin(), instance.col_marginal.end(), 0.0);
  if (std::abs(rows - cols) > kBalanceTolerance * std::max(1.0, rows)) {
    throw Infeasible("unbalanced transportation instance: row mass " + std::to_string(rows) +
                     " vs column mass " + std::to_string(cols));
  }
}

TransportSolver::TransportSolver(std::vector<double> row_marginal, std::vector<double> col_marginal)
    : m_(row_marginal.size()),
      k_(col_marginal.size()),
      row_marginal_(std::move(row_marginal)),
      col_marginal_(std::move(col_marginal)),
      root_(static_cast<int>(m_ + k_)) {
  TransportInstance probe;
  probe.row_marginal = row_marginal_;
  probe.col_marginal = col_marginal_;
  probe.cost.assign(m_ * k_, 0.0);
  validate_instance(probe);
}

int TransportSolver::source(std::size_t arc) const {
  const std::size_t real = m_ * k_;
  if (arc < real) return static_cast<int>(arc / k_);
  const int v = static_cast<int>(arc - real);
  return art_up_[v] ? v : root_;
}

int TransportSolver::target(std::size_t arc) const {
  const std::size_t real = m_ * k_;
  if (arc < real) return static_cast<int>(m_ + arc % k_);
  const int v = static_cast<int>(arc - real);
  return art_up_[v] ? root_ : v;
}

double TransportSolver::arc_cost(std::size_t arc) const {
  return arc < m_ * k_ ? cost_[arc] : art_cost_;
}

double TransportSolver::reduced_cost(std::size_t arc) const {
  return arc_cost(arc) - potential_[source(arc)] + potential_[target(arc)];
}

double TransportSolver::supply(int node) const {
  if (node < static_cast<int>(m_)) return row_marginal_[node];
  if (node < root_) return -col_marginal_[node - m_];
  return 0.0;
}

void TransportSolver::detach_child(int node) {
  const int p = parent_[node];
  const int prev = prev_sibling_[node];
  const int next = next_sibling_[node];
  if (prev != kNone) {
    next_sibling_[prev] = next;
  } else {
    first_child_[p] = next;
  }
  if (next != kNone) prev_sibling_[next] = prev;
  prev_sibling_[node] = next_sibling_[node] = kNone;
}

void TransportSolver::attach_child(int parent, int node) {
  const int head = first_child_[parent];
  next_sibling_[node] = head;
  prev_sibling_[node] = kNone;
  if (head != kNone) prev_sibling_[head] = node;
  first_child_[parent] = node;
}

void TransportSolver::recompute_potentials_from(int start) {
  stack_.clear();
  stack_.push_back(start);
  while (!stack_.empty()) {
    const int x = stack_.back();
    stack_.pop_back();
    const int p = parent_[x];
    const double c = arc_cost(static_cast<std::size_t>(pred_[x]));
    potential_[x] = up_[x] ? potential_[p] + c : potential_[p] - c;
    depth_[x] = depth_[p] + 1;
    for (int ch = first_child_[x]; ch != kNone; ch = next_sibling_[ch]) stack_.push_back(ch);
  }
}

void TransportSolver::init_tree() {
  const std::size_t nodes = m_ + k_ + 1;
  nontree_.assign(arc_count(), 1);
  flow_.assign(arc_count(), 0.0);
  art_up_.assign(m_ + k_, 1);
  parent_.assign(nodes, kNone);
  pred_.assign(nodes, kNone);
  up_.assign(nodes, 0);
  depth_.assign(nodes, 0);
  potential_.assign(nodes, 0.0);
  first_child_.assign(nodes, kNone);
  next_sibling_.assign(nodes, kNone);
  prev_sibling_.assign(nodes, kNone);

  // Every node hangs off the root through its artificial arc, oriented so the
  // arc carries |supply|; zero-supply nodes point towards the root, which keeps
  // the starting tree strongly feasible.
  for (int v = static_cast<int>(m_ + k_) - 1; v >= 0; --v) {
    const std::size_t arc = m_ * k_ + static_cast<std::size_t>(v);
    const double s = supply(v);
    art_up_[v] = s >= 0.0 ? 1 : 0;
    flow_[arc] = std::abs(s);
    nontree_[arc] = 0;
    parent_[v] = root_;
    pred_[v] = static_cast<long>(arc);
    up_[v] = art_up_[v];
    attach_child(root_, v);
  }
  block_size_ = std::max<std::size_t>(
      10, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(arc_count())))));
  next_arc_ = 0;
  initialized_ = true;
}

long TransportSolver::find_entering() {
  const std::size_t total = arc_count();
  const std::size_t real = m_ * k_;
  double best = -kPivotTolerance;
  long best_arc = kNone;
  std::size_t budget = block_size_;
  std::size_t e = next_arc_;
  std::size_t i = e < real ? e / k_ : 0;
  std::size_t j = e < real ? e % k_ : 0;
  const double* pot = potential_.data();
  const double* col_pot = potential_.data() + m_;
  for (std::size_t visited = 0; visited < total; ++visited) {
    if (e < real) {
      if (nontree_[e]) {
        const double rc = cost_[e] - pot[i] + col_pot[j];
        if (rc < best) {
          best = rc;
          best_arc = static_cast<long>(e);
        }
      }
      if (++j == k_) {
        j = 0;
        ++i;
      }
    } else if (nontree_[e]) {
      const double rc = reduced_cost(e);
      if (rc < best) {
        best = rc;
        best_arc = static_cast<long>(e);
      }
    }
    if (++e == total) {
      e = 0;
      i = 0;
      j = 0;
    }
    if (--budget == 0) {
      if (best_arc != kNone) {
        next_arc_ = e;
        return best_arc;
      }
      budget = block_size_;
    }
  }
  next_arc_ = e;
  return best_arc;
}

void TransportSolver::pivot(std::size_t entering) {
  const int s = source(entering);
  const int t = target(entering);

  int a = s;
  int b = t;
  while (a != b) {
    if (depth_[a] > depth_[b]) {
      a = parent_[a];
    } else if (depth_[b] > depth_[a]) {
      b = parent_[b];
    } else {
      a = parent_[a];
      b = parent_[b];
    }
  }
  const int join = a;

  // Flow circulates s -> t, up from t to the join, then down to s. The leaving
  // arc is the last blocking arc met along that orientation starting at the
  // join: ties on the t side win, and on the s side the one nearest s wins.
  double delta = kInf;
  int leaving_node = kNone;
  int side = 0;
  for (int x = s; x != join; x = parent_[x]) {
    if (up_[x]) {
      const double f = std::max(0.0, flow_[pred_[x]]);
      if (f < delta) {
        delta = f;
        leaving_node = x;
        side = 1;
      }
    }
  }
  for (int x = t; x != join; x = parent_[x]) {
    if (!up_[x]) {
      const double f = std::max(0.0, flow_[pred_[x]]);
      if (f <= delta) {
        delta = f;
        leaving_node = x;
        side = 2;
      }
    }
  }
  if (leaving_node == kNone) throw SolverError("transport solver: unbounded pivot cycle");

  if (delta > 0.0) {
    flow_[entering] += delta;
    for (int x = s; x != join; x = parent_[x]) flow_[pred_[x]] += up_[x] ? -delta : delta;
    for (int x = t; x != join; x = parent_[x]) flow_[pred_[x]] += up_[x] ? delta : -delta;
  }
  const long leaving = pred_[leaving_node];
  flow_[leaving] = 0.0;
  nontree_[entering] = 0;
  nontree_[leaving] = 1;

  // Re-hang the subtree cut off by the leaving arc: the path from the entering
  // endpoint up to the leaving node is reversed.
  const int u_in = side == 1 ? s : t;
  const int v_in = side == 1 ? t : s;
  path_.clear();
  path_pred_.clear();
  path_up_.clear();
  for (int x = u_in;; x = parent_[x]) {
    path_.push_back(x);
    path_pred_.push_back(pred_[x]);
    path_up_.push_back(up_[x]);
    if (x == leaving_node) break;
  }
  for (int x : path_) detach_child(x);
  parent_[u_in] = v_in;
  pred_[u_in] = static_cast<long>(entering);
  up_[u_in] = source(entering) == u_in ? 1 : 0;
  attach_child(v_in, u_in);
  for (std::size_t idx = 1; idx < path_.size(); ++idx) {
    const int x = path_[idx];
    parent_[x] = path_[idx - 1];
    pred_[x] = path_pred_[idx - 1];
    up_[x] = path_up_[idx - 1] ? 0 : 1;
    attach_child(path_[idx - 1], x);
  }
  recompute_potentials_from(u_in);
}

void TransportSolver::recompute_tree_flows() {
  // Preorder from the root, then accumulate subtree supplies bottom-up: the
  // arc above a subtree carries exactly its net supply.
  std::vector<int> order;
  order.reserve(m_ + k_);
  stack_.clear();
  for (int ch = first_child_[root_]; ch != kNone; ch = next_sibling_[ch]) stack_.push_back(ch);
  while (!stack_.empty()) {
    const int x = stack_.back();
    stack_.pop_back();
    order.push_back(x);
    for (int ch = first_child_[x]; ch != kNone; ch = next_sibling_[ch]) stack_.push_back(ch);
  }
  std::vector<double> excess(m_ + k_ + 1, 0.0);
  for (int v = 0; v < root_; ++v) excess[v] = supply(v);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int x = *it;
    double f = up_[x] ? excess[x] : -excess[x];
    if (f < 0.0) {
      if (f < -kDriftTolerance) {
        throw SolverError("transport solver: basis became infeasible (flow " + std::to_string(f) +
                          ")");
      }
      f = 0.0;
    }
    flow_[pred_[x]] = f;
    excess[parent_[x]] += excess[x];
  }
}

double TransportSolver::worst_reduced_cost() const {
  double worst = 0.0;
  for (std::size_t e = 0; e < arc_count(); ++e) {
    if (nontree_[e]) worst = std::min(worst, reduced_cost(e));
  }
  return worst;
}

TransportPlan TransportSolver::solve(std::span<const double> cost) {
  if (cost.size() != m_ * k_) {
    throw InvalidInput("cost has " + std::to_string(cost.size()) + " entries, expected " +
                       std::to_string(m_ * k_));
  }
  double max_abs = 0.0;
  for (double c : cost) {
    if (!std::isfinite(c)) throw InvalidInput("cost matrix has a non-finite entry");
    max_abs = std::max(max_abs, std::abs(c));
  }
  cost_.assign(cost.begin(), cost.end());
  art_cost_ = (max_abs + 1.0) * static_cast<double>(m_ + k_ + 1);

  if (!initialized_) init_tree();
  potential_[root_] = 0.0;
  depth_[root_] = 0;
  for (int ch = first_child_[root_]; ch != kNone; ch = next_sibling_[ch]) {
    recompute_potentials_from(ch);
  }

  iterations_ = 0;
  const std::size_t max_iterations = 200 * arc_count() + 10000;
  for (int round = 0;; ++round) {
    for (long e = find_entering(); e != kNone; e = find_entering()) {
      pivot(static_cast<std::size_t>(e));
      if (++iterations_ > max_iterations) {
        throw SolverError("transport solver: iteration cap exceeded");
      }
    }
    // Re-derive the basic solution from the tree to shed accumulated rounding.
    recompute_tree_flows();
    for (int ch = first_child_[root_]; ch != kNone; ch = next_sibling_[ch]) {
      recompute_potentials_from(ch);
    }
    if (worst_reduced_cost() >= -kPivotTolerance) break;
    if (round >= kMaxPolishRounds) {
      throw SolverError("transport solver: optimality could not be certified");
    }
  }

  for (std::size_t v = 0; v < m_ + k_; ++v) {
    if (flow_[m_ * k_ + v] > kDriftTolerance) {
      throw Infeasible("transport solver: artificial arc still carries flow");
    }
  }
  return extract_plan();
}

TransportPlan TransportSolver::extract_plan() const {
  TransportPlan plan;
  plan.iterations = iterations_;
  const std::size_t real = m_ * k_;
  std::vector<std::size_t> basic;
  for (int v = 0; v < root_; ++v) {
    const auto arc = static_cast<std::size_t>(pred_[v]);
    if (arc < real) basic.push_back(arc);
  }
  std::sort(basic.begin(), basic.end());
  for (std::size_t arc : basic) {
    const double mass = flow_[arc];
    if (mass > 0.0) plan.objective += cost_[arc] * mass;
    if (mass > kZeroMass) plan.support.push_back({arc / k_, arc % k_, mass});
  }
  plan.row_duals.resize(m_);
  plan.col_duals.resize(k_);
  const double shift = potential_[0];
  for (std::size_t i = 0; i < m_; ++i) plan.row_duals[i] = potential_[i] - shift;
  for (std::size_t j = 0; j < k_; ++j) plan.col_duals[j] = -potential_[m_ + j] + shift;
  return plan;
}

TransportPlan solve_transport(const TransportInstance& instance) {
  validate_instance(instance);
  TransportSolver solver(instance.row_marginal, instance.col_marginal);
  return solver.solve(instance.cost);
}

double certificate_violation(const TransportInstance& instance, const TransportPlan& plan) {
  const std::size_t m = instance.rows();
  const std::size_t k = instance.cols();
  double violation = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double rc = instance.cost[i * k + j] - plan.row_duals[i] - plan.col_duals[j];
      violation = std::max(violation, -rc);
    }
  }
  for (const auto& entry : plan.support) {
    const double rc =
        instance.cost[entry.i * k + entry.j] - plan.row_duals[entry.i] - plan.col_duals[entry.j];
    violation = std::max(violation, std::abs(rc));
  }
  return violation;
}

double marginal_violation(const TransportInstance& instance, const TransportPlan& plan) {
  std::vector<double> rows(instance.rows(), 0.0);
  std::vector<double> cols(instance.cols(), 0.0);
  for (const auto& entry : plan.support) {
    rows[entry.i] += entry.mass;
    cols[entry.j] += entry.mass;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    worst = std::max(worst, std::abs(rows[i] - instance.row_marginal[i]));
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    worst = std::max(worst, std::abs(cols[j] - instance.col_marginal[j]));
  }
  return worst;
}

double MonotonicityReport::violation_fraction() const {
  const std::size_t pairs = concave_pairs + convex_pairs;
  if (pairs == 0) return 0.0;
  return static_cast<double>(concave_violations + convex_violations) / static_cast<double>(pairs);
}

MonotonicityReport check_c_monotonicity(const TransportPlan& plan, const DimensionContext& ctx,
                                        double lambda, std::size_t n) {
  MonotonicityReport report;
  const double Lambda = lambda_to_Lambda(ctx, lambda);
  const bool split = Lambda < 1.0;
  report.separator = split ? kPi - std::asin(Lambda) : kPi;
  report.band = split ? kPi / (2.0 * static_cast<double>(n)) : 0.0;

  struct Point {
    double phi;
    double psi;
  };
  std::vector<Point> concave;
  std::vector<Point> convex;
  for (const auto& entry : plan.support) {
    const Point p{cell_midpoint(n, entry.i), cell_midpoint(n, entry.j)};
    const double theta = p.phi + p.psi;
    if (!split || theta < report.separator - report.band) {
      concave.push_back(p);
    } else if (theta > report.separator + report.band) {
      convex.push_back(p);
    } else {
      ++report.band_points;
    }
  }
  report.concave_points = concave.size();
  report.convex_points = convex.size();
  auto count = [](const std::vector<Point>& pts, bool increasing, std::size_t& pairs,
                  std::size_t& violations) {
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        const double prod = (pts[a].phi - pts[b].phi) * (pts[a].psi - pts[b].psi);
        ++pairs;
        if (increasing ? prod < 0.0 : prod > 0.0) ++violations;
      }
    }
  };
  count(concave, true, report.concave_pairs, report.concave_violations);
  count(convex, false, report.convex_pairs, report.convex_violations);
  return report;
}

double diagonal_oracle(int d, std::size_t n, const std::function<double(double)>& kappa) {
  const auto w = marginal_weights(d, n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) total += w.weights[k] * kappa(2.0 * cell_midpoint(n, k));
  return total;
}

}  // namespace visbound
