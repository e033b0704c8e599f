#include "visbound/vertex_enumeration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "visbound/errors.hpp"

namespace visbound {
namespace {

constexpr double kFitTolerance = 1e-13;
constexpr double kKeyResolution = 1e-12;
constexpr std::size_t kMaxLines = 12;

class Enumerator {
 public:
  Enumerator(const TransportInstance& instance, VertexEnumerationStats* stats)
      : m_(instance.rows()), k_(instance.cols()), cost_(instance.cost), stats_(stats) {
    amounts_.insert(amounts_.end(), instance.row_marginal.begin(), instance.row_marginal.end());
    amounts_.insert(amounts_.end(), instance.col_marginal.begin(), instance.col_marginal.end());
  }

  double run() {
    const std::uint32_t rows = (1u << m_) - 1;
    const std::uint32_t cols = (1u << k_) - 1;
    return best(rows, cols);
  }

 private:
  double cost(std::size_t i, std::size_t j) const { return cost_[i * k_ + j]; }

  std::vector<long long> key(std::uint32_t rows, std::uint32_t cols) const {
    std::vector<long long> out;
    out.reserve(amounts_.size() + 1);
    out.push_back(static_cast<long long>(rows) << 32 | cols);
    for (std::size_t i = 0; i < m_; ++i) {
      if (rows >> i & 1u) out.push_back(std::llround(amounts_[i] / kKeyResolution));
    }
    for (std::size_t j = 0; j < k_; ++j) {
      if (cols >> j & 1u) out.push_back(std::llround(amounts_[m_ + j] / kKeyResolution));
    }
    return out;
  }

  double best(std::uint32_t rows, std::uint32_t cols) {
    const int row_count = std::popcount(rows);
    const int col_count = std::popcount(cols);
    if (row_count == 1 && col_count == 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(rows));
      const auto j = static_cast<std::size_t>(std::countr_zero(cols));
      return cost(i, j) * amounts_[i];
    }
    auto k = key(rows, cols);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    if (stats_) ++stats_->states;

    double result = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_ && row_count >= 2; ++i) {
      if (!(rows >> i & 1u)) continue;
      for (std::size_t j = 0; j < k_; ++j) {
        if (!(cols >> j & 1u)) continue;
        result = std::min(result, eliminate(i, m_ + j, cost(i, j), rows & ~(1u << i), cols));
      }
    }
    for (std::size_t j = 0; j < k_ && col_count >= 2; ++j) {
      if (!(cols >> j & 1u)) continue;
      for (std::size_t i = 0; i < m_; ++i) {
        if (!(rows >> i & 1u)) continue;
        result = std::min(result, eliminate(m_ + j, i, cost(i, j), rows, cols & ~(1u << j)));
      }
    }
    memo_.emplace(std::move(k), result);
    return result;
  }

  // Ship all of `line` to `partner` and recurse on the remaining lines.
  double eliminate(std::size_t line, std::size_t partner, double unit_cost, std::uint32_t rows,
                   std::uint32_t cols) {
    const double amount = amounts_[line];
    const double room = amounts_[partner];
    if (amount > room + kFitTolerance) return std::numeric_limits<double>::infinity();
    if (stats_) ++stats_->moves;
    amounts_[partner] = std::max(0.0, room - amount);
    const double value = unit_cost * amount + best(rows, cols);
    amounts_[partner] = room;
    return value;
  }

  std::size_t m_;
  std::size_t k_;
  const std::vector<double>& cost_;
  VertexEnumerationStats* stats_;
  std::vector<double> amounts_;
  std::map<std::vector<long long>, double> memo_;
};

}  // namespace

double enumerate_vertex_minimum(const TransportInstance& instance, VertexEnumerationStats* stats) {
  validate_instance(instance);
  if (instance.rows() > kMaxLines || instance.cols() > kMaxLines) {
    throw InvalidInput("enumerate_vertex_minimum: at most 12 rows and 12 columns");
  }
  Enumerator enumerator(instance, stats);
  return enumerator.run();
}

}  // namespace visbound
