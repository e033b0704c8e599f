#pragma once

#include <cstddef>

#include "visbound/transport.hpp"

namespace visbound {

struct VertexEnumerationStats {
  std::size_t states = 0;
  std::size_t moves = 0;
};

/// Exact minimum of a small transportation problem by exhausting its vertices.
///
/// Every vertex of the transportation polytope has a tree-shaped support, so it
/// can be built by repeatedly taking a row or column whose remaining amount
/// fits inside some partner on the other side, shipping it there in full and
/// dropping the line. The search runs over all such elimination orders with
/// memoization on the remaining lines and amounts. Meant for up to 6 rows and
/// 6 columns. Throws InvalidInput beyond 12 lines per side.
double enumerate_vertex_minimum(const TransportInstance& instance,
                                VertexEnumerationStats* stats = nullptr);

}  // namespace visbound
