#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace memograph {

// Result of a square linear assignment: row i takes column row_to_col[i].
struct SquareAssignment {
  std::vector<std::size_t> row_to_col;
  double total = 0.0;  // objective value, summed over rows in row order
};

// Two assignment totals closer than this are treated as equal optima.
inline constexpr double kAssignmentTieTolerance = 1e-13;

// Minimum-cost perfect matching on an n x n row-major cost matrix using the
// shortest-augmenting-path Hungarian method with potentials, O(n^3).
SquareAssignment solve_min_cost_assignment(std::span<const double> cost,
                                           std::size_t n);

// Maximum-weight perfect matching on an n x n row-major weight matrix,
// solved as minimization of (1 - w). Among optimal assignments (within
// kAssignmentTieTolerance) the one whose row_to_col sequence is
// lexicographically smallest is returned.
SquareAssignment solve_max_weight_assignment(std::span<const double> weight,
                                             std::size_t n);

}  // namespace memograph
