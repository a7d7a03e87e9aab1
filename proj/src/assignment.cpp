#include "memograph/assignment.hpp"

#include <algorithm>
#include <limits>

#include "memograph/errors.hpp"

namespace memograph {

namespace {

void check_square(std::span<const double> m, std::size_t n) {
  if (m.size() != n * n) {
    throw ArgumentError("assignment matrix must be n x n");
  }
}

// Sum of weight over a complete assignment, in row order.
double total_of(std::span<const double> weight, std::size_t n,
                const std::vector<std::size_t>& row_to_col) {
  double sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) sum += weight[r * n + row_to_col[r]];
  return sum;
}

}  // namespace

SquareAssignment solve_min_cost_assignment(std::span<const double> cost,
                                           std::size_t n) {
  check_square(cost, n);
  SquareAssignment out;
  if (n == 0) return out;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based bookkeeping; index 0 is the virtual root of each augmentation.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    col_owner[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r = col_owner[col0];
      double delta = kInf;
      std::size_t next = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double slack = cost[(r - 1) * n + (c - 1)] - u[r] - v[c];
        if (slack < min_slack[c]) {
          min_slack[c] = slack;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          next = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[col_owner[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = next;
    } while (col_owner[col0] != 0);
    do {
      const std::size_t prev = way[col0];
      col_owner[col0] = col_owner[prev];
      col0 = prev;
    } while (col0 != 0);
  }

  out.row_to_col.assign(n, 0);
  for (std::size_t c = 1; c <= n; ++c) out.row_to_col[col_owner[c] - 1] = c - 1;
  out.total = total_of(cost, n, out.row_to_col);
  return out;
}

SquareAssignment solve_max_weight_assignment(std::span<const double> weight,
                                             std::size_t n) {
  check_square(weight, n);
  if (n == 0) return {};

  auto solve_sub = [&](const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& cols) {
    const std::size_t k = rows.size();
    std::vector<double> cost(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        cost[i * k + j] = 1.0 - weight[rows[i] * n + cols[j]];
      }
    }
    return solve_min_cost_assignment(cost, k).row_to_col;
  };

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<std::size_t> best = solve_sub(all, all);
  for (std::size_t r = 0; r < n; ++r) best[r] = all[best[r]];
  const double optimum = total_of(weight, n, best);

  // Walk rows in order and pin each to the smallest column that still
  // admits an optimal completion. `best` always holds such a completion.
  std::vector<char> col_taken(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::size_t> rest_rows;
    for (std::size_t i = r + 1; i < n; ++i) rest_rows.push_back(i);
    for (std::size_t c = 0; c < best[r]; ++c) {
      if (col_taken[c]) continue;
      std::vector<std::size_t> rest_cols;
      for (std::size_t j = 0; j < n; ++j) {
        if (!col_taken[j] && j != c) rest_cols.push_back(j);
      }
      std::vector<std::size_t> candidate = best;
      candidate[r] = c;
      const auto sub = solve_sub(rest_rows, rest_cols);
      for (std::size_t i = 0; i < rest_rows.size(); ++i) {
        candidate[rest_rows[i]] = rest_cols[sub[i]];
      }
      if (total_of(weight, n, candidate) >= optimum - kAssignmentTieTolerance) {
        best = std::move(candidate);
        break;
      }
    }
    col_taken[best[r]] = 1;
  }

  SquareAssignment out;
  out.row_to_col = std::move(best);
  out.total = total_of(weight, n, out.row_to_col);
  return out;
}

}  // namespace memograph
