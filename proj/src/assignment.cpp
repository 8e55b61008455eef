#include "patchtrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace patchtrack {

namespace {

// Shortest-augmenting-path LAP with potentials on a dense square matrix.
// Returns row assigned to each column, every column assigned. O(n^3).
std::vector<int> solve_square(const std::vector<double>& a, int n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);  // p[j]: 1-based row on col j
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(n);
  for (int j = 1; j <= n; ++j) row_of_col[j - 1] = p[j] - 1;
  return row_of_col;
}

struct Solution {
  std::vector<Assignment::Match> matches;  // sorted by row
  int cardinality = 0;
  double total = 0.0;
};

// Canonical total: sum in ascending-row order so equal match sets always
// produce bitwise-equal totals.
double canonical_total(const std::vector<Assignment::Match>& matches) {
  double t = 0.0;
  for (const auto& m : matches) t += m.cost;
  return t;
}

// Solve the gated LAP restricted to the given row/col index subsets.
// Forbidden real edges get a large dyadic cost so any extra feasible match
// beats any cost difference; padding absorbs the rest at zero.
Solution solve_restricted(const CostMatrix& cost, double gate, double big,
                          std::span<const std::size_t> rows,
                          std::span<const std::size_t> cols) {
  Solution sol;
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(cols.size());
  if (r == 0 || c == 0) return sol;
  const int n = std::max(r, c);
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const double e = cost.at(rows[i], cols[j]);
      a[i * n + j] = e <= gate ? e : big;
    }
  }
  const auto row_of_col = solve_square(a, n);
  for (int j = 0; j < c; ++j) {
    const int i = row_of_col[j];
    if (i < 0 || i >= r) continue;
    const double e = cost.at(rows[i], cols[j]);
    if (e <= gate) sol.matches.push_back({rows[i], cols[j], e});
  }
  std::sort(sol.matches.begin(), sol.matches.end(),
            [](const auto& x, const auto& y) { return x.row < y.row; });
  sol.cardinality = static_cast<int>(sol.matches.size());
  sol.total = canonical_total(sol.matches);
  return sol;
}

// Power-of-two bound exceeding any achievable total of feasible edges, so
// cardinality dominates cost exactly even on dyadic-rational inputs.
double forbidden_cost(const CostMatrix& cost, double gate) {
  double max_feasible = 0.0;
  for (double e : cost.data) {
    if (e <= gate && e > max_feasible) max_feasible = e;
  }
  const double bound =
      (max_feasible + 1.0) * static_cast<double>(std::max(cost.rows, cost.cols) + 1);
  double big = 2.0;
  while (big <= bound) big *= 2.0;
  return big;
}

}  // namespace

Assignment hungarian_solve(const CostMatrix& cost, double gate) {
  Assignment out;
  const std::size_t R = cost.rows;
  const std::size_t C = cost.cols;
  if (R == 0 || C == 0) {
    for (std::size_t i = 0; i < R; ++i) out.unmatched_rows.push_back(i);
    for (std::size_t j = 0; j < C; ++j) out.unmatched_cols.push_back(j);
    return out;
  }

  const double big = forbidden_cost(cost, gate);

  // Greedy lexicographic construction: for each row in order, keep the
  // smallest column whose forced match still reaches the optimal
  // (cardinality, total cost); otherwise the row stays unmatched in every
  // optimum that extends the fixed prefix.
  std::vector<Assignment::Match> fixed;
  std::vector<std::size_t> free_cols(C);
  for (std::size_t j = 0; j < C; ++j) free_cols[j] = j;

  for (std::size_t i = 0; i < R; ++i) {
    std::vector<std::size_t> rest_rows;
    for (std::size_t k = i + 1; k < R; ++k) rest_rows.push_back(k);

    bool have_best = false;
    int best_card = 0;
    double best_total = 0.0;
    std::size_t best_col = 0;
    bool best_is_match = false;

    auto consider = [&](const std::vector<Assignment::Match>& full, bool is_match,
                        std::size_t col) {
      const int card = static_cast<int>(full.size());
      const double total = canonical_total(full);
      if (!have_best || card > best_card ||
          (card == best_card && total < best_total)) {
        have_best = true;
        best_card = card;
        best_total = total;
        best_col = col;
        best_is_match = is_match;
      }
    };

    for (std::size_t j : free_cols) {
      const double e = cost.at(i, j);
      if (e > gate) continue;
      std::vector<std::size_t> rest_cols;
      for (std::size_t c : free_cols)
        if (c != j) rest_cols.push_back(c);
      Solution sub = solve_restricted(cost, gate, big, rest_rows, rest_cols);
      std::vector<Assignment::Match> full = fixed;
      full.push_back({i, j, e});
      full.insert(full.end(), sub.matches.begin(), sub.matches.end());
      consider(full, true, j);
    }
    {
      Solution sub = solve_restricted(cost, gate, big, rest_rows, free_cols);
      std::vector<Assignment::Match> full = fixed;
      full.insert(full.end(), sub.matches.begin(), sub.matches.end());
      consider(full, false, 0);
    }

    if (best_is_match) {
      fixed.push_back({i, best_col, cost.at(i, best_col)});
      free_cols.erase(std::find(free_cols.begin(), free_cols.end(), best_col));
    }
  }

  out.matches = std::move(fixed);
  std::vector<char> row_used(R, 0), col_used(C, 0);
  for (const auto& m : out.matches) {
    row_used[m.row] = 1;
    col_used[m.col] = 1;
  }
  for (std::size_t i = 0; i < R; ++i)
    if (!row_used[i]) out.unmatched_rows.push_back(i);
  for (std::size_t j = 0; j < C; ++j)
    if (!col_used[j]) out.unmatched_cols.push_back(j);
  return out;
}

std::optional<std::size_t> greedy_best_iou(const BBox& anchor,
                                           std::span<const BBox> candidates,
                                           IoUKind kind, double min_score) {
  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = iou_score(kind, anchor, candidates[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  if (!best || best_score < min_score) return std::nullopt;
  return best;
}

}  // namespace patchtrack
