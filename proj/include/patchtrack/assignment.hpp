#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "patchtrack/geometry.hpp"

namespace patchtrack {

struct Assignment {
  struct Match {
    std::size_t row;
    std::size_t col;
    double cost;
  };
  std::vector<Match> matches;               // ascending by row
  std::vector<std::size_t> unmatched_rows;  // ascending
  std::vector<std::size_t> unmatched_cols;  // ascending
};

/// Optimal assignment on the subgraph of entries with cost <= gate.
///
/// Entries above the gate are forbidden edges. The solver maximizes match
/// cardinality first, then minimizes total cost, and among equal-cost optima
/// returns the lexicographically smallest match set ordered by (row, col).
/// Rectangular matrices are handled by implicit padding with forbidden edges;
/// an empty matrix yields everything unmatched.
Assignment hungarian_solve(const CostMatrix& cost, double gate);

/// Index of the candidate maximizing the selected IoU score, provided that
/// maximum is >= min_score. Ties break to the lowest index; nullopt when no
/// candidate qualifies or the list is empty.
std::optional<std::size_t> greedy_best_iou(const BBox& anchor,
                                           std::span<const BBox> candidates,
                                           IoUKind kind, double min_score);

}  // namespace patchtrack
