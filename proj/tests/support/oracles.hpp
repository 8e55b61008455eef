#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "patchtrack/geometry.hpp"

// Test-only oracles, kept independent of the implementation paths they check.
namespace oracles {

// Unit-grid cell counting for integer-coordinate boxes (exact) and the GIoU
// variant derived from the same counts.
double raster_iou(const patchtrack::BBox& a, const patchtrack::BBox& b);
double raster_giou(const patchtrack::BBox& a, const patchtrack::BBox& b);

// Cell-center sampling at a configurable resolution for fractional boxes.
double raster_iou_fine(const patchtrack::BBox& a, const patchtrack::BBox& b,
                       double resolution);

// Scalar closed forms coded corner-wise, term by term.
double scalar_diou(const patchtrack::BBox& a, const patchtrack::BBox& b);
double scalar_ciou(const patchtrack::BBox& a, const patchtrack::BBox& b);

// Vertical-interval IoU.
double interval_height_iou(const patchtrack::BBox& a, const patchtrack::BBox& b);

// Exhaustive gated assignment: maximize cardinality, then minimize total
// cost, then lexicographically smallest match set by (row, col).
struct BruteForceResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  int cardinality = 0;
  double total = 0.0;
};
BruteForceResult brute_force_assignment(const patchtrack::CostMatrix& cost,
                                        double gate);

// Linear-scan argmax oracle for greedy_best_iou.
std::optional<std::size_t> scan_best_iou(const patchtrack::BBox& anchor,
                                         const std::vector<patchtrack::BBox>& cs,
                                         patchtrack::IoUKind kind,
                                         double min_score);

// FNV-1a 64-bit fingerprint for golden-output checks.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace oracles
