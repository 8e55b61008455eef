#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace patchtrack {

/// Axis-aligned box in pixel coordinates, top-left origin.
struct BBox {
  double x = 0.0;  // left edge
  double y = 0.0;  // top edge
  double w = 0.0;
  double h = 0.0;

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }
};

enum class CostKind { AreaIoU, HeightIoU };
enum class IoUKind { IoU, GIoU, DIoU, CIoU };

/// Intersection over union, 0 when disjoint.
double iou(const BBox& a, const BBox& b);

/// IoU minus enclosing-hull slack: IoU - |C \ (A∪B)| / |C|. Range (-1, 1].
double giou(const BBox& a, const BBox& b);

/// IoU minus squared center distance over squared hull diagonal. Range (-1, 1].
double diou(const BBox& a, const BBox& b);

/// diou minus the aspect-ratio consistency term α·v, clamped below at -1.
/// α is 0 when v is 0 so identical aspect ratios give exactly diou.
double ciou(const BBox& a, const BBox& b);

/// 1-D IoU of the vertical extents only; horizontal coordinates are ignored.
double height_iou(const BBox& a, const BBox& b);

double iou_score(IoUKind kind, const BBox& a, const BBox& b);

/// Dense row-major cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool empty() const { return rows == 0 || cols == 0; }
};

/// cost[i][j] = 1 - iou(rows[i], cols[j]) (AreaIoU) or 1 - height_iou (HeightIoU).
CostMatrix build_cost_matrix(std::span<const BBox> rows, std::span<const BBox> cols,
                             CostKind kind);

}  // namespace patchtrack
