#include "patchtrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace patchtrack {

namespace {

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x, b.x);
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
  if (ih <= 0.0) return 0.0;
  return iw * ih;
}

double union_area(const BBox& a, const BBox& b, double inter) {
  return a.area() + b.area() - inter;
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  return inter / union_area(a, b, inter);
}

double giou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = union_area(a, b, inter);
  const double hull_w = std::max(a.x2(), b.x2()) - std::min(a.x, b.x);
  const double hull_h = std::max(a.y2(), b.y2()) - std::min(a.y, b.y);
  const double hull = hull_w * hull_h;
  const double overlap = inter > 0.0 ? inter / uni : 0.0;
  return overlap - (hull - uni) / hull;
}

double diou(const BBox& a, const BBox& b) {
  const double dx = a.cx() - b.cx();
  const double dy = a.cy() - b.cy();
  const double hull_w = std::max(a.x2(), b.x2()) - std::min(a.x, b.x);
  const double hull_h = std::max(a.y2(), b.y2()) - std::min(a.y, b.y);
  const double diag2 = hull_w * hull_w + hull_h * hull_h;
  return iou(a, b) - (dx * dx + dy * dy) / diag2;
}

double ciou(const BBox& a, const BBox& b) {
  const double base = iou(a, b);
  const double d = diou(a, b);
  const double da = std::atan(a.w / a.h) - std::atan(b.w / b.h);
  const double v = (4.0 / (std::numbers::pi * std::numbers::pi)) * da * da;
  if (v == 0.0) return d;
  const double alpha = v / ((1.0 - base) + v);
  return std::max(d - alpha * v, -1.0);
}

double height_iou(const BBox& a, const BBox& b) {
  const double inter = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
  if (inter <= 0.0) return 0.0;
  const double uni = std::max(a.y2(), b.y2()) - std::min(a.y, b.y);
  return inter / uni;
}

double iou_score(IoUKind kind, const BBox& a, const BBox& b) {
  switch (kind) {
    case IoUKind::IoU:
      return iou(a, b);
    case IoUKind::GIoU:
      return giou(a, b);
    case IoUKind::DIoU:
      return diou(a, b);
    case IoUKind::CIoU:
      return ciou(a, b);
  }
  return 0.0;
}

CostMatrix build_cost_matrix(std::span<const BBox> rows, std::span<const BBox> cols,
                             CostKind kind) {
  CostMatrix m(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double score = kind == CostKind::AreaIoU ? iou(rows[i], cols[j])
                                                     : height_iou(rows[i], cols[j]);
      m.at(i, j) = 1.0 - score;
    }
  }
  return m;
}

}  // namespace patchtrack
