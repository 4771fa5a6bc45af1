#pragma once

#include <algorithm>
#include <cmath>

#include "tablex/image.hpp"

namespace tablex {

/// Axis-aligned box in page coordinates. Area is (x_max - x_min) *
/// (y_max - y_min); for pixel boxes x_max/y_max are exclusive.
struct BBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }

  /// Non-degenerate with non-negative coordinates.
  bool valid() const {
    return x_min >= 0 && y_min >= 0 && x_min < x_max && y_min < y_max &&
           std::isfinite(x_max) && std::isfinite(y_max);
  }

  BBox translated(double dx, double dy) const {
    return {x_min + dx, y_min + dy, x_max + dx, y_max + dy};
  }

  static BBox from_rect(const PixelRect& r) {
    return {double(r.x), double(r.y), double(r.right()), double(r.bottom())};
  }
  /// Outward-rounded pixel rectangle.
  PixelRect to_rect() const {
    const int x0 = static_cast<int>(std::floor(x_min));
    const int y0 = static_cast<int>(std::floor(y_min));
    const int x1 = static_cast<int>(std::ceil(x_max));
    const int y1 = static_cast<int>(std::ceil(y_max));
    return {x0, y0, x1 - x0, y1 - y0};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  return w > 0 && h > 0 ? w * h : 0.0;
}

/// Intersection over union; 0 for disjoint or degenerate boxes.
inline double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

inline BBox clip_box(const BBox& b, double width, double height) {
  return {std::clamp(b.x_min, 0.0, width), std::clamp(b.y_min, 0.0, height),
          std::clamp(b.x_max, 0.0, width), std::clamp(b.y_max, 0.0, height)};
}

}  // namespace tablex
