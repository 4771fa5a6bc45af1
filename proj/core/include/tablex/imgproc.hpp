#pragma once

// Raster primitives used by table classification and cell detection.
// Every function is a pure function of its arguments.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tablex/image.hpp"

namespace tablex {

struct OtsuResult {
  std::uint8_t threshold = 0;
  /// 1 where intensity <= threshold (dark ink), 0 elsewhere.
  BinaryImage binary;
  /// Set for single-intensity input; `binary` is then all background.
  bool degenerate = false;
};

/// Global Otsu threshold over the 256-bin histogram, inverted so ink is 1.
/// When several thresholds tie for the maximal between-class variance the
/// middle of the first tied run is chosen.
OtsuResult otsu_binarize(const GrayImage& img);

/// Outside pixels are background for both operators.
BinaryImage erode(const BinaryImage& img, const StructKernel& k);
/// Minkowski dilation: out(p) = 1 iff some Foreground cell offset d has
/// img(p - d) = 1.
BinaryImage dilate(const BinaryImage& img, const StructKernel& k);
/// erode followed by dilate.
BinaryImage open(const BinaryImage& img, const StructKernel& k);

/// int(extent * k_frac), clamped to at least 2.
int line_kernel_length(int extent, double k_frac);

/// Opening with a 1 x int(w * k_frac) (horizontal) or int(h * k_frac) x 1
/// (vertical) line kernel; keeps only runs at least that long.
BinaryImage extract_lines(const BinaryImage& binary, Orientation orientation,
                          double k_frac);

struct AxisLine {
  Orientation orientation = Orientation::Horizontal;
  /// y for horizontal lines, x for vertical; centre of the merged band.
  int offset = 0;
  int span_start = 0;
  /// Exclusive.
  int span_end = 0;
  /// Number of pixel rows (or columns) merged into this line.
  int thickness = 0;

  int length() const { return span_end - span_start; }
};

inline constexpr int kLineMergeTolerance = 3;

/// Axis-aligned line accumulation over an opened line image. Runs shorter
/// than `min_length` are ignored; runs on adjacent offsets (difference below
/// `merge_tolerance`) with overlapping spans form one line.
std::vector<AxisLine> count_axis_lines(
    const BinaryImage& lines_img, Orientation orientation, int min_length,
    int merge_tolerance = kLineMergeTolerance);

/// Throws ImageError on dimension mismatch.
BinaryImage bitwise_or(const BinaryImage& a, const BinaryImage& b);
/// a AND NOT b. Throws ImageError on dimension mismatch.
BinaryImage bitwise_and_not(const BinaryImage& a, const BinaryImage& b);

/// First anchor (row-major scan) at which every Foreground cell of `k` lies
/// on a 1. DontCare cells are ignored.
std::optional<Point> hit_or_miss_any(const BinaryImage& img,
                                     const StructKernel& k);

using Histogram = std::array<std::uint64_t, 256>;
Histogram intensity_histogram(const GrayImage& img);

enum class Axis { Rows, Columns };

/// Response of an all-ones slider band. For Axis::Columns, element i is the
/// foreground count over columns [i, i + band) (clipped at the right edge);
/// Axis::Rows is the same over pixel rows.
std::vector<std::uint64_t> foreground_profile(const BinaryImage& binary,
                                              Axis axis, int band);

enum class Connectivity { Four = 4, Eight = 8 };

/// Tight boxes of the background (0) components that do not touch the image
/// border, in order of their first pixel in row-major order.
std::vector<PixelRect> connected_component_boxes(const BinaryImage& img,
                                                 Connectivity connectivity);

}  // namespace tablex
