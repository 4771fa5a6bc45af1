#include "tablex/classifier.hpp"

#include <algorithm>
#include <stdexcept>

namespace tablex {

std::string_view to_string(TableType type) {
  switch (type) {
    case TableType::Bordered: return "bordered";
    case TableType::PartiallyBordered: return "partially_bordered";
    case TableType::Borderless: return "borderless";
    case TableType::Coloured: return "coloured";
  }
  return "borderless";
}

std::optional<TableType> table_type_from_string(std::string_view name) {
  for (auto t : {TableType::Bordered, TableType::PartiallyBordered,
                 TableType::Borderless, TableType::Coloured}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

void ClassifierParams::validate() const {
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit(k_w) || !unit(k_h) || !unit(colour_ratio_threshold)) {
    throw std::invalid_argument("classifier parameters must lie in (0, 1)");
  }
}

namespace {

constexpr int kBorderOffsetTolerance = 3;
constexpr double kBorderCoverage = 0.95;
constexpr int kWhiteLevel = 250;
constexpr double kRunnerUpShare = 0.10;

int min_line_length(int extent, double k_frac) {
  return std::max(1, line_kernel_length(extent, k_frac) / 2);
}

// Fraction of [from, to] covered by foreground along `offset` +- tolerance.
double coverage(const BinaryImage& lines, Orientation orientation, int offset,
                int from, int to) {
  const bool horizontal = orientation == Orientation::Horizontal;
  const int limit = horizontal ? lines.height() : lines.width();
  int covered = 0;
  for (int pos = from; pos <= to; ++pos) {
    for (int d = -kBorderOffsetTolerance; d <= kBorderOffsetTolerance; ++d) {
      const int off = offset + d;
      if (off < 0 || off >= limit) continue;
      if (horizontal ? lines.at(pos, off) : lines.at(off, pos)) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / (to - from + 1);
}

}  // namespace

LineAnalysis analyze_lines(const GrayImage& tab, const ClassifierParams& params) {
  BinaryImage ink = otsu_binarize(tab).binary;
  BinaryImage horizontal = extract_lines(ink, Orientation::Horizontal, params.k_w);
  BinaryImage vertical = extract_lines(ink, Orientation::Vertical, params.k_h);
  BinaryImage lines = bitwise_or(horizontal, vertical);
  auto hlines = count_axis_lines(horizontal, Orientation::Horizontal,
                                 min_line_length(tab.width(), params.k_w));
  auto vlines = count_axis_lines(vertical, Orientation::Vertical,
                                 min_line_length(tab.height(), params.k_h));
  return {std::move(ink),    std::move(horizontal), std::move(vertical),
          std::move(lines),  std::move(hlines),     std::move(vlines)};
}

bool detect_coloured(const GrayImage& tab_gray, double threshold) {
  const Histogram hist = intensity_histogram(tab_gray);
  int first = 0;
  for (int v = 1; v < 256; ++v) {
    if (hist[v] > hist[first]) first = v;
  }
  int second = first == 0 ? 1 : 0;
  for (int v = 0; v < 256; ++v) {
    if (v != first && hist[v] > hist[second]) second = v;
  }
  if (hist[first] == 0) return false;
  const double ratio =
      static_cast<double>(hist[second]) / static_cast<double>(hist[first]);
  if (ratio <= threshold) return false;
  const double runner_up_share =
      static_cast<double>(hist[second]) / static_cast<double>(tab_gray.size());
  return first < kWhiteLevel || runner_up_share > kRunnerUpShare;
}

bool has_outer_border(const BinaryImage& ink, const BinaryImage& horizontal,
                      const BinaryImage& vertical, Side side) {
  const int w = ink.width();
  const int h = ink.height();
  const bool along_rows = side == Side::Top || side == Side::Bottom;

  // Extreme line (row or column) holding ink, then its first/last ink pixel.
  int offset = -1;
  if (along_rows) {
    for (int i = 0; i < h && offset < 0; ++i) {
      const int y = side == Side::Top ? i : h - 1 - i;
      auto row = ink.row(y);
      if (std::find(row.begin(), row.end(), 1) != row.end()) offset = y;
    }
  } else {
    for (int i = 0; i < w && offset < 0; ++i) {
      const int x = side == Side::Left ? i : w - 1 - i;
      for (int y = 0; y < h; ++y) {
        if (ink.at(x, y)) {
          offset = x;
          break;
        }
      }
    }
  }
  if (offset < 0) return false;

  int first = -1;
  int last = -1;
  const int extent = along_rows ? w : h;
  for (int pos = 0; pos < extent; ++pos) {
    if (along_rows ? ink.at(pos, offset) : ink.at(offset, pos)) {
      if (first < 0) first = pos;
      last = pos;
    }
  }
  if (last <= first) return false;

  const double covered =
      along_rows ? coverage(horizontal, Orientation::Horizontal, offset, first, last)
                 : coverage(vertical, Orientation::Vertical, offset, first, last);
  return covered >= kBorderCoverage;
}

TableType classify(const GrayImage& tab, const ClassifierParams& params) {
  if (detect_coloured(tab, params.colour_ratio_threshold)) {
    return TableType::Coloured;
  }
  const LineAnalysis a = analyze_lines(tab, params);
  if (a.horizontal_lines.empty() && a.vertical_lines.empty()) {
    return TableType::Borderless;
  }
  const bool framed =
      has_outer_border(a.ink, a.horizontal, a.vertical, Side::Top) &&
      has_outer_border(a.ink, a.horizontal, a.vertical, Side::Bottom) &&
      has_outer_border(a.ink, a.horizontal, a.vertical, Side::Left) &&
      has_outer_border(a.ink, a.horizontal, a.vertical, Side::Right);
  if (framed && hit_or_miss_any(a.lines, StructKernel::cross()).has_value()) {
    return TableType::Bordered;
  }
  return TableType::PartiallyBordered;
}

}  // namespace tablex
