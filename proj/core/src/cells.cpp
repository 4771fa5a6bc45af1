#include "tablex/cells.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "tablex/imgproc.hpp"

namespace tablex {

CellGrid CellGrid::single(const BBox& table_box) {
  return {table_box, 1, 1, {table_box}};
}

std::string check_grid(const CellGrid& grid) {
  if (grid.rows < 1 || grid.cols < 1) return "grid has no cells";
  if (grid.cells.size() != static_cast<std::size_t>(grid.rows) * grid.cols) {
    return "cell count differs from rows x cols";
  }
  constexpr double kEps = 1e-9;
  const BBox& t = grid.table_box;
  for (const auto& c : grid.cells) {
    if (!(c.x_min < c.x_max && c.y_min < c.y_max)) return "degenerate cell";
    if (c.x_min < t.x_min - kEps || c.y_min < t.y_min - kEps ||
        c.x_max > t.x_max + kEps || c.y_max > t.y_max + kEps) {
      return "cell outside table box";
    }
  }
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c + 1 < grid.cols; ++c) {
      if (!(grid.at(r, c).x_min < grid.at(r, c + 1).x_min)) {
        return "columns out of order";
      }
    }
  }
  for (int c = 0; c < grid.cols; ++c) {
    for (int r = 0; r + 1 < grid.rows; ++r) {
      if (!(grid.at(r, c).y_min < grid.at(r + 1, c).y_min)) {
        return "rows out of order";
      }
    }
  }
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.cells.size(); ++j) {
      if (intersection_area(grid.cells[i], grid.cells[j]) > kEps) {
        return "cells overlap";
      }
    }
  }
  return {};
}

void CellParams::validate() const {
  if (slider_width_tall < 1 || slider_width_short < 1 ||
      slider_width_default < 1 || short_table_height < 1 ||
      min_gutter_run < 1 || fill_min_pixels < 1) {
    throw std::invalid_argument("cell parameters must be positive");
  }
}

int select_slider_width(int tab_w, int tab_h, const CellParams& params) {
  if (tab_h > tab_w) return params.slider_width_tall;
  if (tab_h < params.short_table_height) return params.slider_width_short;
  return params.slider_width_default;
}

namespace {

std::vector<int> separators_from_profile(const std::vector<std::uint64_t>& response,
                                         int band, int min_run) {
  const int n = static_cast<int>(response.size());
  std::vector<int> seps{0};
  int i = 0;
  while (i < n) {
    if (response[i] != 0) {
      ++i;
      continue;
    }
    const int start = i;
    while (i < n && response[i] == 0) ++i;
    const int end = i - 1;
    if (end - start + 1 < min_run) continue;
    // Zero response at offset k means pixels [k, k + band) are blank.
    const int blank_end = std::min(end + band - 1, n - 1);
    if (start == 0 || blank_end == n - 1) continue;
    seps.push_back((start + blank_end) / 2);
  }
  seps.push_back(n);
  return seps;
}

// Summed-area table over ink for fast cell fill counts.
class InkCounter {
 public:
  explicit InkCounter(const BinaryImage& ink)
      : w_(ink.width()),
        h_(ink.height()),
        sums_(static_cast<std::size_t>(w_ + 1) * (h_ + 1), 0) {
    for (int y = 0; y < h_; ++y) {
      auto row = ink.row(y);
      std::uint64_t run = 0;
      for (int x = 0; x < w_; ++x) {
        run += row[x];
        at(x + 1, y + 1) = at(x + 1, y) + run;
      }
    }
  }

  std::uint64_t count(PixelRect r) const {
    r = clip_to(r, w_, h_);
    if (r.empty()) return 0;
    return get(r.right(), r.bottom()) - get(r.x, r.bottom()) -
           get(r.right(), r.y) + get(r.x, r.y);
  }

 private:
  std::uint64_t& at(int x, int y) {
    return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x];
  }
  std::uint64_t get(int x, int y) const {
    return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x];
  }

  int w_;
  int h_;
  std::vector<std::uint64_t> sums_;
};

struct Band {
  double lo;
  double hi;
};

// Left-to-right clusters of sorted values within `tolerance` of the
// cluster's first member; returns each cluster's smallest value.
std::vector<int> cluster_starts(std::vector<int> values, int tolerance) {
  std::sort(values.begin(), values.end());
  std::vector<int> starts;
  for (int v : values) {
    if (starts.empty() || v - starts.back() > tolerance) starts.push_back(v);
  }
  return starts;
}

int cluster_of(const std::vector<int>& starts, int v) {
  auto it = std::upper_bound(starts.begin(), starts.end(), v);
  return static_cast<int>(it - starts.begin()) - 1;
}

// End of each cluster: the nearest component end among components starting
// in it, never past the next cluster start.
std::vector<int> cluster_ends(const std::vector<int>& starts,
                              const std::vector<std::pair<int, int>>& spans,
                              int extent) {
  std::vector<int> ends(starts.size(), std::numeric_limits<int>::max());
  for (auto [lo, hi] : spans) {
    const int c = cluster_of(starts, lo);
    ends[c] = std::min(ends[c], hi);
  }
  for (std::size_t c = 0; c < starts.size(); ++c) {
    const int limit = c + 1 < starts.size() ? starts[c + 1] : extent;
    ends[c] = std::min(ends[c], limit);
  }
  return ends;
}

constexpr int kSnapTolerance = 5;

}  // namespace

std::vector<int> find_col_separators(const BinaryImage& ink, int slider_width,
                                     int min_gutter_run) {
  slider_width = std::max(1, slider_width);
  return separators_from_profile(
      foreground_profile(ink, Axis::Columns, slider_width), slider_width,
      min_gutter_run);
}

std::vector<int> find_row_separators(const BinaryImage& ink, int min_gutter_run) {
  return separators_from_profile(foreground_profile(ink, Axis::Rows, 1), 1,
                                 min_gutter_run);
}

BinaryImage remove_borders(const BinaryImage& ink, const BinaryImage& lines) {
  return bitwise_and_not(ink, dilate(lines, StructKernel::rect(3, 3)));
}

CellGrid grid_from_separators(const SeparatorSet& seps, const BBox& table_box) {
  CellGrid grid;
  grid.table_box = table_box;
  grid.rows = seps.rows();
  grid.cols = seps.cols();
  grid.cells.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      grid.cells.push_back({table_box.x_min + seps.col_seps[c],
                            table_box.y_min + seps.row_seps[r],
                            table_box.x_min + seps.col_seps[c + 1],
                            table_box.y_min + seps.row_seps[r + 1]});
    }
  }
  return grid;
}

CellGrid refine_row_separators(const CellGrid& grid, const BinaryImage& ink,
                               const CellParams& params) {
  if (grid.rows <= 1) return grid;
  const InkCounter counter(ink);
  const int threshold = CellParams::cells_filled_threshold(grid.cols);
  const double ox = grid.table_box.x_min;
  const double oy = grid.table_box.y_min;

  std::vector<Band> rows;
  for (int r = 0; r < grid.rows; ++r) {
    const BBox& first = grid.at(r, 0);
    const Band band{first.y_min, first.y_max};
    if (r == 0) {
      rows.push_back(band);
      continue;
    }
    int filled = 0;
    for (int c = 0; c < grid.cols; ++c) {
      const PixelRect local =
          grid.at(r, c).translated(-ox, -oy).to_rect();
      if (counter.count(local) >= static_cast<std::uint64_t>(params.fill_min_pixels)) {
        ++filled;
      }
    }
    if (filled < threshold) {
      rows.back().hi = band.hi;
    } else {
      rows.push_back(band);
    }
  }

  CellGrid out;
  out.table_box = grid.table_box;
  out.rows = static_cast<int>(rows.size());
  out.cols = grid.cols;
  for (const Band& band : rows) {
    for (int c = 0; c < grid.cols; ++c) {
      const BBox& col = grid.at(0, c);
      out.cells.push_back({col.x_min, band.lo, col.x_max, band.hi});
    }
  }
  return out;
}

CellGrid cells_bordered(const BinaryImage& lines, const BBox& table_box) {
  std::vector<PixelRect> comps;
  for (const auto& r : connected_component_boxes(lines, Connectivity::Four)) {
    if (r.width >= 2 && r.height >= 2) comps.push_back(r);
  }
  if (comps.empty()) return CellGrid::single(table_box);

  std::vector<int> lefts, tops;
  std::vector<std::pair<int, int>> xspans, yspans;
  for (const auto& r : comps) {
    lefts.push_back(r.x);
    tops.push_back(r.y);
    xspans.emplace_back(r.x, r.right());
    yspans.emplace_back(r.y, r.bottom());
  }
  const auto col_starts = cluster_starts(lefts, kSnapTolerance);
  const auto row_starts = cluster_starts(tops, kSnapTolerance);
  const auto col_ends = cluster_ends(col_starts, xspans, lines.width());
  const auto row_ends = cluster_ends(row_starts, yspans, lines.height());

  CellGrid grid;
  grid.table_box = table_box;
  grid.rows = static_cast<int>(row_starts.size());
  grid.cols = static_cast<int>(col_starts.size());
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      grid.cells.push_back(BBox{double(col_starts[c]), double(row_starts[r]),
                                double(col_ends[c]), double(row_ends[r])}
                               .translated(table_box.x_min, table_box.y_min));
    }
  }
  return grid;
}

CellGrid detect_cells(const GrayImage& tab, TableType type, const BBox& table_box,
                      const CellParams& params, const ClassifierParams& line_params) {
  if (type == TableType::Bordered) {
    return cells_bordered(analyze_lines(tab, line_params).lines, table_box);
  }

  BinaryImage ink(tab.width(), tab.height());
  if (type == TableType::PartiallyBordered) {
    const LineAnalysis a = analyze_lines(tab, line_params);
    ink = remove_borders(a.ink, a.lines);
  } else {
    ink = otsu_binarize(tab).binary;
  }

  const int slider = select_slider_width(tab.width(), tab.height(), params);
  SeparatorSet seps;
  seps.col_seps = find_col_separators(ink, slider, params.min_gutter_run);
  seps.row_seps = find_row_separators(ink, params.min_gutter_run);
  return refine_row_separators(grid_from_separators(seps, table_box), ink, params);
}

}  // namespace tablex
