#pragma once

#include <string>
#include <vector>

#include "tablex/bbox.hpp"
#include "tablex/classifier.hpp"
#include "tablex/image.hpp"

namespace tablex {

/// Table-local separator offsets, strictly increasing, starting at 0 and
/// ending at the table extent.
struct SeparatorSet {
  std::vector<int> row_seps;
  std::vector<int> col_seps;

  int rows() const { return static_cast<int>(row_seps.size()) - 1; }
  int cols() const { return static_cast<int>(col_seps.size()) - 1; }
};

/// Row-major grid of cell boxes in page coordinates.
struct CellGrid {
  BBox table_box;
  int rows = 0;
  int cols = 0;
  std::vector<BBox> cells;

  const BBox& at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * cols + col];
  }
  /// Single cell covering the whole table.
  static CellGrid single(const BBox& table_box);
};

/// Empty when the grid satisfies its invariants, else a description of the
/// first violation.
std::string check_grid(const CellGrid& grid);

struct CellParams {
  /// Slider band width for tall tables (height > width).
  int slider_width_tall = 1;
  /// Slider band width for tables lower than `short_table_height`.
  int slider_width_short = 4;
  /// Slider band width otherwise.
  int slider_width_default = 2;
  int short_table_height = 360;
  /// Zero-response runs shorter than this are not gutters.
  int min_gutter_run = 2;
  /// A cell holding fewer ink pixels counts as empty.
  int fill_min_pixels = 5;

  /// 1 + floor(cols / 2).
  static int cells_filled_threshold(int cols) { return 1 + cols / 2; }
  void validate() const;
};

int select_slider_width(int tab_w, int tab_h, const CellParams& params = {});

/// Gutters are maximal runs of zero band response; one separator is placed
/// at the centre of the blank pixel band each gutter covers. Gutters that
/// touch either table edge are margins and produce no separator.
std::vector<int> find_col_separators(const BinaryImage& ink, int slider_width,
                                     int min_gutter_run = 2);
std::vector<int> find_row_separators(const BinaryImage& ink,
                                     int min_gutter_run = 2);

/// ink AND NOT dilate(lines, 3x3). Throws ImageError on size mismatch.
BinaryImage remove_borders(const BinaryImage& ink, const BinaryImage& lines);

/// `table_box` origin is added to the table-local separators.
CellGrid grid_from_separators(const SeparatorSet& seps, const BBox& table_box);

/// Merges every row (after the first) with fewer than
/// cells_filled_threshold(cols) filled cells into the row above.
/// `ink` is table-local, aligned with `grid.table_box`.
CellGrid refine_row_separators(const CellGrid& grid, const BinaryImage& ink,
                               const CellParams& params = {});

/// Cells of a ruled table: enclosed background regions of `lines`, snapped
/// onto a grid by clustering their left and top edges.
CellGrid cells_bordered(const BinaryImage& lines, const BBox& table_box);

CellGrid detect_cells(const GrayImage& tab, TableType type, const BBox& table_box,
                      const CellParams& params = {},
                      const ClassifierParams& line_params = {});

}  // namespace tablex
