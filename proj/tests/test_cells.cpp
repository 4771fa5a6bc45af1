#include <gtest/gtest.h>

#include <random>

#include "tablex/cells.hpp"
#include "tablex/fixtures.hpp"
#include "tablex/imgproc.hpp"

using namespace tablex;

namespace {

BBox box_of(const GrayImage& g) { return {0, 0, double(g.width()), double(g.height())}; }

void fill_block(BinaryImage& img, int x0, int y0, int x1, int y1) {
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) img.set(x, y, true);
  }
}

double min_iou(const CellGrid& grid, const RenderedTable& t) {
  double worst = 1;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      worst = std::min(worst, iou(grid.at(r, c), BBox::from_rect(t.cells[r][c])));
    }
  }
  return worst;
}

}  // namespace

TEST(SliderWidth, Rule) {
  EXPECT_EQ(select_slider_width(200, 400), 1);
  EXPECT_EQ(select_slider_width(500, 300), 4);
  EXPECT_EQ(select_slider_width(800, 600), 2);
  EXPECT_EQ(select_slider_width(360, 360), 2);
}

TEST(Separators, BlankTableIsOneColumn) {
  EXPECT_EQ(find_col_separators(BinaryImage(50, 20), 2), (std::vector<int>{0, 50}));
  EXPECT_EQ(find_row_separators(BinaryImage(50, 20)), (std::vector<int>{0, 20}));
}

TEST(Separators, TwentyPixelGutter) {
  BinaryImage img(100, 20);
  fill_block(img, 5, 5, 40, 15);
  fill_block(img, 60, 5, 95, 15);
  for (int sl : {1, 2, 4}) {
    const auto seps = find_col_separators(img, sl);
    ASSERT_EQ(seps.size(), 3u);
    EXPECT_NEAR(seps[1], 49.5, 1.0) << sl;
  }
  BinaryImage three(150, 20);
  fill_block(three, 5, 5, 40, 15);
  fill_block(three, 60, 5, 90, 15);
  fill_block(three, 110, 5, 145, 15);
  EXPECT_EQ(find_col_separators(three, 2).size(), 4u);
}

TEST(Separators, RowsFromTextLines) {
  BinaryImage one(60, 30);
  fill_block(one, 5, 10, 55, 18);
  EXPECT_EQ(find_row_separators(one), (std::vector<int>{0, 30}));
  BinaryImage two(60, 40);
  fill_block(two, 5, 5, 55, 13);
  fill_block(two, 5, 25, 55, 33);
  const auto seps = find_row_separators(two);
  ASSERT_EQ(seps.size(), 3u);
  EXPECT_NEAR(seps[1], 18.5, 1.0);
  BinaryImage five(60, 100);
  for (int r = 0; r < 5; ++r) fill_block(five, 5, 5 + 19 * r, 55, 13 + 19 * r);
  EXPECT_EQ(find_row_separators(five).size(), 6u);
}

TEST(RemoveBorders, Cases) {
  std::mt19937_64 rng(1);
  BinaryImage ink(30, 30);
  fill_block(ink, 10, 10, 14, 14);
  EXPECT_EQ(remove_borders(ink, BinaryImage(30, 30)), ink);
  BinaryImage rules(30, 30);
  fill_block(rules, 0, 3, 30, 5);
  EXPECT_EQ(remove_borders(rules, rules).count(), 0u);
}

TEST(Refine, Cases) {
  // 3 columns; grid rows 0..2, grid row 2 holds ink only in column 1.
  SeparatorSet seps{{0, 10, 20, 30}, {0, 10, 20, 30}};
  const CellGrid grid = grid_from_separators(seps, {0, 0, 30, 30});
  BinaryImage full(30, 30);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) fill_block(full, c * 10 + 2, r * 10 + 2, c * 10 + 8, r * 10 + 8);
  }
  const CellGrid same = refine_row_separators(grid, full, {});
  EXPECT_EQ(same.cells, grid.cells);

  BinaryImage spanned(30, 30);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) fill_block(spanned, c * 10 + 2, r * 10 + 2, c * 10 + 8, r * 10 + 8);
  }
  fill_block(spanned, 12, 22, 18, 28);
  const CellGrid merged = refine_row_separators(grid, spanned, {});
  EXPECT_EQ(merged.rows, 2);
  EXPECT_EQ(merged.cols, 3);
  EXPECT_EQ(merged.at(1, 0), (BBox{0, 10, 10, 30}));

  BinaryImage empty_last(30, 30);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) fill_block(empty_last, c * 10 + 2, r * 10 + 2, c * 10 + 8, r * 10 + 8);
  }
  EXPECT_EQ(refine_row_separators(grid, empty_last, {}).rows, 2);
}

TEST(Refine, NeverAddsRowsOrChangesColumns) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = 40, h = 60;
    BinaryImage ink(w, h);
    for (int i = 0; i < 40; ++i) {
      const int x = static_cast<int>(rng() % w), y = static_cast<int>(rng() % h);
      fill_block(ink, x, y, std::min(w, x + 3), std::min(h, y + 2));
    }
    SeparatorSet seps{{0}, {0}};
    for (int y = 0; y < h;) {
      y = std::min(h, y + 3 + static_cast<int>(rng() % 12));
      seps.row_seps.push_back(y);
    }
    for (int x = 0; x < w;) {
      x = std::min(w, x + 3 + static_cast<int>(rng() % 15));
      seps.col_seps.push_back(x);
    }
    const CellGrid grid = grid_from_separators(seps, {5, 7, 5.0 + w, 7.0 + h});
    ASSERT_EQ(check_grid(grid), "");
    const CellGrid refined = refine_row_separators(grid, ink, {});
    ASSERT_EQ(check_grid(refined), "");
    ASSERT_LE(refined.rows, grid.rows);
    ASSERT_EQ(refined.cols, grid.cols);
  }
}

TEST(Bordered, RuledBoxes) {
  BinaryImage box(20, 12);
  fill_block(box, 0, 0, 20, 1);
  fill_block(box, 0, 11, 20, 12);
  fill_block(box, 0, 0, 1, 12);
  fill_block(box, 19, 0, 20, 12);
  const CellGrid one = cells_bordered(box, {100, 100, 120, 112});
  ASSERT_EQ(one.rows * one.cols, 1);
  EXPECT_EQ(one.cells[0], (BBox{101, 101, 119, 111}));

  for (auto [rows, cols] : {std::pair{2, 3}, std::pair{3, 4}}) {
    std::mt19937_64 rng(rows);
    FixtureSpec s;
    s.rows = rows;
    s.cols = cols;
    s.type = TableType::Bordered;
    const RenderedTable t = render_table(s, rng);
    const CellGrid grid =
        cells_bordered(analyze_lines(t.image, {}).lines, box_of(t.image));
    ASSERT_EQ(grid.rows, rows);
    ASSERT_EQ(grid.cols, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        EXPECT_EQ(grid.at(r, c), BBox::from_rect(t.cells[r][c]));
      }
    }
  }
}

TEST(DetectCells, BlankCropIsOneCell) {
  const GrayImage blank(80, 40, 255);
  for (auto t : {TableType::Bordered, TableType::PartiallyBordered, TableType::Borderless,
                 TableType::Coloured}) {
    const CellGrid g = detect_cells(blank, t, {10, 10, 90, 50});
    EXPECT_EQ(g.rows * g.cols, 1);
    EXPECT_EQ(g.cells[0], (BBox{10, 10, 90, 50}));
  }
}

TEST(DetectCells, BorderlessFourByThree) {
  std::mt19937_64 rng(4);
  FixtureSpec s;
  s.rows = 4;
  s.cols = 3;
  s.type = TableType::Borderless;
  const RenderedTable t = render_table(s, rng);
  const CellGrid g = detect_cells(t.image, t.type, box_of(t.image));
  ASSERT_EQ(g.rows, 4);
  ASSERT_EQ(g.cols, 3);
  EXPECT_GE(min_iou(g, t), 0.8);
}

TEST(DetectCells, PartiallyBorderedMatchesBorderlessTwin) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    FixtureSpec s;
    s.rows = 3 + static_cast<int>(seed % 3);
    s.cols = 2 + static_cast<int>(seed % 4);
    s.type = TableType::Borderless;
    std::mt19937_64 r1(seed), r2(seed);
    const RenderedTable plain = render_table(s, r1);
    s.type = TableType::PartiallyBordered;
    s.partial_style = PartialStyle::RowRules;
    const RenderedTable ruled = render_table(s, r2);
    const CellGrid a = detect_cells(plain.image, TableType::Borderless, box_of(plain.image));
    const CellGrid b =
        detect_cells(ruled.image, TableType::PartiallyBordered, box_of(ruled.image));
    EXPECT_EQ(a.cells, b.cells) << seed;
  }
}

TEST(DetectCells, SeparatorsSitInsideTheGutters) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    FixtureSpec s = random_spec(TableType::Borderless, rng);
    s.span_rows.clear();
    const RenderedTable t = render_table(s, rng);
    const CellGrid g = detect_cells(t.image, t.type, box_of(t.image));
    ASSERT_EQ(g.cols, s.cols);
    for (int c = 1; c < g.cols; ++c) {
      // Truth boundary is the gutter centre.
      EXPECT_NEAR(g.at(0, c).x_min, t.cells[0][c].x, 1.0 + (s.col_gutter + 1) / 2);
    }
  }
}

TEST(DetectCells, InvariantsHoldOnRandomFixtures) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    const auto type = static_cast<TableType>(trial % 4);
    FixtureSpec s = random_spec(type, rng);
    s.scale = 1 + trial % 2;
    const RenderedTable t = render_table(s, rng);
    const CellGrid g = detect_cells(t.image, t.type, {3, 4, 3.0 + t.image.width(), 4.0 + t.image.height()});
    ASSERT_EQ(check_grid(g), "") << trial;
    ASSERT_EQ(g.cells.size(), static_cast<std::size_t>(g.rows * g.cols));
  }
}

TEST(DetectCells, WhiteMarginOnlyTranslates) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto type = trial % 2 ? TableType::Borderless : TableType::PartiallyBordered;
    const RenderedTable t = render_table(random_spec(type, rng), rng);
    GrayImage padded(t.image.width() + 20, t.image.height() + 20, 255);
    for (int y = 0; y < t.image.height(); ++y) {
      for (int x = 0; x < t.image.width(); ++x) padded.set(x + 10, y + 10, t.image.at(x, y));
    }
    const CellGrid a = detect_cells(t.image, type, box_of(t.image));
    const CellGrid b = detect_cells(padded, type, box_of(padded));
    ASSERT_EQ(a.rows, b.rows);
    ASSERT_EQ(a.cols, b.cols);
    for (int r = 0; r < a.rows; ++r) {
      for (int c = 0; c < a.cols; ++c) {
        // Interior separators shift by exactly the margin.
        if (c > 0) EXPECT_EQ(b.at(r, c).x_min, a.at(r, c).x_min + 10);
        if (r > 0) EXPECT_EQ(b.at(r, c).y_min, a.at(r, c).y_min + 10);
      }
    }
  }
}
