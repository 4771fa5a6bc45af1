#include <gtest/gtest.h>

#include <random>

#include "tablex/classifier.hpp"
#include "tablex/fixtures.hpp"

using namespace tablex;

namespace {

FixtureSpec spec_of(TableType type, PartialStyle style = PartialStyle::RowRules) {
  FixtureSpec s;
  s.rows = 4;
  s.cols = 3;
  s.type = type;
  s.partial_style = style;
  return s;
}

GrayImage render(const FixtureSpec& s, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  return render_table(s, rng).image;
}

LineAnalysis lines_of(const GrayImage& g) { return analyze_lines(g, {}); }

}  // namespace

TEST(TableType, NamesRoundTrip) {
  for (auto t : {TableType::Bordered, TableType::PartiallyBordered, TableType::Borderless,
                 TableType::Coloured}) {
    EXPECT_EQ(table_type_from_string(to_string(t)), t);
  }
  EXPECT_FALSE(table_type_from_string("ruled").has_value());
}

TEST(ClassifierParams, Validation) {
  EXPECT_NO_THROW(ClassifierParams{}.validate());
  EXPECT_THROW((ClassifierParams{0.0, 0.1, 0.25}.validate()), std::invalid_argument);
  EXPECT_THROW((ClassifierParams{0.15, 0.1, 1.5}.validate()), std::invalid_argument);
}

TEST(Coloured, Cases) {
  GrayImage sparse(100, 100, 255);
  for (int x = 10; x < 60; ++x) sparse.set(x, 50, 0);
  EXPECT_FALSE(detect_coloured(sparse, 0.25));

  GrayImage two(10, 10, 90);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 10; ++x) two.set(x, y, 180);
  }
  EXPECT_TRUE(detect_coloured(two, 0.25));

  const GrayImage col = render(spec_of(TableType::Coloured));
  const auto h = intensity_histogram(col);
  std::vector<int> order(256);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return h[a] > h[b]; });
  // Top two bins are the band grey and the white background.
  EXPECT_TRUE((order[0] == 255) != (order[1] == 255));
  EXPECT_GE(std::min(order[0], order[1]), 200);
  EXPECT_LE(std::min(order[0], order[1]), 215);
  const double ratio = double(h[order[1]]) / double(h[order[0]]);
  EXPECT_GT(ratio, 0.25);
  EXPECT_TRUE(detect_coloured(col, 0.25));
}

TEST(Coloured, BlackOnWhiteFixturesAreNotColoured) {
  for (auto t : {TableType::Bordered, TableType::PartiallyBordered, TableType::Borderless}) {
    EXPECT_FALSE(detect_coloured(render(spec_of(t)), 0.25)) << to_string(t);
  }
}

TEST(OuterBorder, Cases) {
  const GrayImage bordered = render(spec_of(TableType::Bordered));
  const auto a = lines_of(bordered);
  for (auto side : {Side::Top, Side::Bottom, Side::Left, Side::Right}) {
    EXPECT_TRUE(has_outer_border(a.ink, a.horizontal, a.vertical, side));
  }
  FixtureSpec inner = spec_of(TableType::PartiallyBordered, PartialStyle::InnerGrid);
  const auto b = lines_of(render(inner));
  for (auto side : {Side::Top, Side::Bottom, Side::Left, Side::Right}) {
    EXPECT_FALSE(has_outer_border(b.ink, b.horizontal, b.vertical, side));
  }
  const BinaryImage blank(20, 20);
  EXPECT_FALSE(has_outer_border(blank, blank, blank, Side::Top));
}

TEST(Classify, Cases) {
  EXPECT_EQ(classify(GrayImage(40, 30, 255)), TableType::Borderless);
  EXPECT_EQ(classify(render(spec_of(TableType::Bordered))), TableType::Bordered);
  EXPECT_EQ(classify(render(spec_of(TableType::PartiallyBordered, PartialStyle::InnerGrid))),
            TableType::PartiallyBordered);
  EXPECT_EQ(classify(render(spec_of(TableType::PartiallyBordered, PartialStyle::RowRules))),
            TableType::PartiallyBordered);
  EXPECT_EQ(classify(render(spec_of(TableType::Borderless))), TableType::Borderless);
  EXPECT_EQ(classify(render(spec_of(TableType::Coloured))), TableType::Coloured);
}

TEST(Classify, RulingABorderlessTableMakesItBordered) {
  FixtureSpec s = spec_of(TableType::Borderless);
  const GrayImage plain = render(s, 9);
  s.type = TableType::Bordered;
  const GrayImage ruled = render(s, 9);
  EXPECT_EQ(classify(plain), TableType::Borderless);
  EXPECT_EQ(classify(ruled), TableType::Bordered);
}

TEST(Classify, TotalAndDeterministicOnNoise) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 60);
    const int h = 1 + static_cast<int>(rng() % 60);
    GrayImage g(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) g.set(x, y, static_cast<std::uint8_t>(rng()));
    }
    const TableType t = classify(g);
    EXPECT_EQ(classify(g), t);
    const auto a = lines_of(g);
    if (a.horizontal_lines.empty() && a.vertical_lines.empty() && t != TableType::Coloured) {
      EXPECT_EQ(t, TableType::Borderless);
    }
  }
}

TEST(Classify, BorderedFixtureLinesAreExactlyItsRules) {
  // The rendered rules are the only runs long enough to survive opening.
  std::mt19937_64 rng(3);
  FixtureSpec s = spec_of(TableType::Bordered);
  s.rows = 3;
  s.cols = 4;
  const RenderedTable t = render_table(s, rng);
  const auto a = lines_of(t.image);
  EXPECT_EQ(a.horizontal_lines.size(), 4u);
  EXPECT_EQ(a.vertical_lines.size(), 5u);
  BinaryImage text_free = a.ink;
  for (const auto& w : t.words) {
    const PixelRect r = w.box.to_rect();
    for (int y = r.y; y < r.bottom(); ++y) {
      for (int x = r.x; x < r.right(); ++x) text_free.set(x, y, false);
    }
  }
  EXPECT_EQ(a.lines, text_free);
}
