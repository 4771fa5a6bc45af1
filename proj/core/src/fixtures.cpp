#include "tablex/fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "tablex/cells.hpp"
#include "tablex/codec.hpp"
#include "tablex/error.hpp"

namespace tablex {

namespace {

// Portable draws; std distributions differ between standard libraries.
int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

constexpr std::string_view kAlphabet =
    "ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz0123456789";
constexpr int kMinWordChars = 2;
constexpr int kMaxWordChars = 7;
constexpr int kRuleThickness = 1;
constexpr int kFrameInset = 2;
constexpr int kMinTableHeight = 40;
constexpr std::uint8_t kInk = 0;

std::string random_word(std::mt19937_64& rng, int chars) {
  std::string w;
  for (int i = 0; i < chars; ++i) {
    w += kAlphabet[static_cast<std::size_t>(uniform_int(rng, 0, kAlphabet.size() - 1))];
  }
  return w;
}

// Zig-zag stroke: every column and every one of the 8 pixel rows carries
// ink, while no horizontal run exceeds 3 px and no vertical run 2 px.
void draw_word(GrayImage& img, int x, int y, int width, int phase) {
  for (int i = 0; i < width; ++i) {
    const int dy = std::abs((i + phase) % 12 - 6);
    img.set(x + i, y + dy, kInk);
    img.set(x + i, y + dy + 1, kInk);
  }
}

GrayImage upscale(const GrayImage& src, int s) {
  if (s == 1) return src;
  GrayImage out(src.width() * s, src.height() * s);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out.set(x, y, src.at(x / s, y / s));
  }
  return out;
}

struct Rule {
  Orientation orientation;
  int offset;  // first pixel across the rule
  int from;
  int to;      // exclusive
};

void draw_rule(GrayImage& img, const Rule& r) {
  if (r.orientation == Orientation::Horizontal) {
    img.fill({r.from, r.offset, r.to - r.from, kRuleThickness}, kInk);
  } else {
    img.fill({r.offset, r.from, kRuleThickness, r.to - r.from}, kInk);
  }
}

// Table-local layout at 1x.
struct Layout {
  int width = 0;
  int height = 0;
  std::vector<int> col_x;      // content start
  std::vector<int> col_w;      // content width
  std::vector<int> row_y;
  std::vector<int> row_h;
};

int gutter_midpoint(int start, int width) { return (2 * start + width - 1) / 2; }

}  // namespace

int word_width(std::size_t chars) { return kGlyphPitch * static_cast<int>(chars); }

void FixtureSpec::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("fixture needs rows, cols >= 1");
  if (scale < 1 || scale > 4) throw std::invalid_argument("fixture scale must be 1..4");
  if (col_gutter < 8 || row_gutter < 8) {
    throw std::invalid_argument("fixture gutters must be at least 8 px");
  }
  for (const auto& s : span_rows) {
    if (s.row < 0 || s.row >= rows || s.continuation_lines < 1 ||
        s.filled_cells < 1 || s.filled_cells > cols) {
      throw std::invalid_argument("fixture span row out of range");
    }
  }
}

RenderedTable render_table(const FixtureSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  const int rows = spec.rows;
  const int cols = spec.cols;

  // words[r][line][c]
  std::vector<std::vector<std::vector<std::optional<std::string>>>> words(rows);
  for (int r = 0; r < rows; ++r) {
    int continuation = 0;
    int filled = 0;
    for (const auto& s : spec.span_rows) {
      if (s.row == r) {
        continuation = s.continuation_lines;
        filled = s.filled_cells;
      }
    }
    words[r].assign(1 + continuation, std::vector<std::optional<std::string>>(cols));
    for (int c = 0; c < cols; ++c) {
      words[r][0][c] = random_word(rng, uniform_int(rng, kMinWordChars, kMaxWordChars));
    }
    for (int l = 1; l <= continuation; ++l) {
      std::vector<int> order(cols);
      std::iota(order.begin(), order.end(), 0);
      for (int i = cols - 1; i > 0; --i) std::swap(order[i], order[uniform_int(rng, 0, i)]);
      for (int k = 0; k < filled; ++k) {
        words[r][l][order[k]] =
            random_word(rng, uniform_int(rng, kMinWordChars, kMaxWordChars));
      }
    }
  }
  // The header word is the widest in its column so that no blank column
  // opens up inside a column's content band.
  for (int c = 0; c < cols; ++c) {
    std::size_t widest = 0;
    for (int r = 0; r < rows; ++r) {
      for (std::size_t l = 0; l < words[r].size(); ++l) {
        if ((r > 0 || l > 0) && words[r][l][c]) widest = std::max(widest, words[r][l][c]->size());
      }
    }
    const int chars = std::max<int>(static_cast<int>(widest),
                                    uniform_int(rng, kMinWordChars, kMaxWordChars));
    words[0][0][c] = random_word(rng, chars);
  }

  Layout lay;
  const int margin_x = uniform_int(rng, 7, 12);
  const int margin_y = uniform_int(rng, 7, 12);
  int x = margin_x;
  for (int c = 0; c < cols; ++c) {
    lay.col_x.push_back(x);
    lay.col_w.push_back(word_width(words[0][0][c]->size()));
    x += lay.col_w.back() + spec.col_gutter;
  }
  lay.width = x - spec.col_gutter + margin_x;
  int y = margin_y;
  for (int r = 0; r < rows; ++r) {
    const int lines = static_cast<int>(words[r].size());
    lay.row_y.push_back(y);
    lay.row_h.push_back(lines * kTextLineHeight + (lines - 1) * kContinuationGap);
    y += lay.row_h.back() + spec.row_gutter;
  }
  lay.height = std::max(y - spec.row_gutter + margin_y, kMinTableHeight);

  GrayImage img(lay.width, lay.height, 255);

  if (spec.type == TableType::Coloured) {
    const auto shade = static_cast<std::uint8_t>(uniform_int(rng, 200, 215));
    for (int r = 0; r < rows; r += 2) {
      const int top = r == 0 ? 0 : lay.row_y[r] - spec.row_gutter / 2;
      const int bottom = r == rows - 1 ? lay.height
                                       : lay.row_y[r] + lay.row_h[r] + spec.row_gutter / 2;
      img.fill({0, top, lay.width, bottom - top}, shade);
    }
  }

  RenderedTable out{img, spec.type, {}, {}, {}};
  out.texts.assign(rows, std::vector<std::string>(cols));
  for (int r = 0; r < rows; ++r) {
    for (std::size_t l = 0; l < words[r].size(); ++l) {
      const int wy = lay.row_y[r] + static_cast<int>(l) * (kTextLineHeight + kContinuationGap);
      for (int c = 0; c < cols; ++c) {
        if (!words[r][l][c]) continue;
        const std::string& text = *words[r][l][c];
        const int ww = word_width(text.size());
        draw_word(out.image, lay.col_x[c], wy, ww, uniform_int(rng, 0, 11));
        out.words.push_back({BBox::from_rect({lay.col_x[c], wy, ww, kTextLineHeight}), text});
        auto& cell = out.texts[r][c];
        if (!cell.empty()) cell += ' ';
        cell += text;
      }
    }
  }

  // Rule positions: frame lines inset from the edge, inner lines centred in
  // the gutters.
  auto inner_offset = [](int gutter_start, int gutter) {
    return gutter_start + gutter / 2 - kRuleThickness / 2;
  };
  std::vector<int> inner_h, inner_v;
  for (int r = 0; r + 1 < rows; ++r) {
    inner_h.push_back(inner_offset(lay.row_y[r] + lay.row_h[r], spec.row_gutter));
  }
  for (int c = 0; c + 1 < cols; ++c) {
    inner_v.push_back(inner_offset(lay.col_x[c] + lay.col_w[c], spec.col_gutter));
  }
  const int top = kFrameInset;
  const int bottom = lay.height - kFrameInset - kRuleThickness;
  const int left = kFrameInset;
  const int right = lay.width - kFrameInset - kRuleThickness;
  const int span_x0 = kFrameInset;
  const int span_x1 = lay.width - kFrameInset;
  const int span_y0 = kFrameInset;
  const int span_y1 = lay.height - kFrameInset;

  std::vector<Rule> rules;
  auto hrule = [&](int off) { rules.push_back({Orientation::Horizontal, off, span_x0, span_x1}); };
  auto vrule = [&](int off) { rules.push_back({Orientation::Vertical, off, span_y0, span_y1}); };
  switch (spec.type) {
    case TableType::Bordered:
      hrule(top);
      hrule(bottom);
      vrule(left);
      vrule(right);
      for (int o : inner_h) hrule(o);
      for (int o : inner_v) vrule(o);
      break;
    case TableType::PartiallyBordered:
      switch (spec.partial_style) {
        case PartialStyle::RowRules:
          hrule(top);
          hrule(bottom);
          for (int o : inner_h) hrule(o);
          break;
        case PartialStyle::HeaderRules:
          hrule(top);
          hrule(bottom);
          if (!inner_h.empty()) hrule(inner_h.front());
          break;
        case PartialStyle::ColumnRules:
          if (inner_v.empty()) {
            hrule(top);
          }
          for (int o : inner_v) vrule(o);
          break;
        case PartialStyle::InnerGrid:
          for (int o : inner_h) hrule(o);
          for (int o : inner_v) vrule(o);
          if (inner_h.empty() && inner_v.empty()) hrule(top);
          break;
      }
      break;
    case TableType::Borderless:
    case TableType::Coloured:
      break;
  }
  for (const auto& r : rules) draw_rule(out.image, r);

  const int s = spec.scale;
  out.image = upscale(out.image, s);
  for (auto& w : out.words) {
    w.box = {w.box.x_min * s, w.box.y_min * s, w.box.x_max * s, w.box.y_max * s};
  }

  // Ground-truth cell bands, computed at final scale.
  std::vector<int> xs, ys;  // boundaries; bordered tables use interiors
  std::vector<std::pair<int, int>> col_bands, row_bands;
  if (spec.type == TableType::Bordered) {
    std::vector<int> vx{left};
    vx.insert(vx.end(), inner_v.begin(), inner_v.end());
    vx.push_back(right);
    for (std::size_t i = 0; i + 1 < vx.size(); ++i) {
      col_bands.emplace_back((vx[i] + kRuleThickness) * s, vx[i + 1] * s);
    }
    std::vector<int> hy{top};
    hy.insert(hy.end(), inner_h.begin(), inner_h.end());
    hy.push_back(bottom);
    for (std::size_t i = 0; i + 1 < hy.size(); ++i) {
      row_bands.emplace_back((hy[i] + kRuleThickness) * s, hy[i + 1] * s);
    }
  } else {
    xs.push_back(0);
    for (int c = 0; c + 1 < cols; ++c) {
      xs.push_back(gutter_midpoint((lay.col_x[c] + lay.col_w[c]) * s, spec.col_gutter * s));
    }
    xs.push_back(lay.width * s);
    ys.push_back(0);
    for (int r = 0; r + 1 < rows; ++r) {
      ys.push_back(gutter_midpoint((lay.row_y[r] + lay.row_h[r]) * s, spec.row_gutter * s));
    }
    ys.push_back(lay.height * s);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) col_bands.emplace_back(xs[i], xs[i + 1]);
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) row_bands.emplace_back(ys[i], ys[i + 1]);
  }
  out.cells.assign(rows, {});
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto [x0, x1] = col_bands[c];
      const auto [y0, y1] = row_bands[r];
      out.cells[r].push_back({x0, y0, x1 - x0, y1 - y0});
    }
  }
  return out;
}

FixtureSpec random_spec(TableType type, std::mt19937_64& rng, int min_rows,
                        int max_rows, int min_cols, int max_cols) {
  FixtureSpec spec;
  spec.type = type;
  spec.rows = uniform_int(rng, min_rows, max_rows);
  spec.cols = uniform_int(rng, min_cols, max_cols);
  spec.col_gutter = uniform_int(rng, 10, 20);
  spec.row_gutter = uniform_int(rng, 8, 14);
  spec.partial_style = static_cast<PartialStyle>(uniform_int(rng, 0, 3));
  const int threshold = CellParams::cells_filled_threshold(spec.cols);
  if (spec.rows > 1 && threshold > 1 && uniform_int(rng, 0, 2) == 0) {
    spec.span_rows.push_back({uniform_int(rng, 1, spec.rows - 1), uniform_int(rng, 1, 2),
                              uniform_int(rng, 1, threshold - 1)});
  }
  return spec;
}

FixtureSet generate_fixtures(std::span<const PageSpec> pages, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FixtureSet set;
  constexpr int kPageMargin = 40;
  constexpr int kTitleBand = 40;
  constexpr int kTableGap = 40;

  for (std::size_t pi = 0; pi < pages.size(); ++pi) {
    char name[32];
    std::snprintf(name, sizeof name, "page_%03zu", pi);
    const std::string page_id = name;

    std::vector<RenderedTable> tables;
    for (const auto& spec : pages[pi].tables) tables.push_back(render_table(spec, rng));

    int width = 2 * kPageMargin + 200;
    int height = kTitleBand + kPageMargin;
    std::vector<int> jitter;
    for (const auto& t : tables) {
      jitter.push_back(uniform_int(rng, 0, 20));
      width = std::max(width, 2 * kPageMargin + jitter.back() + t.image.width());
      height += t.image.height() + kTableGap;
    }
    GrayImage page(width, height, 255);

    AnnotatedPage truth;
    truth.page_id = page_id;
    truth.file_name = page_id + ".png";
    truth.width = width;
    truth.height = height;
    auto& words = set.manifest[page_id];
    auto& dets = set.detections[page_id];

    // A title line outside every table.
    int tx = kPageMargin;
    for (int i = 0; i < 3; ++i) {
      const std::string w = random_word(rng, uniform_int(rng, 3, 7));
      const int ww = word_width(w.size());
      draw_word(page, tx, 16, ww, 0);
      words.push_back({BBox::from_rect({tx, 16, ww, kTextLineHeight}), w});
      tx += ww + 10;
    }

    int y = kTitleBand;
    for (std::size_t ti = 0; ti < tables.size(); ++ti) {
      const auto& t = tables[ti];
      const int ox = kPageMargin + jitter[ti];
      const int oy = y;
      for (int yy = 0; yy < t.image.height(); ++yy) {
        auto src = t.image.row(yy);
        std::copy(src.begin(), src.end(), page.row(oy + yy).begin() + ox);
      }
      const BBox box = BBox::from_rect({ox, oy, t.image.width(), t.image.height()});
      AnnotatedTable at;
      at.box = box;
      at.table_type = std::string(to_string(t.type));
      for (std::size_t r = 0; r < t.cells.size(); ++r) {
        for (std::size_t c = 0; c < t.cells[r].size(); ++c) {
          at.cells.push_back({BBox::from_rect(t.cells[r][c]).translated(ox, oy),
                              t.texts[r][c], static_cast<int>(r), static_cast<int>(c)});
        }
      }
      truth.tables.push_back(std::move(at));
      for (const auto& w : t.words) words.push_back({w.box.translated(ox, oy), w.text});

      const double conf = 0.9 + uniform_int(rng, 0, 89) / 1000.0;
      dets.push_back({box, conf, page_id});
      const double decoy_conf = 0.5 + uniform_int(rng, 0, 29) / 100.0;
      dets.push_back({{box.x_min, box.y_min, box.center_x(), box.center_y()},
                      decoy_conf, page_id});
      y += t.image.height() + kTableGap;
    }
    set.truth.pages.push_back(std::move(truth));
    set.pages.push_back({page_id, std::move(page)});
  }
  return set;
}

void write_fixtures(const FixtureSet& set, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  for (const auto& p : set.pages) write_png(dir / "images" / (p.page_id + ".png"), p.image);
  auto dump = [&](const std::string& name, const nlohmann::ordered_json& j) {
    std::ofstream out(dir / name);
    if (!out) throw FormatError("cannot write " + (dir / name).string());
    out << j.dump(2) << '\n';
  };
  dump("ground_truth.json", to_coco(set.truth));
  dump("detections.json", detections_to_json(set.detections));
  dump("ocr_manifest.json", manifest_to_json(set.manifest));
}

namespace {

constexpr std::string_view kStyleNames[] = {"row_rules", "header_rules", "column_rules",
                                            "inner_grid"};

}  // namespace

nlohmann::ordered_json spec_to_json(const FixtureSpec& spec) {
  nlohmann::ordered_json spans = nlohmann::ordered_json::array();
  for (const auto& s : spec.span_rows) {
    spans.push_back({{"row", s.row},
                     {"continuation_lines", s.continuation_lines},
                     {"filled_cells", s.filled_cells}});
  }
  return {{"rows", spec.rows},
          {"cols", spec.cols},
          {"type", std::string(to_string(spec.type))},
          {"partial_style", std::string(kStyleNames[static_cast<int>(spec.partial_style)])},
          {"col_gutter", spec.col_gutter},
          {"row_gutter", spec.row_gutter},
          {"span_rows", std::move(spans)},
          {"scale", spec.scale}};
}

FixtureSpec spec_from_json(const nlohmann::json& j) {
  FixtureSpec spec;
  try {
    spec.rows = j.value("rows", spec.rows);
    spec.cols = j.value("cols", spec.cols);
    if (j.contains("type")) {
      const auto type = table_type_from_string(j["type"].get<std::string>());
      if (!type) throw FormatError("fixture spec: unknown table type");
      spec.type = *type;
    }
    if (j.contains("partial_style")) {
      const auto name = j["partial_style"].get<std::string>();
      const auto it = std::find(std::begin(kStyleNames), std::end(kStyleNames), name);
      if (it == std::end(kStyleNames)) throw FormatError("fixture spec: unknown partial_style");
      spec.partial_style = static_cast<PartialStyle>(it - std::begin(kStyleNames));
    }
    spec.col_gutter = j.value("col_gutter", spec.col_gutter);
    spec.row_gutter = j.value("row_gutter", spec.row_gutter);
    spec.scale = j.value("scale", spec.scale);
    for (const auto& s : j.value("span_rows", nlohmann::json::array())) {
      spec.span_rows.push_back({s.at("row").get<int>(), s.value("continuation_lines", 1),
                                s.value("filled_cells", 1)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("fixture spec: ") + e.what());
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return spec;
}

std::vector<PageSpec> page_specs_from_json(const nlohmann::json& doc) {
  std::vector<PageSpec> pages;
  try {
    for (const auto& p : doc.at("pages")) {
      PageSpec page;
      for (const auto& t : p.at("tables")) page.tables.push_back(spec_from_json(t));
      pages.push_back(std::move(page));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("fixture page specs: ") + e.what());
  }
  return pages;
}

std::vector<PageSpec> default_page_specs(std::size_t pages, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr TableType kTypes[] = {TableType::Bordered, TableType::PartiallyBordered,
                                  TableType::Borderless, TableType::Coloured};
  std::vector<PageSpec> out(pages);
  for (auto& page : out) {
    const int tables = uniform_int(rng, 1, 2);
    for (int t = 0; t < tables; ++t) {
      page.tables.push_back(random_spec(kTypes[uniform_int(rng, 0, 3)], rng, 2, 6, 2, 5));
    }
  }
  return out;
}

}  // namespace tablex
