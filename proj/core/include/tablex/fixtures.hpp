#pragma once

// Synthetic table pages with exact ground truth, used by the test suites and
// the `fixtures` CLI subcommand. Geometry is laid out at 1x and upscaled by
// pixel replication, so a 2x fixture is the 1x image with every pixel
// doubled.

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablex/annotations.hpp"
#include "tablex/classifier.hpp"
#include "tablex/detector.hpp"
#include "tablex/ocr.hpp"

namespace tablex {

/// How a partially bordered fixture is ruled.
enum class PartialStyle {
  RowRules,     ///< top, bottom and every row boundary
  HeaderRules,  ///< top, bottom and under the header row
  ColumnRules,  ///< every column boundary, nothing horizontal
  InnerGrid,    ///< all inner boundaries, no outer frame
};

/// A logical row whose text wraps onto `continuation_lines` extra lines,
/// each holding text in `filled_cells` columns.
struct SpanRow {
  int row = 0;
  int continuation_lines = 1;
  int filled_cells = 1;
};

struct FixtureSpec {
  int rows = 3;
  int cols = 3;
  TableType type = TableType::Borderless;
  PartialStyle partial_style = PartialStyle::RowRules;
  /// Blank pixels between column contents (1x).
  int col_gutter = 14;
  /// Blank pixels between logical rows (1x).
  int row_gutter = 10;
  std::vector<SpanRow> span_rows;
  int scale = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Pixel geometry of the glyph-like word strokes (1x).
inline constexpr int kGlyphPitch = 6;
inline constexpr int kTextLineHeight = 8;
inline constexpr int kContinuationGap = 4;

int word_width(std::size_t chars);

struct RenderedTable {
  GrayImage image;
  TableType type;
  /// Logical rows x cols; wrapped lines joined by single spaces.
  std::vector<std::vector<std::string>> texts;
  /// Ground-truth cell boxes, table-local, row-major per logical row.
  std::vector<std::vector<PixelRect>> cells;
  /// Table-local word boxes.
  std::vector<OcrWord> words;
};

/// Deterministic for a given spec and generator state.
RenderedTable render_table(const FixtureSpec& spec, std::mt19937_64& rng);

/// Random spec of the given type with rows/cols in the given ranges.
FixtureSpec random_spec(TableType type, std::mt19937_64& rng, int min_rows = 2,
                        int max_rows = 8, int min_cols = 2, int max_cols = 6);

struct PageSpec {
  std::vector<FixtureSpec> tables;
};

struct FixturePage {
  std::string page_id;
  GrayImage image;
};

struct FixtureSet {
  std::vector<FixturePage> pages;
  AnnotationSet truth;
  /// True table boxes plus one lower-confidence overlapping decoy each.
  DetectionsByPage detections;
  OcrManifest manifest;
};

FixtureSet generate_fixtures(std::span<const PageSpec> pages, std::uint64_t seed);

/// Writes images/<page>.png, ground_truth.json, detections.json and
/// ocr_manifest.json under `dir`.
void write_fixtures(const FixtureSet& set, const std::filesystem::path& dir);

nlohmann::ordered_json spec_to_json(const FixtureSpec& spec);
FixtureSpec spec_from_json(const nlohmann::json& j);
std::vector<PageSpec> page_specs_from_json(const nlohmann::json& doc);

/// A mixed suite of `pages` pages with one or two tables each.
std::vector<PageSpec> default_page_specs(std::size_t pages, std::uint64_t seed);

}  // namespace tablex
