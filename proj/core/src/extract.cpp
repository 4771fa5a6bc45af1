#include "tablex/extract.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <limits>

#include "tablex/error.hpp"

namespace tablex {

namespace {

// Index of the cell whose x-range (x_min, x_max] holds `cx` (the first cell
// also owns its left edge); otherwise the nearest cell, left on ties.
std::size_t owning_cell(const std::vector<BBox>& cells, double cx) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const bool after_left = i == 0 ? cx >= cells[i].x_min : cx > cells[i].x_min;
    if (after_left && cx <= cells[i].x_max) return i;
  }
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double gap = cx < cells[i].x_min ? cells[i].x_min - cx : cx - cells[i].x_max;
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

std::string join_reading_order(std::vector<OcrWord> words) {
  std::sort(words.begin(), words.end(), [](const OcrWord& a, const OcrWord& b) {
    return a.box.center_y() < b.box.center_y();
  });
  // Group into text lines by vertical centre, then read each line by x.
  std::vector<std::vector<OcrWord>> lines;
  double anchor = 0;
  double anchor_height = 0;
  for (auto& w : words) {
    const double limit = 0.5 * std::max(anchor_height, w.box.height());
    if (lines.empty() || w.box.center_y() - anchor > limit) {
      lines.emplace_back();
      anchor = w.box.center_y();
      anchor_height = w.box.height();
    }
    lines.back().push_back(std::move(w));
  }
  std::string text;
  for (auto& line : lines) {
    std::sort(line.begin(), line.end(), [](const OcrWord& a, const OcrWord& b) {
      return a.box.x_min < b.box.x_min;
    });
    for (const auto& w : line) {
      if (w.text.empty()) continue;
      if (!text.empty()) text += ' ';
      text += w.text;
    }
  }
  return text;
}

}  // namespace

std::vector<std::string> extract_row(const GrayImage& page,
                                     const std::vector<BBox>& row_cells,
                                     OcrEngine& engine) {
  std::vector<std::string> texts(row_cells.size());
  if (row_cells.empty()) return texts;

  BBox united = row_cells.front();
  for (const auto& c : row_cells) {
    united = {std::min(united.x_min, c.x_min), std::min(united.y_min, c.y_min),
              std::max(united.x_max, c.x_max), std::max(united.y_max, c.y_max)};
  }
  const PixelRect rect = clip_to(united.to_rect(), page.width(), page.height());
  if (rect.empty()) return texts;
  const BBox region = BBox::from_rect(rect);

  std::vector<OcrWord> words;
  try {
    words = engine.recognize(page.crop(rect), region);
  } catch (const OcrError& e) {
    spdlog::warn("OCR failed for row at y={}: {}", region.y_min, e.what());
    return texts;
  }

  std::vector<std::vector<OcrWord>> per_cell(row_cells.size());
  for (auto& w : words) {
    w.box = w.box.translated(region.x_min, region.y_min);
    per_cell[owning_cell(row_cells, w.box.center_x())].push_back(std::move(w));
  }
  for (std::size_t i = 0; i < per_cell.size(); ++i) {
    texts[i] = join_reading_order(std::move(per_cell[i]));
  }
  return texts;
}

TableContent extract_table(const GrayImage& page, const CellGrid& grid,
                           TableType type, double confidence, OcrEngine& engine) {
  TableContent content;
  content.table_box = grid.table_box;
  content.type = type;
  content.confidence = confidence;
  for (int r = 0; r < grid.rows; ++r) {
    std::vector<BBox> row(grid.cells.begin() + static_cast<long>(r) * grid.cols,
                          grid.cells.begin() + static_cast<long>(r + 1) * grid.cols);
    content.rows.push_back(extract_row(page, row, engine));
    content.cells.push_back(std::move(row));
  }
  return content;
}

namespace {

nlohmann::ordered_json box_json(const BBox& b) {
  return nlohmann::ordered_json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

BBox parse_box(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw FormatError("bbox must have 4 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
          j[3].get<double>()};
}

}  // namespace

nlohmann::ordered_json emit_json(const std::vector<TableContent>& contents,
                                 const std::string& page_id) {
  using nlohmann::ordered_json;
  ordered_json tables = ordered_json::array();
  for (const auto& t : contents) {
    ordered_json cells = ordered_json::array();
    for (const auto& row : t.cells) {
      ordered_json boxes = ordered_json::array();
      for (const auto& b : row) boxes.push_back(box_json(b));
      cells.push_back(std::move(boxes));
    }
    tables.push_back({{"bbox", box_json(t.table_box)},
                      {"type", std::string(to_string(t.type))},
                      {"confidence", t.confidence},
                      {"rows", t.rows},
                      {"cells", std::move(cells)}});
  }
  return {{"page_id", page_id}, {"tables", std::move(tables)}};
}

PageContent parse_page_json(const nlohmann::json& doc) {
  PageContent page;
  try {
    page.page_id = doc.at("page_id").get<std::string>();
    for (const auto& t : doc.at("tables")) {
      TableContent content;
      content.table_box = parse_box(t.at("bbox"));
      const auto type = table_type_from_string(t.at("type").get<std::string>());
      if (!type) throw FormatError("unknown table type");
      content.type = *type;
      content.confidence = t.at("confidence").get<double>();
      content.rows = t.at("rows").get<std::vector<std::vector<std::string>>>();
      if (t.contains("cells")) {
        for (const auto& row : t["cells"]) {
          std::vector<BBox> boxes;
          for (const auto& b : row) boxes.push_back(parse_box(b));
          content.cells.push_back(std::move(boxes));
        }
      }
      page.tables.push_back(std::move(content));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("page JSON: ") + e.what());
  }
  return page;
}

}  // namespace tablex
