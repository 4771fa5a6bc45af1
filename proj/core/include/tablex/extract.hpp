#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablex/cells.hpp"
#include "tablex/classifier.hpp"
#include "tablex/ocr.hpp"

namespace tablex {

struct TableContent {
  BBox table_box;
  TableType type = TableType::Borderless;
  double confidence = 1.0;
  /// rows x cols cell text.
  std::vector<std::vector<std::string>> rows;
  /// Matching cell boxes (page coordinates); may be empty when unknown.
  std::vector<std::vector<BBox>> cells;

  friend bool operator==(const TableContent&, const TableContent&) = default;
};

struct PageContent {
  std::string page_id;
  std::vector<TableContent> tables;

  friend bool operator==(const PageContent&, const PageContent&) = default;
};

/// One OCR call over the union of `row_cells` (sorted left to right). Each
/// word goes to the cell whose x-range holds its box centre; a centre on a
/// shared edge goes to the left cell. Words in a cell are joined by single
/// spaces in reading order. An OcrError yields empty strings and a warning.
std::vector<std::string> extract_row(const GrayImage& page,
                                     const std::vector<BBox>& row_cells,
                                     OcrEngine& engine);

/// extract_row for every grid row; the engine is called exactly grid.rows
/// times.
TableContent extract_table(const GrayImage& page, const CellGrid& grid,
                           TableType type, double confidence, OcrEngine& engine);

/// {"page_id", "tables": [{"bbox", "type", "confidence", "rows", "cells"}]}
/// with keys in that order.
nlohmann::ordered_json emit_json(const std::vector<TableContent>& contents,
                                 const std::string& page_id);
/// Inverse of emit_json. Throws FormatError.
PageContent parse_page_json(const nlohmann::json& doc);

}  // namespace tablex
