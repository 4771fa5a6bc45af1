#pragma once

// COCO-style ground truth: one category for tables, one for cells. Cell
// annotations may carry "text", "row" and "col"; table annotations may carry
// "table_type". Boxes are [x, y, width, height].

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablex/bbox.hpp"

namespace tablex {

struct AnnotatedCell {
  BBox box;
  std::string text;
  int row = -1;
  int col = -1;
};

struct AnnotatedTable {
  BBox box;
  std::string table_type;
  std::vector<AnnotatedCell> cells;

  /// Text grid from the row/col attributes; empty if any cell lacks them.
  std::vector<std::vector<std::string>> text_grid() const;
};

struct AnnotatedPage {
  std::string page_id;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::vector<AnnotatedTable> tables;
};

struct AnnotationSet {
  std::vector<AnnotatedPage> pages;
  std::vector<std::string> warnings;

  const AnnotatedPage* find(const std::string& page_id) const;
};

/// Page ids are the image file name without its extension.
std::string page_id_from_file_name(const std::string& file_name);

AnnotationSet parse_coco(const nlohmann::json& doc);
AnnotationSet load_coco(const std::filesystem::path& path);
nlohmann::ordered_json to_coco(const AnnotationSet& set);

}  // namespace tablex
