#include "tablex/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>

#include "tablex/error.hpp"

namespace tablex {

std::vector<std::vector<std::string>> AnnotatedTable::text_grid() const {
  int rows = 0;
  int cols = 0;
  for (const auto& c : cells) {
    if (c.row < 0 || c.col < 0) return {};
    rows = std::max(rows, c.row + 1);
    cols = std::max(cols, c.col + 1);
  }
  std::vector<std::vector<std::string>> grid(rows,
                                             std::vector<std::string>(cols));
  for (const auto& c : cells) grid[c.row][c.col] = c.text;
  return grid;
}

const AnnotatedPage* AnnotationSet::find(const std::string& page_id) const {
  auto it = std::find_if(pages.begin(), pages.end(),
                         [&](const AnnotatedPage& p) { return p.page_id == page_id; });
  return it == pages.end() ? nullptr : &*it;
}

std::string page_id_from_file_name(const std::string& file_name) {
  return std::filesystem::path(file_name).stem().string();
}

namespace {

enum class Kind { Table, Cell };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

BBox from_xywh(const nlohmann::json& bbox, const std::string& where) {
  if (!bbox.is_array() || bbox.size() != 4) {
    throw FormatError(where + ": bbox must be [x, y, w, h]");
  }
  const double x = bbox[0].get<double>();
  const double y = bbox[1].get<double>();
  BBox box{x, y, x + bbox[2].get<double>(), y + bbox[3].get<double>()};
  if (!box.valid()) throw FormatError(where + ": degenerate bbox");
  return box;
}

bool contains(const BBox& outer, const BBox& inner) {
  constexpr double kSlack = 1.0;
  return inner.x_min >= outer.x_min - kSlack && inner.y_min >= outer.y_min - kSlack &&
         inner.x_max <= outer.x_max + kSlack && inner.y_max <= outer.y_max + kSlack;
}

}  // namespace

AnnotationSet parse_coco(const nlohmann::json& doc) {
  AnnotationSet set;
  try {
    std::map<long long, Kind> categories;
    for (const auto& cat : doc.value("categories", nlohmann::json::array())) {
      const std::string name = lower(cat.at("name").get<std::string>());
      if (name == "table") {
        categories[cat.at("id").get<long long>()] = Kind::Table;
      } else if (name == "cell" || name == "table_cell" || name == "table cell") {
        categories[cat.at("id").get<long long>()] = Kind::Cell;
      } else {
        throw FormatError("unknown category \"" + name + "\"");
      }
    }

    std::map<long long, std::size_t> page_index;
    for (const auto& img : doc.at("images")) {
      AnnotatedPage page;
      page.file_name = img.at("file_name").get<std::string>();
      page.page_id = page_id_from_file_name(page.file_name);
      page.width = img.value("width", 0);
      page.height = img.value("height", 0);
      page_index[img.at("id").get<long long>()] = set.pages.size();
      set.pages.push_back(std::move(page));
    }

    // Tables first so that cells can be grouped by containment.
    std::vector<std::pair<std::size_t, AnnotatedCell>> loose_cells;
    std::size_t index = 0;
    for (const auto& ann : doc.at("annotations")) {
      const std::string where = "annotation " + std::to_string(index++);
      const auto cat = categories.find(ann.at("category_id").get<long long>());
      if (cat == categories.end()) {
        throw FormatError(where + ": unknown category id");
      }
      const auto page = page_index.find(ann.at("image_id").get<long long>());
      if (page == page_index.end()) {
        throw FormatError(where + ": unknown image id");
      }
      const BBox box = from_xywh(ann.at("bbox"), where);
      if (cat->second == Kind::Table) {
        AnnotatedTable table;
        table.box = box;
        table.table_type = ann.value("table_type", std::string{});
        set.pages[page->second].tables.push_back(std::move(table));
      } else {
        AnnotatedCell cell;
        cell.box = box;
        cell.text = ann.value("text", std::string{});
        cell.row = ann.value("row", -1);
        cell.col = ann.value("col", -1);
        loose_cells.emplace_back(page->second, std::move(cell));
      }
    }

    for (auto& [pi, cell] : loose_cells) {
      auto& page = set.pages[pi];
      if (page.tables.empty()) {
        set.warnings.push_back("page " + page.page_id +
                               ": cell annotation without any table dropped");
        continue;
      }
      AnnotatedTable* host = nullptr;
      double host_area = std::numeric_limits<double>::infinity();
      for (auto& t : page.tables) {
        if (contains(t.box, cell.box) && t.box.area() < host_area) {
          host = &t;
          host_area = t.box.area();
        }
      }
      if (host == nullptr) {
        double best = -1;
        for (auto& t : page.tables) {
          const double overlap = intersection_area(t.box, cell.box);
          if (overlap > best) {
            best = overlap;
            host = &t;
          }
        }
        if (best <= 0) {
          set.warnings.push_back("page " + page.page_id +
                                 ": cell annotation overlaps no table");
        }
      }
      host->cells.push_back(std::move(cell));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("COCO annotations: ") + e.what());
  }
  return set;
}

AnnotationSet load_coco(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open annotation file " + path.string());
  try {
    return parse_coco(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

nlohmann::ordered_json to_coco(const AnnotationSet& set) {
  using nlohmann::ordered_json;
  ordered_json images = ordered_json::array();
  ordered_json annotations = ordered_json::array();
  auto xywh = [](const BBox& b) {
    return ordered_json::array({b.x_min, b.y_min, b.width(), b.height()});
  };
  long long ann_id = 1;
  for (std::size_t pi = 0; pi < set.pages.size(); ++pi) {
    const auto& page = set.pages[pi];
    const long long image_id = static_cast<long long>(pi) + 1;
    images.push_back({{"id", image_id},
                      {"file_name", page.file_name},
                      {"width", page.width},
                      {"height", page.height}});
    for (const auto& table : page.tables) {
      ordered_json t = {{"id", ann_id++},
                        {"image_id", image_id},
                        {"category_id", 1},
                        {"bbox", xywh(table.box)},
                        {"area", table.box.area()},
                        {"iscrowd", 0}};
      if (!table.table_type.empty()) t["table_type"] = table.table_type;
      annotations.push_back(std::move(t));
      for (const auto& cell : table.cells) {
        ordered_json c = {{"id", ann_id++},
                          {"image_id", image_id},
                          {"category_id", 2},
                          {"bbox", xywh(cell.box)},
                          {"area", cell.box.area()},
                          {"iscrowd", 0},
                          {"text", cell.text}};
        if (cell.row >= 0) c["row"] = cell.row;
        if (cell.col >= 0) c["col"] = cell.col;
        annotations.push_back(std::move(c));
      }
    }
  }
  return {{"images", std::move(images)},
          {"annotations", std::move(annotations)},
          {"categories", ordered_json::array({{{"id", 1}, {"name", "table"}},
                                              {{"id", 2}, {"name", "cell"}}})}};
}

}  // namespace tablex
