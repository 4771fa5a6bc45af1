#include "tablex/detector.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "tablex/annotations.hpp"
#include "tablex/error.hpp"

namespace tablex {

bool ranks_before(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  const double area_a = a.box.area();
  const double area_b = b.box.area();
  if (area_a != area_b) return area_a > area_b;
  return std::tie(a.box.x_min, a.box.y_min, a.box.x_max, a.box.y_max) <
         std::tie(b.box.x_min, b.box.y_min, b.box.x_max, b.box.y_max);
}

std::vector<Detection> nms(std::vector<Detection> detections,
                           double iou_threshold) {
  std::stable_sort(detections.begin(), detections.end(), ranks_before);
  std::vector<Detection> kept;
  std::vector<bool> suppressed(detections.size(), false);
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (suppressed[i]) continue;
    kept.push_back(detections[i]);
    for (std::size_t j = i + 1; j < detections.size(); ++j) {
      if (!suppressed[j] &&
          iou(detections[i].box, detections[j].box) > iou_threshold) {
        suppressed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<Detection> clip_to_page(std::vector<Detection> detections,
                                    int page_width, int page_height) {
  std::vector<Detection> out;
  out.reserve(detections.size());
  for (auto& d : detections) {
    d.box = clip_box(d.box, page_width, page_height);
    if (d.box.valid()) out.push_back(std::move(d));
  }
  return out;
}

namespace {

DetectionsByPage from_annotations(const AnnotationSet& set) {
  DetectionsByPage pages;
  for (const auto& page : set.pages) {
    auto& dets = pages[page.page_id];
    for (const auto& table : page.tables) {
      dets.push_back({table.box, 1.0, page.page_id});
    }
  }
  return pages;
}

}  // namespace

DetectionsByPage parse_detections(const nlohmann::json& doc) {
  if (doc.is_object() && doc.contains("images") && doc.contains("annotations")) {
    return from_annotations(parse_coco(doc));
  }
  if (!doc.is_object() || !doc.contains("detections") ||
      !doc["detections"].is_array()) {
    throw FormatError("detections file must be an object with a "
                      "\"detections\" array");
  }
  DetectionsByPage pages;
  std::size_t index = 0;
  for (const auto& rec : doc["detections"]) {
    const std::string where = "detection " + std::to_string(index);
    try {
      const auto& bbox = rec.at("bbox");
      if (!bbox.is_array() || bbox.size() != 4) {
        throw FormatError(where + ": bbox must have 4 numbers");
      }
      Detection d;
      d.page_id = rec.at("page_id").get<std::string>();
      d.box = {bbox[0].get<double>(), bbox[1].get<double>(),
               bbox[2].get<double>(), bbox[3].get<double>()};
      d.confidence = rec.at("confidence").get<double>();
      if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
        throw FormatError(where + ": confidence outside [0, 1]");
      }
      if (!d.box.valid()) {
        throw FormatError(where + ": degenerate or negative bbox");
      }
      pages[d.page_id].push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    ++index;
  }
  return pages;
}

DetectionsByPage load_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open detections file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return parse_detections(doc);
}

nlohmann::ordered_json detections_to_json(const DetectionsByPage& pages) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& [page_id, dets] : pages) {
    for (const auto& d : dets) {
      list.push_back({{"page_id", page_id},
                      {"bbox", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}},
                      {"confidence", d.confidence}});
    }
  }
  return {{"detections", std::move(list)}};
}

}  // namespace tablex
