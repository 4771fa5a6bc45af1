#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablex/bbox.hpp"

namespace tablex {

struct Detection {
  BBox box;
  double confidence = 1.0;
  std::string page_id;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Tables do not overlap, so any measurable overlap marks a duplicate.
inline constexpr double kDefaultNmsIou = 0.01;

/// Total order used wherever detections are ranked: confidence descending,
/// then area descending, then (x_min, y_min, x_max, y_max) ascending.
bool ranks_before(const Detection& a, const Detection& b);

/// Greedy non-maximal suppression. Repeatedly keeps the best-ranked
/// remaining detection and drops every remaining one whose IoU with it is
/// strictly greater than `iou_threshold`. Output follows the ranking order.
std::vector<Detection> nms(std::vector<Detection> detections,
                           double iou_threshold = kDefaultNmsIou);

/// Clips every box to the page; boxes that vanish are dropped.
std::vector<Detection> clip_to_page(std::vector<Detection> detections,
                                    int page_width, int page_height);

using DetectionsByPage = std::map<std::string, std::vector<Detection>>;

/// Accepts either {"detections": [...]} or a COCO annotation file, whose
/// table annotations become detections with confidence 1.0.
DetectionsByPage parse_detections(const nlohmann::json& doc);
DetectionsByPage load_detections(const std::filesystem::path& path);

nlohmann::ordered_json detections_to_json(const DetectionsByPage& pages);

}  // namespace tablex
