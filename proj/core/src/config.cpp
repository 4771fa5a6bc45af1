#include "tablex/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "tablex/error.hpp"

namespace tablex {

void PipelineConfig::validate() const {
  classifier.validate();
  cells.validate();
  if (!(nms_iou >= 0.0 && nms_iou < 1.0)) {
    throw std::invalid_argument("nms_iou must be in [0, 1)");
  }
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (ocr != "stub" && ocr.rfind("stub:", 0) != 0 && ocr.rfind("subprocess:", 0) != 0) {
    throw std::invalid_argument("ocr must be stub, stub:<manifest> or subprocess:<path>");
  }
  if (ocr == "stub:" || ocr == "subprocess:") {
    throw std::invalid_argument("ocr adapter is missing its path");
  }
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  return {{"classifier",
           {{"k_w", c.classifier.k_w},
            {"k_h", c.classifier.k_h},
            {"colour_ratio_threshold", c.classifier.colour_ratio_threshold}}},
          {"cells",
           {{"slider_width_tall", c.cells.slider_width_tall},
            {"slider_width_short", c.cells.slider_width_short},
            {"slider_width_default", c.cells.slider_width_default},
            {"short_table_height", c.cells.short_table_height},
            {"min_gutter_run", c.cells.min_gutter_run},
            {"fill_min_pixels", c.cells.fill_min_pixels}}},
          {"nms_iou", c.nms_iou},
          {"ocr", c.ocr},
          {"debug_overlays", c.debug_overlays},
          {"jobs", c.jobs}};
}

namespace {

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw FormatError("unknown config key " + where + "." + key);
  }
}

template <typename T>
void take(const nlohmann::json& obj, const char* key, T& field) {
  if (obj.contains(key)) field = obj.at(key).get<T>();
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig c) {
  try {
    reject_unknown(doc, {"classifier", "cells", "nms_iou", "ocr", "debug_overlays", "jobs"},
                   "config");
    if (doc.contains("classifier")) {
      const auto& j = doc["classifier"];
      reject_unknown(j, {"k_w", "k_h", "colour_ratio_threshold"}, "classifier");
      take(j, "k_w", c.classifier.k_w);
      take(j, "k_h", c.classifier.k_h);
      take(j, "colour_ratio_threshold", c.classifier.colour_ratio_threshold);
    }
    if (doc.contains("cells")) {
      const auto& j = doc["cells"];
      reject_unknown(j,
                     {"slider_width_tall", "slider_width_short", "slider_width_default",
                      "short_table_height", "min_gutter_run", "fill_min_pixels"},
                     "cells");
      take(j, "slider_width_tall", c.cells.slider_width_tall);
      take(j, "slider_width_short", c.cells.slider_width_short);
      take(j, "slider_width_default", c.cells.slider_width_default);
      take(j, "short_table_height", c.cells.short_table_height);
      take(j, "min_gutter_run", c.cells.min_gutter_run);
      take(j, "fill_min_pixels", c.cells.fill_min_pixels);
    }
    take(doc, "nms_iou", c.nms_iou);
    take(doc, "ocr", c.ocr);
    take(doc, "debug_overlays", c.debug_overlays);
    take(doc, "jobs", c.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return config_from_json(doc, std::move(base));
}

}  // namespace tablex
