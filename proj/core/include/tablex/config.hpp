#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "tablex/cells.hpp"
#include "tablex/classifier.hpp"
#include "tablex/detector.hpp"

namespace tablex {

/// Every tunable of a pipeline run. Serializes to a single JSON document so
/// a run can be reproduced from its config artifact.
struct PipelineConfig {
  ClassifierParams classifier;
  CellParams cells;
  double nms_iou = kDefaultNmsIou;
  /// "stub" (manifest next to the detections file), "stub:<manifest>" or
  /// "subprocess:<executable>".
  std::string ocr = "stub";
  bool debug_overlays = false;
  int jobs = 1;

  /// Throws std::invalid_argument.
  void validate() const;
};

nlohmann::ordered_json config_to_json(const PipelineConfig& config);

/// Applies the keys present in `doc` on top of `base`. Unknown keys and
/// out-of-range values throw FormatError.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

}  // namespace tablex
