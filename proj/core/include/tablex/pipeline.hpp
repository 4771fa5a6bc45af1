#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablex/cells.hpp"
#include "tablex/classifier.hpp"
#include "tablex/codec.hpp"
#include "tablex/config.hpp"
#include "tablex/detector.hpp"
#include "tablex/extract.hpp"
#include "tablex/ocr.hpp"

namespace tablex {

/// How far a run goes; each stage writes its own per-page JSON.
enum class Stage { Classify, Cells, Extract };

struct TableAnalysis {
  Detection detection;  ///< after clipping and NMS
  TableType type = TableType::Borderless;
  CellGrid grid;
  TableContent content;  ///< filled by the Extract stage only
};

/// Per-page work after decoding: clip, NMS, then crop, classify, detect
/// cells and (for Extract) read text for every surviving detection.
/// `engine` may be null unless `stage` is Extract.
std::vector<TableAnalysis> analyze_page(const GrayImage& page,
                                        std::vector<Detection> detections,
                                        const PipelineConfig& config, Stage stage,
                                        OcrEngine* engine);

nlohmann::ordered_json stage_json(const std::vector<TableAnalysis>& tables,
                                  const std::string& page_id, Stage stage);

/// Table box in blue, cell boxes in red, interior separators in green.
RgbImage render_overlay(const GrayImage& page, const std::vector<TableAnalysis>& tables);

/// Supplies one engine per page. Implementations must be callable from
/// several workers at once.
class OcrProvider {
 public:
  virtual ~OcrProvider() = default;
  virtual std::shared_ptr<OcrEngine> engine_for(const std::string& page_id) = 0;
};

/// Builds the provider named by `config.ocr`. A bare "stub" reads
/// ocr_manifest.json from `detections_dir`.
std::unique_ptr<OcrProvider> make_ocr_provider(const PipelineConfig& config,
                                               const std::filesystem::path& detections_dir,
                                               const std::filesystem::path& scratch_dir);

struct PageError {
  std::string page_id;
  std::string message;
};

struct RunSummary {
  std::size_t pages = 0;
  std::size_t tables = 0;
  std::vector<PageError> errors;
  std::vector<std::string> warnings;

  int exit_code() const { return errors.empty() ? 0 : 1; }
};

struct RunInputs {
  std::filesystem::path images;
  std::filesystem::path detections;
  std::filesystem::path out;
  Stage stage = Stage::Extract;
};

/// Image files (.png, .jpg, .jpeg) in `dir`, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Writes `<out>/<page_id>.json` per image (and `<page_id>.overlay.png`
/// with debug overlays on) using `config.jobs` workers. Every file is
/// written to a temporary name and renamed into place. A page that fails
/// is reported in the summary; the others still run. Throws FormatError
/// or ImageError only for run-level input problems.
RunSummary run_pipeline(const RunInputs& inputs, const PipelineConfig& config,
                        OcrProvider* ocr = nullptr);

/// Temp file + rename in the same directory.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace tablex
