#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablex/bbox.hpp"
#include "tablex/image.hpp"

namespace tablex {

struct OcrWord {
  BBox box;
  std::string text;

  friend bool operator==(const OcrWord&, const OcrWord&) = default;
};

class OcrError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Engine-agnostic recognizer. `image` is a crop whose placement on the page
/// is `region`; returned word boxes are relative to the crop and must lie
/// within it. Failures are reported by throwing OcrError.
class OcrEngine {
 public:
  virtual ~OcrEngine() = default;
  virtual std::vector<OcrWord> recognize(const GrayImage& image,
                                         const BBox& region) = 0;
  /// Whether recognize() may be called from several threads at once.
  virtual bool concurrency_safe() const { return false; }
};

/// Page-coordinate words per page id, the sidecar the fixture generator
/// writes: {"pages": {"<page_id>": [{"bbox": [x0,y0,x1,y1], "text": s}]}}.
using OcrManifest = std::map<std::string, std::vector<OcrWord>>;

OcrManifest parse_manifest(const nlohmann::json& doc);
OcrManifest load_manifest(const std::filesystem::path& path);
nlohmann::ordered_json manifest_to_json(const OcrManifest& manifest);

/// Deterministic engine that "recognizes" the known words of one page:
/// every word whose box centre lies inside the queried region.
class StubOcrEngine final : public OcrEngine {
 public:
  explicit StubOcrEngine(std::vector<OcrWord> page_words)
      : words_(std::move(page_words)) {}

  std::vector<OcrWord> recognize(const GrayImage& image,
                                 const BBox& region) override;
  bool concurrency_safe() const override { return true; }

 private:
  std::vector<OcrWord> words_;
};

/// Runs `<executable> <crop.png>` and reads one word per stdout line as
/// "x0 y0 x1 y1<TAB>text". Calls are serialized.
class SubprocessOcrEngine final : public OcrEngine {
 public:
  SubprocessOcrEngine(std::filesystem::path executable,
                      std::filesystem::path scratch_dir);

  std::vector<OcrWord> recognize(const GrayImage& image,
                                 const BBox& region) override;

 private:
  std::filesystem::path executable_;
  std::filesystem::path scratch_dir_;
  std::mutex mutex_;
  unsigned long calls_ = 0;
};

/// Parses the subprocess output format. Throws OcrError on malformed lines.
std::vector<OcrWord> parse_word_lines(const std::string& output);

}  // namespace tablex
