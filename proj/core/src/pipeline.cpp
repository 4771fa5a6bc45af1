#include "tablex/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "tablex/error.hpp"

namespace tablex {

std::vector<TableAnalysis> analyze_page(const GrayImage& page,
                                        std::vector<Detection> detections,
                                        const PipelineConfig& config, Stage stage,
                                        OcrEngine* engine) {
  detections = nms(clip_to_page(std::move(detections), page.width(), page.height()),
                   config.nms_iou);
  std::vector<TableAnalysis> out;
  for (auto& det : detections) {
    const PixelRect rect = clip_to(det.box.to_rect(), page.width(), page.height());
    if (rect.empty()) continue;
    const GrayImage tab = page.crop(rect);
    TableAnalysis t;
    t.detection = std::move(det);
    t.type = classify(tab, config.classifier);
    if (stage != Stage::Classify) {
      t.grid = detect_cells(tab, t.type, BBox::from_rect(rect), config.cells,
                            config.classifier);
    }
    if (stage == Stage::Extract) {
      t.content = extract_table(page, t.grid, t.type, t.detection.confidence, *engine);
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

nlohmann::ordered_json box_json(const BBox& b) {
  return nlohmann::ordered_json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

}  // namespace

nlohmann::ordered_json stage_json(const std::vector<TableAnalysis>& tables,
                                  const std::string& page_id, Stage stage) {
  if (stage == Stage::Extract) {
    std::vector<TableContent> contents;
    for (const auto& t : tables) contents.push_back(t.content);
    return emit_json(contents, page_id);
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : tables) {
    nlohmann::ordered_json j{{"bbox", box_json(t.detection.box)},
                             {"type", std::string(to_string(t.type))},
                             {"confidence", t.detection.confidence}};
    if (stage == Stage::Cells) {
      j["n_rows"] = t.grid.rows;
      j["n_cols"] = t.grid.cols;
      nlohmann::ordered_json cells = nlohmann::ordered_json::array();
      for (int r = 0; r < t.grid.rows; ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int c = 0; c < t.grid.cols; ++c) row.push_back(box_json(t.grid.at(r, c)));
        cells.push_back(std::move(row));
      }
      j["cells"] = std::move(cells);
    }
    arr.push_back(std::move(j));
  }
  return {{"page_id", page_id}, {"tables", std::move(arr)}};
}

RgbImage render_overlay(const GrayImage& page, const std::vector<TableAnalysis>& tables) {
  constexpr std::array<std::uint8_t, 3> kTable{0, 0, 255};
  constexpr std::array<std::uint8_t, 3> kCell{255, 0, 0};
  constexpr std::array<std::uint8_t, 3> kSeparator{0, 160, 0};
  RgbImage img = RgbImage::from_gray(page);
  for (const auto& t : tables) {
    const PixelRect tr = t.detection.box.to_rect();
    for (const auto& cell : t.grid.cells) img.draw_rect(cell.to_rect(), kCell);
    if (t.grid.rows > 0 && t.grid.cols > 0) {
      for (int c = 1; c < t.grid.cols; ++c) {
        const int x = static_cast<int>(t.grid.at(0, c).x_min);
        for (int y = tr.y; y < tr.bottom(); ++y) img.set(x, y, kSeparator);
      }
      for (int r = 1; r < t.grid.rows; ++r) {
        const int y = static_cast<int>(t.grid.at(r, 0).y_min);
        for (int x = tr.x; x < tr.right(); ++x) img.set(x, y, kSeparator);
      }
    }
    img.draw_rect(tr, kTable);
  }
  return img;
}

namespace {

class StubProvider final : public OcrProvider {
 public:
  explicit StubProvider(OcrManifest manifest) : manifest_(std::move(manifest)) {}
  std::shared_ptr<OcrEngine> engine_for(const std::string& page_id) override {
    const auto it = manifest_.find(page_id);
    return std::make_shared<StubOcrEngine>(it == manifest_.end() ? std::vector<OcrWord>{}
                                                                 : it->second);
  }

 private:
  OcrManifest manifest_;
};

class SharedProvider final : public OcrProvider {
 public:
  explicit SharedProvider(std::shared_ptr<OcrEngine> engine) : engine_(std::move(engine)) {}
  std::shared_ptr<OcrEngine> engine_for(const std::string&) override { return engine_; }

 private:
  std::shared_ptr<OcrEngine> engine_;
};

}  // namespace

std::unique_ptr<OcrProvider> make_ocr_provider(const PipelineConfig& config,
                                               const std::filesystem::path& detections_dir,
                                               const std::filesystem::path& scratch_dir) {
  const std::string& spec = config.ocr;
  if (spec == "stub") {
    return std::make_unique<StubProvider>(load_manifest(detections_dir / "ocr_manifest.json"));
  }
  if (spec.rfind("stub:", 0) == 0) {
    return std::make_unique<StubProvider>(load_manifest(spec.substr(5)));
  }
  if (spec.rfind("subprocess:", 0) == 0) {
    return std::make_unique<SharedProvider>(
        std::make_shared<SubprocessOcrEngine>(spec.substr(11), scratch_dir));
  }
  throw FormatError("unknown ocr adapter: " + spec);
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError("images directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw FormatError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

void write_png_atomic(const std::filesystem::path& path, const RgbImage& img) {
  const auto tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  write_png(tmp, img);
  std::filesystem::rename(tmp, path);
}

}  // namespace

RunSummary run_pipeline(const RunInputs& in, const PipelineConfig& config,
                        OcrProvider* ocr) {
  config.validate();
  const auto images = list_images(in.images);
  const DetectionsByPage detections = load_detections(in.detections);
  std::filesystem::create_directories(in.out);

  std::unique_ptr<OcrProvider> owned;
  if (in.stage == Stage::Extract && ocr == nullptr && !images.empty()) {
    owned = make_ocr_provider(config, in.detections.parent_path(), in.out);
    ocr = owned.get();
  }

  RunSummary summary;
  summary.pages = images.size();
  std::set<std::string> seen;
  for (const auto& p : images) {
    if (!seen.insert(p.stem().string()).second) {
      throw FormatError("two images share the page id " + p.stem().string());
    }
  }

  std::mutex mu;
  auto warn = [&](std::string msg) {
    spdlog::warn("{}", msg);
    std::lock_guard lock(mu);
    summary.warnings.push_back(std::move(msg));
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < images.size(); i = next++) {
      const std::string page_id = images[i].stem().string();
      try {
        const GrayImage page = read_image(images[i]);
        std::vector<Detection> dets;
        if (auto it = detections.find(page_id); it != detections.end()) {
          dets = it->second;
        } else {
          warn("no detections for page " + page_id);
        }
        std::shared_ptr<OcrEngine> engine;
        if (in.stage == Stage::Extract) engine = ocr->engine_for(page_id);
        const auto tables = analyze_page(page, std::move(dets), config, in.stage, engine.get());
        write_file_atomic(in.out / (page_id + ".json"),
                          stage_json(tables, page_id, in.stage).dump(2) + "\n");
        if (config.debug_overlays && in.stage != Stage::Classify) {
          write_png_atomic(in.out / (page_id + ".overlay.png"), render_overlay(page, tables));
        }
        std::lock_guard lock(mu);
        summary.tables += tables.size();
      } catch (const std::exception& e) {
        spdlog::error("page {}: {}", page_id, e.what());
        std::lock_guard lock(mu);
        summary.errors.push_back({page_id, e.what()});
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.jobs), images.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  std::sort(summary.errors.begin(), summary.errors.end(),
            [](const PageError& a, const PageError& b) { return a.page_id < b.page_id; });
  std::sort(summary.warnings.begin(), summary.warnings.end());
  return summary;
}

}  // namespace tablex
