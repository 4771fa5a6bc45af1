// tablex: batch table structure recognition and scoring.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "tablex/annotations.hpp"
#include "tablex/config.hpp"
#include "tablex/error.hpp"
#include "tablex/eval.hpp"
#include "tablex/fixtures.hpp"
#include "tablex/pipeline.hpp"

namespace {

using tablex::PipelineConfig;
using tablex::Stage;

struct StageArgs {
  std::string images;
  std::string detections;
  std::string out;
  std::string config;
  std::string ocr;
  bool debug_overlays = false;
  int jobs = 1;
  double nms_iou = tablex::kDefaultNmsIou;
  bool print_config = false;

  CLI::Option* config_opt = nullptr;
  CLI::Option* ocr_opt = nullptr;
  CLI::Option* overlays_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* nms_opt = nullptr;
};

void add_stage_options(CLI::App* cmd, StageArgs& a, bool with_ocr, bool with_overlays) {
  cmd->add_option("--images", a.images, "Directory of page images (PNG/JPEG)")
      ->envname("TABLEX_IMAGES");
  cmd->add_option("--detections", a.detections, "Detections JSON or COCO file")
      ->envname("TABLEX_DETECTIONS");
  cmd->add_option("--out", a.out, "Output directory")->envname("TABLEX_OUT");
  a.config_opt = cmd->add_option("--config", a.config, "Pipeline config JSON")
                     ->envname("TABLEX_CONFIG")
                     ->check(CLI::ExistingFile);
  a.jobs_opt = cmd->add_option("--jobs", a.jobs, "Worker threads")
                   ->envname("TABLEX_JOBS")
                   ->check(CLI::PositiveNumber);
  a.nms_opt = cmd->add_option("--nms-iou", a.nms_iou, "NMS IoU threshold")
                  ->envname("TABLEX_NMS_IOU");
  if (with_ocr) {
    a.ocr_opt = cmd->add_option("--ocr", a.ocr,
                                "stub | stub:<manifest> | subprocess:<executable>")
                    ->envname("TABLEX_OCR");
  }
  if (with_overlays) {
    a.overlays_opt = cmd->add_flag("--debug-overlays", a.debug_overlays,
                                   "Write <page>.overlay.png next to the JSON")
                         ->envname("TABLEX_DEBUG_OVERLAYS");
  }
  cmd->add_flag("--print-config", a.print_config,
                "Print the effective config and exit");
}

// Flags and environment win over the config file, which wins over defaults.
PipelineConfig effective_config(const StageArgs& a) {
  PipelineConfig cfg;
  if (a.config_opt->count() > 0) cfg = tablex::load_config(a.config, cfg);
  if (a.jobs_opt->count() > 0) cfg.jobs = a.jobs;
  if (a.nms_opt->count() > 0) cfg.nms_iou = a.nms_iou;
  if (a.ocr_opt && a.ocr_opt->count() > 0) cfg.ocr = a.ocr;
  if (a.overlays_opt && a.overlays_opt->count() > 0) cfg.debug_overlays = a.debug_overlays;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw tablex::FormatError(e.what());
  }
  return cfg;
}

int run_stage(const StageArgs& a, Stage stage) {
  const PipelineConfig cfg = effective_config(a);
  if (a.print_config) {
    std::cout << tablex::config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  if (a.images.empty() || a.detections.empty() || a.out.empty()) {
    std::cerr << "--images, --detections and --out are required\n";
    return 2;
  }
  const auto summary = tablex::run_pipeline({a.images, a.detections, a.out, stage}, cfg);
  std::cerr << summary.pages << " page(s), " << summary.tables << " table(s), "
            << summary.errors.size() << " error(s), " << summary.warnings.size()
            << " warning(s)\n";
  for (const auto& e : summary.errors) {
    std::cerr << "  " << e.page_id << ": " << e.message << '\n';
  }
  return summary.exit_code();
}

std::vector<tablex::PageContent> load_predictions(const std::filesystem::path& path) {
  auto parse_file = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw tablex::FormatError("cannot open " + p.string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw tablex::FormatError(p.string() + ": " + e.what());
    }
  };
  std::vector<tablex::PageContent> pages;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) pages.push_back(tablex::parse_page_json(parse_file(f)));
    return pages;
  }
  const auto doc = parse_file(path);
  if (doc.is_array()) {
    for (const auto& p : doc) pages.push_back(tablex::parse_page_json(p));
  } else {
    pages.push_back(tablex::parse_page_json(doc));
  }
  return pages;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Table structure recognition on page images"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->envname("TABLEX_LOG_LEVEL");

  StageArgs extract_args, classify_args, cells_args;
  auto* extract = app.add_subcommand("extract", "Classify, detect cells and read text");
  add_stage_options(extract, extract_args, true, true);
  auto* classify = app.add_subcommand("classify", "Print the type of every detected table");
  add_stage_options(classify, classify_args, false, false);
  auto* cells = app.add_subcommand("cells", "Detect the cell grid of every table");
  add_stage_options(cells, cells_args, false, true);

  std::string predictions, truth, report_out;
  auto* eval = app.add_subcommand("eval", "Score predictions against COCO ground truth");
  eval->add_option("--predictions", predictions, "Prediction JSON file or directory")
      ->required();
  eval->add_option("--truth", truth, "COCO ground truth")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", report_out, "Write the report JSON here");

  std::string fixtures_out, specs_file;
  std::uint64_t seed = 1;
  std::size_t pages = 4;
  auto* fixtures = app.add_subcommand("fixtures", "Generate synthetic pages with ground truth");
  fixtures->add_option("--out", fixtures_out, "Output directory")->required();
  fixtures->add_option("--seed", seed, "Generator seed");
  fixtures->add_option("--pages", pages, "Page count for the default mix");
  fixtures->add_option("--specs", specs_file, "Page spec JSON {\"pages\": [{\"tables\": [...]}]}")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*extract) return run_stage(extract_args, Stage::Extract);
    if (*classify) return run_stage(classify_args, Stage::Classify);
    if (*cells) return run_stage(cells_args, Stage::Cells);
    if (*eval) {
      const auto report =
          tablex::evaluate(load_predictions(predictions), tablex::load_coco(truth));
      if (!report_out.empty()) {
        tablex::write_file_atomic(report_out, tablex::report_to_json(report).dump(2) + "\n");
      }
      std::cout << tablex::format_report(report);
      return 0;
    }
    if (*fixtures) {
      std::vector<tablex::PageSpec> specs;
      if (!specs_file.empty()) {
        std::ifstream in(specs_file);
        specs = tablex::page_specs_from_json(nlohmann::json::parse(in));
      } else {
        specs = tablex::default_page_specs(pages, seed);
      }
      tablex::write_fixtures(tablex::generate_fixtures(specs, seed), fixtures_out);
      std::cerr << specs.size() << " page(s) written to " << fixtures_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
