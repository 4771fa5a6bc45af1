#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tablex/error.hpp"
#include "tablex/eval.hpp"
#include "tablex/fixtures.hpp"
#include "tablex/pipeline.hpp"

using namespace tablex;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("tablex_pipeline_" +
             std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  FixtureSet make_fixtures(std::size_t pages, std::uint64_t seed) {
    auto set = generate_fixtures(default_page_specs(pages, seed), seed);
    write_fixtures(set, root_ / "in");
    return set;
  }
  RunInputs inputs(Stage stage = Stage::Extract, const std::string& out = "out") const {
    return {root_ / "in" / "images", root_ / "in" / "detections.json", root_ / out, stage};
  }

  fs::path root_;
};

std::vector<PageContent> read_outputs(const fs::path& dir) {
  std::vector<PageContent> pages;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) pages.push_back(parse_page_json(nlohmann::json::parse(slurp(f))));
  return pages;
}

}  // namespace

TEST_F(PipelineTest, ZeroPagesLeaveAnEmptyOutputDirectory) {
  fs::create_directories(root_ / "in" / "images");
  std::ofstream(root_ / "in" / "detections.json") << R"({"detections": []})";
  const auto summary = run_pipeline(inputs(), {});
  EXPECT_EQ(summary.exit_code(), 0);
  EXPECT_EQ(summary.pages, 0u);
  EXPECT_TRUE(fs::is_empty(root_ / "out"));
}

TEST_F(PipelineTest, TwoTableFixturePageMatchesGroundTruth) {
  FixtureSpec a;
  a.rows = 3;
  a.cols = 4;
  a.type = TableType::Bordered;
  FixtureSpec b;
  b.rows = 4;
  b.cols = 2;
  b.type = TableType::Borderless;
  b.span_rows = {{2, 1, 1}};
  const std::vector<PageSpec> specs{{{a, b}}};
  write_fixtures(generate_fixtures(specs, 3), root_ / "in");
  const auto summary = run_pipeline(inputs(), {});
  ASSERT_EQ(summary.exit_code(), 0);
  const auto truth = load_coco(root_ / "in" / "ground_truth.json");
  const auto pages = read_outputs(root_ / "out");
  ASSERT_EQ(pages.size(), 1u);
  ASSERT_EQ(pages[0].tables.size(), 2u);
  for (const auto& table : pages[0].tables) {
    const AnnotatedTable* match = nullptr;
    for (const auto& t : truth.pages[0].tables) {
      if (iou(t.box, table.table_box) > 0.99) match = &t;
    }
    ASSERT_NE(match, nullptr);
    EXPECT_EQ(table.rows, match->text_grid());
    EXPECT_EQ(std::string(to_string(table.type)), match->table_type);
  }
}

TEST_F(PipelineTest, CorruptImageFailsOnlyItsPage) {
  make_fixtures(3, 4);
  std::ofstream(root_ / "in" / "images" / "page_001.png", std::ios::trunc) << "\x89PNG garbage";
  const auto summary = run_pipeline(inputs(), {});
  EXPECT_NE(summary.exit_code(), 0);
  ASSERT_EQ(summary.errors.size(), 1u);
  EXPECT_EQ(summary.errors[0].page_id, "page_001");
  EXPECT_TRUE(fs::exists(root_ / "out" / "page_000.json"));
  EXPECT_TRUE(fs::exists(root_ / "out" / "page_002.json"));
  EXPECT_FALSE(fs::exists(root_ / "out" / "page_001.json"));
}

TEST_F(PipelineTest, MissingDetectionsGiveEmptyTablesAndAWarning) {
  make_fixtures(1, 5);
  fs::copy_file(root_ / "in" / "images" / "page_000.png", root_ / "in" / "images" / "extra.png");
  const auto summary = run_pipeline(inputs(), {});
  EXPECT_EQ(summary.exit_code(), 0);
  ASSERT_EQ(summary.warnings.size(), 1u);
  EXPECT_NE(summary.warnings[0].find("extra"), std::string::npos);
  EXPECT_EQ(slurp(root_ / "out" / "extra.json"), "{\n  \"page_id\": \"extra\",\n  \"tables\": []\n}\n");
}

TEST_F(PipelineTest, OutputIsByteIdenticalAcrossRunsAndWorkerCounts) {
  make_fixtures(5, 6);
  PipelineConfig one;
  PipelineConfig many;
  many.jobs = 3;
  ASSERT_EQ(run_pipeline(inputs(Stage::Extract, "a"), one).exit_code(), 0);
  ASSERT_EQ(run_pipeline(inputs(Stage::Extract, "b"), many).exit_code(), 0);
  ASSERT_EQ(run_pipeline(inputs(Stage::Extract, "c"), one).exit_code(), 0);
  for (int i = 0; i < 5; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "page_%03d.json", i);
    const std::string a = slurp(root_ / "a" / name);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(root_ / "b" / name));
    EXPECT_EQ(a, slurp(root_ / "c" / name));
  }
  // No temporaries left behind.
  for (const auto& e : fs::directory_iterator(root_ / "b")) {
    EXPECT_EQ(e.path().extension(), ".json");
  }
}

TEST_F(PipelineTest, StagesAndOverlays) {
  make_fixtures(2, 7);
  PipelineConfig cfg;
  cfg.debug_overlays = true;
  ASSERT_EQ(run_pipeline(inputs(Stage::Classify, "cls"), cfg).exit_code(), 0);
  ASSERT_EQ(run_pipeline(inputs(Stage::Cells, "cells"), cfg).exit_code(), 0);
  const auto cls = nlohmann::json::parse(slurp(root_ / "cls" / "page_000.json"));
  ASSERT_FALSE(cls["tables"].empty());
  EXPECT_TRUE(cls["tables"][0].contains("type"));
  EXPECT_FALSE(cls["tables"][0].contains("cells"));
  const auto cells = nlohmann::json::parse(slurp(root_ / "cells" / "page_000.json"));
  const auto& t0 = cells["tables"][0];
  EXPECT_EQ(t0["cells"].size(), t0["n_rows"].get<std::size_t>());
  EXPECT_TRUE(fs::exists(root_ / "cells" / "page_000.overlay.png"));
  EXPECT_GT(read_image(root_ / "cells" / "page_000.overlay.png").width(), 0);
}

TEST_F(PipelineTest, ArbitraryBytesAsImagesNeverAbortTheRun) {
  fs::create_directories(root_ / "in" / "images");
  std::ofstream(root_ / "in" / "detections.json")
      << R"({"detections": [{"page_id": "f0", "bbox": [0, 0, 5, 5], "confidence": 0.5}]})";
  std::ofstream(root_ / "in" / "ocr_manifest.json") << R"({"pages": {}})";
  std::mt19937_64 rng(77);
  for (int i = 0; i < 30; ++i) {
    std::string bytes(rng() % 300, '\0');
    for (auto& ch : bytes) ch = static_cast<char>(rng());
    if (i % 3 == 0) bytes.insert(0, "\x89PNG\r\n\x1a\n");
    if (i % 3 == 1) bytes.insert(0, "\xff\xd8\xff");
    std::ofstream(root_ / "in" / "images" / ("f" + std::to_string(i) + ".png"), std::ios::binary)
        << bytes;
  }
  const auto summary = run_pipeline(inputs(), {});
  EXPECT_EQ(summary.pages, 30u);
  EXPECT_EQ(summary.errors.size(), 30u);
  EXPECT_NE(summary.exit_code(), 0);
}

TEST_F(PipelineTest, RunLevelInputErrorsThrow) {
  EXPECT_THROW(run_pipeline(inputs(), {}), FormatError);
  make_fixtures(1, 8);
  std::ofstream(root_ / "in" / "detections.json", std::ios::trunc) << "{not json";
  EXPECT_THROW(run_pipeline(inputs(), {}), FormatError);
}
