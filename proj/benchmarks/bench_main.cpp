#include <benchmark/benchmark.h>

#include <random>

#include "tablex/cells.hpp"
#include "tablex/classifier.hpp"
#include "tablex/detector.hpp"
#include "tablex/fixtures.hpp"
#include "tablex/imgproc.hpp"

using namespace tablex;

namespace {

RenderedTable fixture(TableType type, int scale) {
  std::mt19937_64 rng(42);
  FixtureSpec spec = random_spec(type, rng, 6, 6, 5, 5);
  spec.scale = scale;
  return render_table(spec, rng);
}

void BM_ExtractLines(benchmark::State& state) {
  const auto t = fixture(TableType::Bordered, static_cast<int>(state.range(0)));
  const BinaryImage ink = otsu_binarize(t.image).binary;
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_lines(ink, Orientation::Horizontal, 0.15));
  }
  state.SetLabel(std::to_string(ink.width()) + "x" + std::to_string(ink.height()));
}
BENCHMARK(BM_ExtractLines)->Arg(1)->Arg(2)->Arg(4);

void BM_Classify(benchmark::State& state) {
  const auto type = static_cast<TableType>(state.range(0));
  const auto t = fixture(type, 2);
  for (auto _ : state) benchmark::DoNotOptimize(classify(t.image));
  state.SetLabel(std::string(to_string(type)));
}
BENCHMARK(BM_Classify)->DenseRange(0, 3);

void BM_DetectCells(benchmark::State& state) {
  const auto type = static_cast<TableType>(state.range(0));
  const auto t = fixture(type, 2);
  const BBox box{0, 0, double(t.image.width()), double(t.image.height())};
  for (auto _ : state) benchmark::DoNotOptimize(detect_cells(t.image, type, box));
  state.SetLabel(std::string(to_string(type)));
}
BENCHMARK(BM_DetectCells)->DenseRange(0, 3);

void BM_Nms(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<Detection> dets;
  for (int i = 0; i < state.range(0); ++i) {
    const double x = static_cast<double>(rng() % 1000);
    const double y = static_cast<double>(rng() % 1000);
    dets.push_back({{x, y, x + 50 + rng() % 200, y + 50 + rng() % 200},
                    static_cast<double>(rng() % 1000) / 1000.0, "table"});
  }
  for (auto _ : state) benchmark::DoNotOptimize(nms(dets, kDefaultNmsIou));
}
BENCHMARK(BM_Nms)->Arg(10)->Arg(100)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
