#include <benchmark/benchmark.h>

#include "synthetic_suite.hpp"
#include "textshape/decode.hpp"

namespace {

using textshape::testing::make_arc;
using textshape::testing::place;

struct Scene {
  std::vector<textshape::AnnotationPolygon> anns;
  textshape::ImageSize image;
};

// A wide arc and a long straight line, the shapes that dominate decode time.
Scene scene() {
  Scene s;
  s.anns.push_back(make_arc({0, 0}, 260, 48, 2.4, 7, 0.0));
  s.image = place(s.anns.back(), 16);
  s.anns.push_back(textshape::split_sides(std::vector<textshape::Point2>{
      {16, s.image.height + 10.0}, {500, s.image.height + 10.0}, {500, s.image.height + 50.0},
      {16, s.image.height + 50.0}}));
  s.image.height += 70;
  s.image.width = std::max(s.image.width, 520);
  return s;
}

void BM_Encode(benchmark::State& state) {
  const Scene s = scene();
  const auto grid = textshape::RasterGrid::covering(s.image.width, s.image.height, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(textshape::encode(s.anns, grid));
}
BENCHMARK(BM_Encode)->Arg(1)->Arg(4);

void BM_Decode(benchmark::State& state) {
  const Scene s = scene();
  const auto grid = textshape::RasterGrid::covering(s.image.width, s.image.height, static_cast<int>(state.range(0)));
  const auto pred = textshape::prediction_from_labels(textshape::encode(s.anns, grid));
  for (auto _ : state) benchmark::DoNotOptimize(textshape::decode(pred));
}
BENCHMARK(BM_Decode)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
