#include <benchmark/benchmark.h>

#include <random>

#include "textshape/evalkit.hpp"

namespace {

void BM_Match(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(-8.0, 8.0), score(0.0, 1.0);
  std::vector<textshape::AnnotationPolygon> gts;
  std::vector<textshape::Detection> dets;
  for (int k = 0; k < n; ++k) {
    const double x = 150.0 * (k % 10), y = 60.0 * (k / 10);
    gts.push_back(textshape::split_sides(
        std::vector<textshape::Point2>{{x, y}, {x + 120, y}, {x + 120, y + 40}, {x, y + 40}}));
    textshape::Detection d;
    const double dx = jitter(rng), dy = jitter(rng);
    d.polygon = textshape::Polygon({{x + dx, y + dy}, {x + 120 + dx, y + dy}, {x + 120 + dx, y + 40 + dy},
                                    {x + dx, y + 40 + dy}});
    d.score = score(rng);
    dets.push_back(d);
  }
  for (auto _ : state) benchmark::DoNotOptimize(textshape::match(dets, gts));
}
BENCHMARK(BM_Match)->Arg(10)->Arg(50)->Arg(200);

}  // namespace
