#include <benchmark/benchmark.h>

#include <random>

#include "textshape/alpha_shape.hpp"
#include "textshape/delaunay.hpp"

namespace {

std::vector<textshape::Point2> uniform_points(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<textshape::Point2> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

void BM_Delaunay(benchmark::State& state) {
  const auto pts = uniform_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(textshape::delaunay_mesh(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Delaunay)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_AlphaShape(benchmark::State& state) {
  const auto pts = uniform_points(static_cast<std::size_t>(state.range(0)));
  const textshape::AlphaParam alpha(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(textshape::alpha_shape(pts, alpha));
}
BENCHMARK(BM_AlphaShape)->RangeMultiplier(4)->Range(256, 16384);

void BM_PolygonIou(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<textshape::Point2> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(n);
    const double r = 1.0 + 0.3 * std::sin(5 * t);
    a.push_back({r * std::cos(t), r * std::sin(t)});
    b.push_back({0.2 + r * std::cos(t), r * std::sin(t)});
  }
  const textshape::Polygon pa(a), pb(b);
  for (auto _ : state) benchmark::DoNotOptimize(textshape::polygon_iou(pa, pb));
}
BENCHMARK(BM_PolygonIou)->Arg(4)->Arg(28)->Arg(200);

}  // namespace
