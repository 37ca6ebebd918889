#include "wlsm/methods.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace wlsm;

namespace {

ApertureSpec arc(double alpha, int n) {
  ApertureSpec s;
  s.alpha = alpha;
  s.n_points = n;
  return s;
}

InclusionGeometry bars() {
  InclusionGeometry g;
  g.shapes.push_back({Box2{Point(0.2, -0.25, 0), Point(0.4, 0.25, 0)}, 1.0});
  g.shapes.push_back({Box2{Point(-0.4, -0.25, 0), Point(-0.2, 0.25, 0)}, 1.0});
  return g;
}

const WaveConfig kWave{2, 6.0};

}  // namespace

static void BM_ExactFarField(benchmark::State& st) {
  const auto mesh = build_mesh(bars(), 2, 0.05 / st.range(0));
  const auto spec = arc(std::numbers::pi / 3, 16);
  for (auto _ : st) benchmark::DoNotOptimize(far_field_exact(mesh, kWave, spec));
  st.counters["nodes"] = mesh.size();
}
BENCHMARK(BM_ExactFarField)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BornFarField(benchmark::State& st) {
  const auto spec = arc(std::numbers::pi / 3, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(far_field_born(bars(), kWave, spec));
}
BENCHMARK(BM_BornFarField)->Arg(16)->Arg(64);

static void BM_NormalEqWeights(benchmark::State& st) {
  const auto spec = arc(std::numbers::pi / 3, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(weights_normal_eq_2d(spec, kWave));
}
BENCHMARK(BM_NormalEqWeights)->Arg(16)->Arg(36);

static void BM_VandermondeWeights(benchmark::State& st) {
  const auto spec = arc(std::numbers::pi / 3, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(weights_vandermonde(spec));
}
BENCHMARK(BM_VandermondeWeights)->Arg(9)->Arg(13);

static void BM_IndexWlsm(benchmark::State& st) {
  const auto spec = arc(std::numbers::pi / 3, 16);
  const auto F = add_noise(far_field_born(bars(), kWave, spec), 0.05, 1);
  const auto ms = measurement_points(spec);
  const auto w = weights_normal_eq_2d(spec, kWave);
  const auto n = static_cast<int>(st.range(0));
  const auto grid = make_grid(2, Point(-1, -1, 0), Point(1, 1, 0), n);
  for (auto _ : st) benchmark::DoNotOptimize(index_wlsm(F, ms, w, grid, kWave, 0.05));
  st.counters["points/s"] = benchmark::Counter(double(n) * n, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_IndexWlsm)->Arg(41)->Arg(81)->Unit(benchmark::kMillisecond);

static void BM_IndexMusic(benchmark::State& st) {
  const auto spec = arc(std::numbers::pi / 3, 16);
  const auto F = add_noise(far_field_born(bars(), kWave, spec), 0.05, 1);
  const auto ms = measurement_points(spec);
  const auto grid = make_grid(2, Point(-1, -1, 0), Point(1, 1, 0), 81);
  for (auto _ : st) benchmark::DoNotOptimize(index_music(F, ms, grid, kWave));
}
BENCHMARK(BM_IndexMusic)->Unit(benchmark::kMillisecond);

static void BM_Concentration(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(concentration_ratio(0.3, 0.6, {4, 8, 12, 16}, WaveConfig{2, 4.0}));
}
BENCHMARK(BM_Concentration);

BENCHMARK_MAIN();
