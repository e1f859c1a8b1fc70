#include <benchmark/benchmark.h>

#include "shallow/constructive.hpp"
#include "shallow/cost.hpp"
#include "shallow/gd_baseline.hpp"
#include "shallow/rng.hpp"
#include "shallow/truncation.hpp"

using namespace shallow;

namespace {

ClassifiedDataset square(int q, int per_class) {
  return synthesize(q, q, std::vector<int>(static_cast<std::size_t>(q), per_class), 1.0, 0.05, 1);
}

}  // namespace

static void BM_PenroseInverse(benchmark::State& state) {
  Rng rng(1);
  const Mat a = gaussian_matrix(state.range(0), state.range(0) / 2, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(penrose_inverse(a));
}
BENCHMARK(BM_PenroseInverse)->Arg(4)->Arg(10)->Arg(40);

static void BM_Prepare(benchmark::State& state) {
  const auto ds = synthesize(10, 5, std::vector<int>(5, static_cast<int>(state.range(0))), 1.0, 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(prepare(ds));
}
BENCHMARK(BM_Prepare)->Arg(20)->Arg(400);

static void BM_TrainGeneral(benchmark::State& state) {
  const auto ds = synthesize(10, 5, std::vector<int>(5, static_cast<int>(state.range(0))), 1.0, 0.05, 1);
  const auto prep = prepare(ds);
  for (auto _ : state) benchmark::DoNotOptimize(train_general(ds, prep.stats, prep.pack, {}));
}
BENCHMARK(BM_TrainGeneral)->Arg(20)->Arg(400);

static void BM_ExactMinClosedForm(benchmark::State& state) {
  const auto ds = square(5, static_cast<int>(state.range(0)));
  const auto prep = prepare(ds);
  for (auto _ : state) benchmark::DoNotOptimize(exact_min_weighted(ds, prep.stats));
}
BENCHMARK(BM_ExactMinClosedForm)->Arg(20)->Arg(400);

static void BM_ProjectorResidual(benchmark::State& state) {
  const auto ds = square(5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(projector_residual_norm(ds));
}
BENCHMARK(BM_ProjectorResidual)->Arg(20)->Arg(200)->Arg(1200);

static void BM_TruncationSweep(benchmark::State& state) {
  const auto ds = square(4, 50);
  const double rho = prepare(ds).stats.rho;
  std::vector<FirstLayer> grid;
  for (int k = 0; k < state.range(0); ++k) grid.push_back({Mat::Identity(4, 4), Vec::Constant(4, 0.05 * k * rho)});
  for (auto _ : state) benchmark::DoNotOptimize(sweep_fixed_point_region(ds, grid));
}
BENCHMARK(BM_TruncationSweep)->Arg(16)->Arg(128);

static void BM_GdStep(benchmark::State& state) {
  const auto ds = synthesize(10, 5, std::vector<int>(5, static_cast<int>(state.range(0))), 1.0, 0.05, 1);
  const ShallowParams p = initial_params(10, 5, GdConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(p, ds));
}
BENCHMARK(BM_GdStep)->Arg(20)->Arg(400);

BENCHMARK_MAIN();
