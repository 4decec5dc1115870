#include <vector>

#include <benchmark/benchmark.h>

#include "adaptnet/kernels.hpp"
#include "adaptnet/rng.hpp"

namespace {

using adaptnet::Point;
using adaptnet::Trajectory;

std::vector<Trajectory> random_walks(std::size_t count, std::size_t length, std::uint64_t seed) {
  adaptnet::Rng rng(seed);
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Point> pts;
    double x = rng.uniform(0.0, 1000.0);
    double y = rng.uniform(0.0, 1000.0);
    for (std::size_t k = 0; k < length; ++k) {
      x += rng.normal(0.0, 5.0);
      y += rng.normal(0.0, 5.0);
      pts.push_back({x, y, static_cast<double>(k)});
    }
    out.emplace_back(std::move(pts));
  }
  return out;
}

void BM_FrechetMatrixSerial(benchmark::State& state) {
  const auto trajs = random_walks(static_cast<std::size_t>(state.range(0)), 32, 1);
  for (auto _ : state) benchmark::DoNotOptimize(adaptnet::kernels::frechet_matrix_serial(trajs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}

void BM_FrechetMatrixParallel(benchmark::State& state) {
  const auto trajs = random_walks(static_cast<std::size_t>(state.range(0)), 32, 1);
  for (auto _ : state) benchmark::DoNotOptimize(adaptnet::kernels::frechet_matrix_parallel(trajs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}

void BM_ScoreBatchSerial(benchmark::State& state) {
  const auto cands = random_walks(static_cast<std::size_t>(state.range(0)), 32, 2);
  const auto refs = random_walks(3, 32, 3);
  for (auto _ : state) benchmark::DoNotOptimize(adaptnet::kernels::score_batch_serial(cands, refs, 25.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreBatchParallel(benchmark::State& state) {
  const auto cands = random_walks(static_cast<std::size_t>(state.range(0)), 32, 2);
  const auto refs = random_walks(3, 32, 3);
  for (auto _ : state) benchmark::DoNotOptimize(adaptnet::kernels::score_batch_parallel(cands, refs, 25.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FrechetMatrixSerial)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_FrechetMatrixParallel)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_ScoreBatchSerial)->Arg(8)->Arg(64)->Arg(512);
BENCHMARK(BM_ScoreBatchParallel)->Arg(8)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
