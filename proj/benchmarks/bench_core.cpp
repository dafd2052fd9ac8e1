#include <benchmark/benchmark.h>

#include <cmath>

#include "illiq/hedge.hpp"
#include "illiq/math.hpp"
#include "illiq/paths.hpp"
#include "illiq/rng.hpp"

namespace {

void BM_PhiloxU64(benchmark::State& state) {
    illiq::rng::PathStream s(1, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.next_u64());
    }
}
BENCHMARK(BM_PhiloxU64);

void BM_Gaussian(benchmark::State& state) {
    illiq::rng::PathStream s(1, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.next_gaussian());
    }
}
BENCHMARK(BM_Gaussian);

void BM_NormalCdf(benchmark::State& state) {
    double x = -4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(illiq::normal_cdf(x));
        x = (x > 4.0) ? -4.0 : x + 1e-3;
    }
}
BENCHMARK(BM_NormalCdf);

void BM_Bes3Paths(benchmark::State& state) {
    const auto grid = illiq::TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(illiq::simulate_bes3(grid, 1.0, 256, 7));
    }
    state.SetItemsProcessed(state.iterations() * 256 * state.range(0));
}
BENCHMARK(BM_Bes3Paths)->Arg(64)->Arg(512);

void BM_StoppedBmPaths(benchmark::State& state) {
    const auto grid = illiq::TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(illiq::simulate_stopped_bm(grid, 1.0, 256, 7));
    }
    state.SetItemsProcessed(state.iterations() * 256 * state.range(0));
}
BENCHMARK(BM_StoppedBmPaths)->Arg(64)->Arg(512);

void BM_HedgePath(benchmark::State& state) {
    const auto grid = illiq::TimeGrid::refined(1.0, 0x1.0p-8, 0x1.0p-12);
    std::size_t p = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            illiq::replicate_path_trace(illiq::Measure::Q, 1.0, grid, 3, p++));
    }
}
BENCHMARK(BM_HedgePath);

}  // namespace

BENCHMARK_MAIN();
