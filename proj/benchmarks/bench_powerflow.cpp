#include <benchmark/benchmark.h>

#include <filesystem>

#include "gridseg/matpower.hpp"
#include "gridseg/powerflow.hpp"

namespace {

gridseg::GridCase load(const char* name) {
    return gridseg::load_matpower(std::filesystem::path(GRIDSEG_DATA_DIR) / name);
}

void BM_AcIeee118(benchmark::State& state) {
    const auto grid = load("case118.m");
    for (auto _ : state) {
        benchmark::DoNotOptimize(gridseg::solve_ac(grid));
    }
}
BENCHMARK(BM_AcIeee118)->Unit(benchmark::kMillisecond);

void BM_DcIeee118(benchmark::State& state) {
    const auto grid = load("case118.m");
    for (auto _ : state) {
        benchmark::DoNotOptimize(gridseg::solve_dc(grid));
    }
}
BENCHMARK(BM_DcIeee118)->Unit(benchmark::kMicrosecond);

void BM_ParseIeee118(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(load("case118.m"));
    }
}
BENCHMARK(BM_ParseIeee118)->Unit(benchmark::kMicrosecond);

} // namespace
