#include <benchmark/benchmark.h>

#include <filesystem>

#include "gridseg/influence.hpp"
#include "gridseg/matpower.hpp"

namespace {

void BM_InfluenceMatrix(benchmark::State& state, const char* name, gridseg::Method method) {
    const auto grid = gridseg::load_matpower(std::filesystem::path(GRIDSEG_DATA_DIR) / name);
    gridseg::SolverOptions options;
    options.method = method;
    const auto workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gridseg::compute_influence_matrix(grid, options, workers));
    }
}
BENCHMARK_CAPTURE(BM_InfluenceMatrix, ieee118_ac, "case118.m", gridseg::Method::AC)
    ->Arg(1)
    ->Arg(0)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_InfluenceMatrix, ieee118_dc, "case118.m", gridseg::Method::DC)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_InfluenceMatrix, rts96_ac, "case73_rts96.m", gridseg::Method::AC)
    ->Arg(1)
    ->Unit(benchmark::kMillisecond);

} // namespace
