#include <benchmark/benchmark.h>

#include <random>

#include "gridseg/flow_network.hpp"
#include "gridseg/map_equation.hpp"
#include "gridseg/optimizer.hpp"

namespace {

// Planted partition: groups of 10 with dense insides and sparse links between.
gridseg::WeightedDigraph planted(std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    gridseg::WeightedDigraph g;
    g.node_count = n;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double p = a / 10 == b / 10 ? 0.5 : 2.0 / static_cast<double>(n);
            if (a != b && u(rng) < p) {
                g.arcs.push_back({a, b, 1.0 + 9.0 * u(rng)});
            }
        }
    }
    return g;
}

void BM_StationaryFlow(benchmark::State& state) {
    const auto g = planted(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gridseg::stationary_flow(g, 0.15));
    }
}
BENCHMARK(BM_StationaryFlow)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Codelength(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto flows = gridseg::undirected_flow(planted(n));
    std::vector<std::size_t> labels(n);
    for (std::size_t v = 0; v < n; ++v) {
        labels[v] = v / 10;
    }
    const auto partition = gridseg::Partition::from_labels(labels);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gridseg::codelength(flows, partition));
    }
}
BENCHMARK(BM_Codelength)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_TwoLevel(benchmark::State& state) {
    const auto flows = gridseg::undirected_flow(planted(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gridseg::optimize_two_level(flows, 42, 1));
    }
}
BENCHMARK(BM_TwoLevel)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Hierarchical(benchmark::State& state) {
    const auto flows = gridseg::undirected_flow(planted(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gridseg::optimize_hierarchical(flows, 42, 1));
    }
}
BENCHMARK(BM_Hierarchical)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace
