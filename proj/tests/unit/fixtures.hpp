#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gridseg/graph.hpp"
#include "gridseg/grid_case.hpp"
#include "gridseg/matpower.hpp"

namespace fixtures {

inline std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(GRIDSEG_DATA_DIR) / name;
}

inline gridseg::GridCase ieee14() { return gridseg::load_matpower(data_file("case14.m")); }
inline gridseg::GridCase ieee118() { return gridseg::load_matpower(data_file("case118.m")); }
inline gridseg::GridCase rts96() { return gridseg::load_matpower(data_file("case73_rts96.m")); }

/// Slack bus 1 generating 100 MW into bus 2.
inline const char* two_bus_text() {
    return R"(function mpc = two_bus
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	138	1	1.1	0.9;
	2	1	100	20	0	0	1	1	0	138	1	1.1	0.9;
];
mpc.gen = [
	1	100	0	300	-300	1	100	1	250	0;
];
mpc.branch = [
	1	2	0.01	0.1	0	0	0	0	0	0	1	-360	360;
];
)";
}

/// 90 MW from bus 1 to bus 3; branches 1-2, 1-3, 2-3 with equal reactance.
inline const char* triangle_text() {
    return R"(function mpc = triangle
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	138	1	1.1	0.9;
	2	1	0	0	0	0	1	1	0	138	1	1.1	0.9;
	3	1	90	0	0	0	1	1	0	138	1	1.1	0.9;
];
mpc.gen = [
	1	90	0	300	-300	1	100	1	250	0;
];
mpc.branch = [
	1	2	0	0.1	0	0	0	0	0	0	1	-360	360;
	1	3	0	0.1	0	0	0	0	0	0	1	-360	360;
	2	3	0	0.1	0	0	0	0	0	0	1	-360	360;
];
)";
}

/// Buses 1-2 joined by an identical parallel pair, then 2-3-4 ring.
inline const char* parallel_pair_text() {
    return R"(function mpc = parallel_pair
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	138	1	1.1	0.9;
	2	1	20	0	0	0	1	1	0	138	1	1.1	0.9;
	3	1	30	0	0	0	1	1	0	138	1	1.1	0.9;
	4	1	50	0	0	0	1	1	0	138	1	1.1	0.9;
];
mpc.gen = [
	1	100	0	300	-300	1	100	1	250	0;
];
mpc.branch = [
	1	2	0	0.1	0	0	0	0	0	0	1	-360	360;
	1	2	0	0.1	0	0	0	0	0	0	1	-360	360;
	2	3	0	0.2	0	0	0	0	0	0	1	-360	360;
	3	4	0	0.1	0	0	0	0	0	0	1	-360	360;
	2	4	0	0.3	0	0	0	0	0	0	1	-360	360;
];
)";
}

/// Chain 1-2-3-4 with loads at the far end.
inline const char* chain_text() {
    return R"(function mpc = chain
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	138	1	1.1	0.9;
	2	1	10	0	0	0	1	1	0	138	1	1.1	0.9;
	3	1	10	0	0	0	1	1	0	138	1	1.1	0.9;
	4	1	10	0	0	0	1	1	0	138	1	1.1	0.9;
];
mpc.gen = [
	1	30	0	300	-300	1	100	1	250	0;
];
mpc.branch = [
	1	2	0	0.1	0	0	0	0	0	0	1	-360	360;
	2	3	0	0.1	0	0	0	0	0	0	1	-360	360;
	3	4	0	0.1	0	0	0	0	0	0	1	-360	360;
];
)";
}

inline gridseg::GridCase two_bus() { return gridseg::parse_matpower(two_bus_text()); }
inline gridseg::GridCase triangle() { return gridseg::parse_matpower(triangle_text()); }
inline gridseg::GridCase parallel_pair() { return gridseg::parse_matpower(parallel_pair_text()); }
inline gridseg::GridCase chain() { return gridseg::parse_matpower(chain_text()); }

/// Undirected graph of `k` complete groups of `size` nodes, consecutive
/// groups linked by one edge of weight `bridge`.
inline gridseg::WeightedDigraph cliques(std::size_t k, std::size_t size, double bridge) {
    gridseg::WeightedDigraph g;
    g.node_count = k * size;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t a = 0; a < size; ++a) {
            for (std::size_t b = a + 1; b < size; ++b) {
                g.add_undirected(c * size + a, c * size + b, 1.0);
            }
        }
        if (c + 1 < k) {
            g.add_undirected(c * size, (c + 1) * size, bridge);
        }
    }
    return g;
}

/// Random directed graph: each ordered pair gets an arc with probability
/// `density` and a weight in [1, 10).
inline gridseg::WeightedDigraph random_digraph(std::mt19937_64& rng, std::size_t n, double density) {
    std::bernoulli_distribution keep(density);
    std::uniform_real_distribution<double> weight(1.0, 10.0);
    gridseg::WeightedDigraph g;
    g.node_count = n;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (u != v && keep(rng)) {
                g.arcs.push_back({u, v, weight(rng)});
            }
        }
    }
    return g;
}

} // namespace fixtures
