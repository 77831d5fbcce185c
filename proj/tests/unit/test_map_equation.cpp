#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fixtures.hpp"
#include "gridseg/flow_network.hpp"
#include "gridseg/map_equation.hpp"
#include "map_equation_reference.hpp"

using namespace gridseg;

namespace {

oracle::Matrix dense_flow(const FlowNetwork& f) {
    oracle::Matrix m(f.node_count(), std::vector<double>(f.node_count(), 0.0));
    for (const auto& a : f.arcs) {
        m[a.source][a.target] += a.flow;
    }
    return m;
}

std::vector<int> as_int(const Partition& p) { return {p.module.begin(), p.module.end()}; }

} // namespace

TEST(MapEquation, TwoCycleByHand) {
    const auto f = stationary_flow(WeightedDigraph{2, {{0, 1, 1.0}, {1, 0, 1.0}}}, 0.0);
    EXPECT_NEAR(codelength(f, Partition::singletons(2)).codelength, 3.0, 1e-12);
    EXPECT_NEAR(codelength(f, Partition::single_module(2)).codelength, 1.0, 1e-12);
}

TEST(MapEquation, OneModuleIsVisitEntropy) {
    std::mt19937_64 rng(3);
    const auto f = stationary_flow(fixtures::random_digraph(rng, 7, 0.5), 0.15);
    const auto terms = codelength(f, Partition::single_module(7));
    EXPECT_DOUBLE_EQ(terms.index_rate, 0.0);
    EXPECT_NEAR(terms.codelength, oracle::entropy(f.node_flow), 1e-12);
}

TEST(MapEquation, MatchesEntropyFormOnRandomPartitions) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 10);
        const auto f = t % 2 == 0 ? stationary_flow(fixtures::random_digraph(rng, n, 0.4), 0.15)
                                  : undirected_flow(fixtures::random_digraph(rng, n, 0.4));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> labels(n);
        for (auto& l : labels) {
            l = pick(rng);
        }
        const auto p = Partition::from_labels(labels);
        EXPECT_NEAR(codelength(f, p).codelength, oracle::two_level(f.node_flow, dense_flow(f), as_int(p)), 1e-12);
    }
}

TEST(MapEquation, TermsAreConsistent) {
    const auto f = undirected_flow(fixtures::cliques(2, 4, 0.5));
    const auto p = Partition::from_labels(std::vector<std::size_t>{0, 0, 0, 0, 1, 1, 1, 1});
    const auto t = codelength(f, p);
    ASSERT_EQ(t.module_exit.size(), 2U);
    EXPECT_NEAR(t.index_rate, t.module_exit[0] + t.module_exit[1], 1e-15);
    for (std::size_t m = 0; m < 2; ++m) {
        EXPECT_NEAR(t.module_rate[m], t.module_exit[m] + t.module_flow[m], 1e-15);
    }
    double l = t.index_rate * t.index_entropy;
    for (std::size_t m = 0; m < 2; ++m) {
        l += t.module_rate[m] * t.module_entropy[m];
    }
    EXPECT_NEAR(t.codelength, l, 1e-12);
}

TEST(MapEquation, RelabelingDoesNotChangeBits) {
    std::mt19937_64 rng(9);
    const auto f = stationary_flow(fixtures::random_digraph(rng, 9, 0.4), 0.15);
    const std::vector<std::size_t> labels{0, 0, 1, 1, 2, 2, 0, 1, 2};
    std::vector<std::size_t> perm{7, 3, 11};
    for (int k = 0; k < 6; ++k) {
        std::vector<std::size_t> relabeled(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            relabeled[i] = perm[labels[i]];
        }
        EXPECT_EQ(codelength(f, Partition::from_labels(relabeled)).codelength,
                  codelength(f, Partition::from_labels(labels)).codelength);
        std::next_permutation(perm.begin(), perm.end());
    }
}

TEST(MapEquation, SizeMismatchThrows) {
    const auto f = undirected_flow(fixtures::cliques(1, 3, 0.0));
    EXPECT_THROW((void)codelength(f, Partition::singletons(4)), std::invalid_argument);
}

TEST(Partition, Helpers) {
    const auto p = Partition::from_labels(std::vector<std::size_t>{5, 2, 5, 9});
    EXPECT_EQ(p.module, (std::vector<std::size_t>{0, 1, 0, 2}));
    EXPECT_EQ(p.module_count, 3U);
    EXPECT_EQ(p.members()[0], (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(Partition::singletons(3).module_count, 3U);
    EXPECT_EQ(Partition::single_module(3).module_count, 1U);
}

TEST(Plogp, EdgeCases) {
    EXPECT_DOUBLE_EQ(plogp(0.0), 0.0);
    EXPECT_DOUBLE_EQ(plogp(-1.0), 0.0);
    EXPECT_DOUBLE_EQ(plogp(1.0), 0.0);
    EXPECT_DOUBLE_EQ(plogp(0.5), -0.5);
}
