#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "fixtures.hpp"
#include "gridseg/flow_network.hpp"
#include "gridseg/map_equation.hpp"
#include "gridseg/optimizer.hpp"
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

oracle::Tree to_tree(const HierarchyNode& h) {
    oracle::Tree t;
    t.nodes = h.nodes;
    for (const auto& c : h.children) {
        t.children.push_back(to_tree(c));
    }
    return t;
}

oracle::Tree leaves(const std::vector<std::vector<std::size_t>>& groups) {
    oracle::Tree root;
    for (const auto& g : groups) {
        root.children.push_back(oracle::Tree{g, {}});
    }
    return root;
}

std::vector<std::size_t> range(std::size_t from, std::size_t to) {
    std::vector<std::size_t> v;
    for (std::size_t i = from; i < to; ++i) {
        v.push_back(i);
    }
    return v;
}

void expect_partition_of(const HierarchyNode& root, std::size_t n) {
    auto nodes = root.collect_nodes();
    std::sort(nodes.begin(), nodes.end());
    EXPECT_EQ(nodes, range(0, n));
}

} // namespace

TEST(TwoLevel, TwoWeaklyLinkedCliques) {
    const auto f = undirected_flow(fixtures::cliques(2, 5, 0.1));
    const auto r = optimize_two_level(f);
    EXPECT_EQ(r.partition.module, (std::vector<std::size_t>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
    const auto best = oracle::brute_force(f.node_flow, dense_flow(f), 3);
    EXPECT_NEAR(r.codelength, best.length, 1e-12);
}

TEST(TwoLevel, CompleteGraphIsOneModule) {
    const auto f = undirected_flow(fixtures::cliques(1, 5, 0.0));
    const auto r = optimize_two_level(f);
    EXPECT_EQ(r.partition.module_count, 1U);
    const auto best = oracle::brute_force(f.node_flow, dense_flow(f));
    EXPECT_NEAR(r.codelength, best.length, 1e-12);
    EXPECT_EQ(best.labels, std::vector<int>(5, 0));
}

TEST(TwoLevel, SingleNode) {
    const auto f = stationary_flow(WeightedDigraph{1, {}}, 0.15);
    const auto r = optimize_two_level(f);
    EXPECT_EQ(r.partition.module_count, 1U);
    EXPECT_DOUBLE_EQ(r.codelength, 0.0);
}

TEST(TwoLevel, MatchesExhaustiveSearchOnRandomGraphs) {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 3 + static_cast<std::size_t>(t % 6);
        const auto g = fixtures::random_digraph(rng, n, 0.35);
        const auto f = t % 2 == 0 ? undirected_flow(g) : stationary_flow(g, 0.15);
        const auto r = optimize_two_level(f, 42, 10);
        const auto best = oracle::brute_force(f.node_flow, dense_flow(f));
        EXPECT_LE(r.codelength, best.length + 1e-9) << "graph " << t;
    }
}

TEST(TwoLevel, NeverWorseThanTrivialPartitions) {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 20; ++t) {
        const auto f = stationary_flow(fixtures::random_digraph(rng, 20, 0.15), 0.15);
        const auto r = optimize_two_level(f, static_cast<std::uint64_t>(t), 3);
        EXPECT_LE(r.codelength, codelength(f, Partition::single_module(20)).codelength + 1e-12);
        EXPECT_LE(r.codelength, codelength(f, Partition::singletons(20)).codelength + 1e-12);
        EXPECT_NEAR(r.codelength, codelength(f, r.partition).codelength, 1e-12);
    }
}

TEST(TwoLevel, TraceIsNonIncreasing) {
    std::mt19937_64 rng(1);
    const auto f = undirected_flow(fixtures::random_digraph(rng, 40, 0.08));
    const auto r = optimize_two_level(f);
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
        EXPECT_LE(r.trace[k], r.trace[k - 1] + 1e-12);
    }
    ASSERT_FALSE(r.trace.empty());
    EXPECT_NEAR(r.trace.back(), r.codelength, 1e-12);
}

TEST(TwoLevel, DeterministicForFixedSeed) {
    std::mt19937_64 rng(4);
    const auto f = undirected_flow(fixtures::random_digraph(rng, 60, 0.05));
    const auto a = optimize_two_level(f, 17, 5);
    const auto b = optimize_two_level(f, 17, 5);
    EXPECT_EQ(a.partition, b.partition);
    EXPECT_EQ(a.codelength, b.codelength);
    EXPECT_EQ(a.trace, b.trace);
}

TEST(TwoLevel, InvariantUnderWeightScaling) {
    auto g = fixtures::cliques(3, 4, 0.3);
    const auto base = optimize_two_level(undirected_flow(g));
    for (auto& a : g.arcs) {
        a.weight *= 1000.0;
    }
    const auto scaled = optimize_two_level(undirected_flow(g));
    EXPECT_EQ(base.partition, scaled.partition);
    EXPECT_NEAR(base.codelength, scaled.codelength, 1e-10);
}

TEST(TwoLevel, CanonicalModuleNumbering) {
    const auto r = optimize_two_level(undirected_flow(fixtures::cliques(3, 4, 0.1)));
    std::size_t next = 0;
    for (auto m : r.partition.module) {
        EXPECT_LE(m, next);
        next = std::max(next, m + 1);
    }
}

TEST(Hierarchy, CodelengthMatchesMultilevelReference) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 10; ++t) {
        const auto f = undirected_flow(fixtures::random_digraph(rng, 30, 0.08));
        const auto h = optimize_hierarchical(f, 42, 3);
        expect_partition_of(h, 30);
        EXPECT_NEAR(hierarchical_codelength(f, h), oracle::multilevel(f.node_flow, dense_flow(f), to_tree(h)), 1e-12);
        EXPECT_NEAR(h.codelength, hierarchical_codelength(f, h), 1e-12);
    }
}

TEST(Hierarchy, TwoCliquesStayTwoLevel) {
    const auto f = undirected_flow(fixtures::cliques(2, 5, 0.1));
    const auto h = optimize_hierarchical(f);
    EXPECT_EQ(h.depth(), 1U);
    EXPECT_EQ(modules_per_level(h), (std::vector<std::size_t>{2}));
    EXPECT_NEAR(h.codelength, optimize_two_level(f).codelength, 1e-12);
}

TEST(Hierarchy, CompleteGraphIsLeafRoot) {
    const auto f = undirected_flow(fixtures::cliques(1, 5, 0.0));
    const auto h = optimize_hierarchical(f);
    EXPECT_TRUE(h.is_leaf());
    EXPECT_EQ(h.depth(), 0U);
    EXPECT_EQ(top_level_partition(h, 5).module_count, 1U);
    EXPECT_TRUE(module_paths(h, 5)[0].empty());
}

TEST(Hierarchy, PairedCliquesMatchExhaustiveGrouping) {
    // Four 5-cliques; 0-1 and 2-3 paired by five links each, the pairs
    // joined by one weak link.
    auto g = fixtures::cliques(4, 5, 0.0);
    g.arcs.erase(std::remove_if(g.arcs.begin(), g.arcs.end(), [](const auto& a) { return a.weight == 0.0; }),
                 g.arcs.end());
    for (std::size_t k = 0; k < 5; ++k) {
        g.add_undirected(k, 5 + k, 1.0);
        g.add_undirected(10 + k, 15 + k, 1.0);
    }
    g.add_undirected(9, 10, 0.05);
    const auto f = undirected_flow(g);
    const auto m = dense_flow(f);
    const auto h = optimize_hierarchical(f);
    const double tree_bits = oracle::multilevel(f.node_flow, m, to_tree(h));
    EXPECT_NEAR(h.codelength, tree_bits, 1e-12);

    // Every grouping of the four cliques into super-modules; one block and
    // four blocks both mean the flat four-module code.
    const std::vector<std::vector<std::size_t>> cliques{range(0, 5), range(5, 10), range(10, 15), range(15, 20)};
    double best_grouping = std::numeric_limits<double>::infinity();
    oracle::for_each_partition(4, [&](const std::vector<int>& labels) {
        const int blocks = *std::max_element(labels.begin(), labels.end()) + 1;
        oracle::Tree root;
        if (blocks == 1 || blocks == 4) {
            root = leaves(cliques);
        } else {
            root.children.resize(static_cast<std::size_t>(blocks));
            for (std::size_t c = 0; c < 4; ++c) {
                root.children[static_cast<std::size_t>(labels[c])].children.push_back(oracle::Tree{cliques[c], {}});
            }
            for (auto& parent : root.children) {
                if (parent.children.size() == 1) {
                    parent = parent.children.front();
                }
            }
        }
        best_grouping = std::min(best_grouping, oracle::multilevel(f.node_flow, m, root));
    });
    EXPECT_NEAR(tree_bits, best_grouping, 1e-12);

    // The optimum nests one pair and leaves the other pair's cliques on top.
    ASSERT_EQ(h.depth(), 2U);
    EXPECT_EQ(modules_per_level(h), (std::vector<std::size_t>{3, 4}));
    const auto paths = module_paths(h, 20);
    for (const auto& c : cliques) {
        for (auto v : c) {
            EXPECT_EQ(paths[v], paths[c.front()]);
        }
    }
    const double flat_cliques = oracle::multilevel(f.node_flow, m, leaves(cliques));
    const double flat_pairs = oracle::multilevel(f.node_flow, m, leaves({range(0, 10), range(10, 20)}));
    EXPECT_LT(tree_bits, flat_cliques - 1e-6);
    EXPECT_LT(tree_bits, flat_pairs - 1e-6);
}

TEST(Hierarchy, PathsAndLevels) {
    HierarchyNode root;
    root.children.resize(2);
    root.children[0].nodes = {0, 1};
    root.children[1].children.resize(2);
    root.children[1].children[0].nodes = {2};
    root.children[1].children[1].nodes = {3, 4};
    EXPECT_EQ(root.depth(), 2U);
    EXPECT_EQ(modules_per_level(root), (std::vector<std::size_t>{2, 3}));  // leaf {0,1} counts again at level 2
    const auto paths = module_paths(root, 5);
    EXPECT_EQ(paths[0], (std::vector<std::size_t>{0}));
    EXPECT_EQ(paths[4], (std::vector<std::size_t>{1, 1}));
    EXPECT_EQ(top_level_partition(root, 5).module, (std::vector<std::size_t>{0, 0, 1, 1, 1}));
}

TEST(Hierarchy, DeterministicForFixedSeed) {
    std::mt19937_64 rng(8);
    const auto f = undirected_flow(fixtures::random_digraph(rng, 50, 0.06));
    const auto a = optimize_hierarchical(f, 5, 4);
    const auto b = optimize_hierarchical(f, 5, 4);
    EXPECT_EQ(module_paths(a, 50), module_paths(b, 50));
    EXPECT_EQ(a.codelength, b.codelength);
}

TEST(ZeroFlowAttachment, IsolatedNodeJoinsNearestNeighborLeaf) {
    // Nodes 0-2 form a triangle; node 3 has no arcs but touches node 2.
    WeightedDigraph g{4, {}};
    g.add_undirected(0, 1, 1.0);
    g.add_undirected(1, 2, 1.0);
    g.add_undirected(0, 2, 1.0);
    const auto f = undirected_flow(g);
    HierarchyNode root;
    root.children.resize(2);
    root.children[0].nodes = {0, 1, 2};
    root.children[1].nodes = {3};
    const double before = hierarchical_codelength(f, root);
    attach_zero_flow_nodes(root, f, {{1, 2}, {0, 2}, {0, 1, 3}, {2}});
    ASSERT_TRUE(root.is_leaf());
    EXPECT_EQ(root.nodes, (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_NEAR(hierarchical_codelength(f, root), before, 1e-12);
}

TEST(ZeroFlowAttachment, UnreachableNodesStay) {
    WeightedDigraph g{3, {}};
    g.add_undirected(0, 1, 1.0);
    const auto f = undirected_flow(g);
    HierarchyNode root;
    root.children.resize(2);
    root.children[0].nodes = {0, 1};
    root.children[1].nodes = {2};
    attach_zero_flow_nodes(root, f, {{1}, {0}, {}});
    EXPECT_EQ(root.children.size(), 2U);
    EXPECT_THROW(attach_zero_flow_nodes(root, f, {{1}}), std::invalid_argument);
}
