#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gridseg/flow_network.hpp"
#include "gridseg/map_equation.hpp"

namespace gridseg {

struct TwoLevelResult {
    Partition partition;  // canonical: modules numbered by first member
    double codelength = 0.0;
    /// Codelength after every sweep that moved something, for the winning
    /// trial. Non-increasing.
    std::vector<double> trace;
    unsigned best_trial = 0;
};

/// Greedy two-level map-equation search.
///
/// Each trial starts from singletons, sweeps nodes in a seeded random order
/// moving each to the neighboring (or an empty) module with the largest
/// codelength decrease, aggregates modules into super-nodes and repeats until
/// nothing moves, then alternates fine-tuning (single nodes) and
/// coarse-tuning (sub-modules) while that helps. The best of `trials` wins;
/// ties go to the earliest trial. The result never codes worse than the
/// one-module or all-singleton partitions.
TwoLevelResult optimize_two_level(const FlowNetwork& flows, std::uint64_t seed = 42, unsigned trials = 10);

/// Module tree. Leaves hold graph nodes; internal nodes hold child modules.
struct HierarchyNode {
    std::vector<std::size_t> nodes;  // leaf members, sorted; empty for internal nodes
    std::vector<HierarchyNode> children;
    double codelength = 0.0;  // bits spent on this subtree

    bool is_leaf() const { return children.empty(); }
    /// Levels below this node: 0 for a leaf.
    std::size_t depth() const;
    std::vector<std::size_t> collect_nodes() const;
};

/// Two-level search, then recursive refinement: each module is re-partitioned
/// on its own sub-flow (its exit rate kept in its codebook) and the
/// sub-level is kept only when it shortens the code by more than 1e-10 bits.
/// A one-module optimum yields a single leaf root (depth 0).
HierarchyNode optimize_hierarchical(const FlowNetwork& flows, std::uint64_t seed = 42, unsigned trials = 10);

/// Multilevel map equation of an arbitrary module tree. Every codebook codes
/// its own exit (except the root) plus the exit rates of its children (child
/// modules) or the visit rates of its members (leaves).
double hierarchical_codelength(const FlowNetwork& flows, const HierarchyNode& root);

/// Moves every node of zero visit rate that sits in a zero-flow leaf into the
/// leaf of the nearest positive-flow node in `neighbors` (breadth-first,
/// lower node index first), then drops emptied leaves and collapses internal
/// nodes left with one child. Such nodes have no arcs, so leaf codelengths are
/// unaffected; subtree codelengths are recomputed. Nodes with no positive-flow
/// node reachable stay where they are.
void attach_zero_flow_nodes(HierarchyNode& root, const FlowNetwork& flows,
                            const std::vector<std::vector<std::size_t>>& neighbors);

/// Module of each node among the root's children (a single module when the
/// root is a leaf).
Partition top_level_partition(const HierarchyNode& root, std::size_t node_count);

/// Child-index path from the root to each node's leaf (empty for a leaf root).
std::vector<std::vector<std::size_t>> module_paths(const HierarchyNode& root, std::size_t node_count);

/// Number of modules at each level, level 1 first. A leaf above the deepest
/// level counts again at every level below it.
std::vector<std::size_t> modules_per_level(const HierarchyNode& root);

} // namespace gridseg
