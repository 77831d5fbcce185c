#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridseg/flow_network.hpp"

namespace gridseg {

/// Module id per node, dense in 0..module_count-1.
struct Partition {
    std::vector<std::size_t> module;
    std::size_t module_count = 0;

    std::size_t node_count() const { return module.size(); }
    std::vector<std::vector<std::size_t>> members() const;

    /// Relabels arbitrary labels densely in order of first appearance.
    static Partition from_labels(std::span<const std::size_t> labels);
    static Partition singletons(std::size_t n);
    static Partition single_module(std::size_t n);

    bool operator==(const Partition&) const = default;
};

/// Two-level map equation, in bits:
///   L = q H(Q) + sum_i p_i H(P_i)
/// with q the total module exit rate, H(Q) the entropy of the module exit
/// rates, p_i = exit_i + sum of member visit rates, and H(P_i) the entropy
/// of {exit_i, member visit rates} normalized by p_i.
struct MapEquationTerms {
    double index_rate = 0.0;     // q
    double index_entropy = 0.0;  // H(Q)
    std::vector<double> module_exit;
    std::vector<double> module_flow;     // sum of member visit rates
    std::vector<double> module_rate;     // p_i
    std::vector<double> module_entropy;  // H(P_i)
    double codelength = 0.0;
};

/// Evaluates the map equation. Modules are canonicalized (first-appearance
/// order) before evaluation, so relabeled partitions give identical bits.
/// Throws std::invalid_argument on a size mismatch.
MapEquationTerms codelength(const FlowNetwork& flows, const Partition& partition);

/// x log2 x, with 0 for x <= 0.
double plogp(double x);

} // namespace gridseg
