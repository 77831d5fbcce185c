#pragma once

#include <cstddef>
#include <vector>

#include "gridseg/graph.hpp"

namespace gridseg {

struct FlowArc {
    std::size_t source;
    std::size_t target;
    double flow;
};

/// Random-walk flow on a directed weighted graph.
///
/// `node_flow` holds the stationary visit rates of the teleported walk
/// (summing to 1). `arcs` carry the flow along real links only, i.e.
/// p[u] * w(u,v) / out(u), renormalized to sum to 1; teleportation steps are
/// not recorded. Parallel arcs are merged and zero-weight arcs dropped.
struct FlowNetwork {
    std::vector<double> node_flow;
    std::vector<FlowArc> arcs;
    double teleportation = 0.15;

    std::size_t node_count() const { return node_flow.size(); }
};

/// Stationary flow by power iteration to an L1 residual below 1e-12.
///
/// With probability `teleportation` (and always from dangling nodes) the walker
/// jumps to a node chosen proportionally to its in-strength; uniformly if the
/// graph has no arcs. Throws std::invalid_argument for an empty graph,
/// negative or non-finite weights, teleportation outside [0,1), or a graph
/// without arcs at teleportation 0.
FlowNetwork stationary_flow(const WeightedDigraph& graph, double teleportation = 0.15);

/// Flow of the undirected reading of `graph`: arc weights in both directions
/// are summed into one link, node_flow is proportional to link strength, and
/// each link carries half its normalized weight in each direction. No
/// teleportation is involved. Isolated nodes get zero flow; a graph without
/// arcs gets uniform node flow. Throws as stationary_flow for an empty graph
/// or bad weights.
FlowNetwork undirected_flow(const WeightedDigraph& graph);

enum class FlowModel { Undirected, Directed };

const char* to_string(FlowModel model);

/// undirected_flow or stationary_flow(graph, teleportation).
FlowNetwork make_flow(const WeightedDigraph& graph, FlowModel model, double teleportation);

} // namespace gridseg
