#pragma once

#include <cstddef>
#include <vector>

namespace gridseg {

/// Undirected multigraph; `id` on each edge is caller-defined (branch index
/// for bus-topology graphs).
struct Multigraph {
    struct Edge {
        std::size_t u;
        std::size_t v;
        std::size_t id;
    };

    std::size_t vertex_count = 0;
    std::vector<Edge> edges;
};

struct WeightedArc {
    std::size_t source;
    std::size_t target;
    double weight;
};

/// Directed weighted graph; duplicate arcs are allowed and summed by consumers.
struct WeightedDigraph {
    std::size_t node_count = 0;
    std::vector<WeightedArc> arcs;

    /// Adds u->v and v->u with the same weight.
    void add_undirected(std::size_t u, std::size_t v, double weight);
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n);

    std::size_t find(std::size_t x);
    bool unite(std::size_t a, std::size_t b);
    std::size_t set_count() const { return sets_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
    std::size_t sets_;
};

/// Component label per vertex (0-based, ordered by smallest vertex).
std::vector<std::size_t> connected_components(const Multigraph& graph);
std::size_t component_count(const Multigraph& graph);

/// Per-edge flag: removing that edge increases the component count.
/// Parallel edges are never bridges.
std::vector<bool> find_bridges(const Multigraph& graph);

} // namespace gridseg
