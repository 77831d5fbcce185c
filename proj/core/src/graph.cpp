#include "gridseg/graph.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace gridseg {

void WeightedDigraph::add_undirected(std::size_t u, std::size_t v, double weight) {
    arcs.push_back({u, v, weight});
    if (u != v) {
        arcs.push_back({v, u, weight});
    }
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), rank_(n, 0), sets_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) {
        return false;
    }
    if (rank_[a] < rank_[b]) {
        std::swap(a, b);
    }
    parent_[b] = a;
    if (rank_[a] == rank_[b]) {
        ++rank_[a];
    }
    --sets_;
    return true;
}

std::vector<std::size_t> connected_components(const Multigraph& graph) {
    DisjointSets sets(graph.vertex_count);
    for (const auto& e : graph.edges) {
        sets.unite(e.u, e.v);
    }
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> root_label(graph.vertex_count, unset);
    std::vector<std::size_t> label(graph.vertex_count);
    std::size_t next = 0;
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
        auto root = sets.find(v);
        if (root_label[root] == unset) {
            root_label[root] = next++;
        }
        label[v] = root_label[root];
    }
    return label;
}

std::size_t component_count(const Multigraph& graph) {
    DisjointSets sets(graph.vertex_count);
    for (const auto& e : graph.edges) {
        sets.unite(e.u, e.v);
    }
    return sets.set_count();
}

std::vector<bool> find_bridges(const Multigraph& graph) {
    const std::size_t n = graph.vertex_count;
    const std::size_t m = graph.edges.size();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(n);  // (neighbor, edge)
    for (std::size_t k = 0; k < m; ++k) {
        const auto& e = graph.edges[k];
        if (e.u == e.v) {
            continue;
        }
        adjacency[e.u].emplace_back(e.v, k);
        adjacency[e.v].emplace_back(e.u, k);
    }

    constexpr auto unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> discovery(n, unvisited);
    std::vector<std::size_t> low(n, 0);
    std::vector<bool> bridge(m, false);
    std::size_t timer = 0;

    struct Frame {
        std::size_t vertex;
        std::size_t parent_edge;
        std::size_t next;
    };
    std::vector<Frame> stack;

    for (std::size_t root = 0; root < n; ++root) {
        if (discovery[root] != unvisited) {
            continue;
        }
        discovery[root] = low[root] = timer++;
        stack.push_back({root, unvisited, 0});
        while (!stack.empty()) {
            auto& frame = stack.back();
            const auto v = frame.vertex;
            if (frame.next < adjacency[v].size()) {
                const auto [w, edge] = adjacency[v][frame.next++];
                if (edge == frame.parent_edge) {
                    continue;
                }
                if (discovery[w] == unvisited) {
                    discovery[w] = low[w] = timer++;
                    stack.push_back({w, edge, 0});
                } else {
                    low[v] = std::min(low[v], discovery[w]);
                }
                continue;
            }
            const auto parent_edge = frame.parent_edge;
            stack.pop_back();
            if (!stack.empty()) {
                const auto parent = stack.back().vertex;
                low[parent] = std::min(low[parent], low[v]);
                if (low[v] > discovery[parent]) {
                    bridge[parent_edge] = true;
                }
            }
        }
    }
    return bridge;
}

} // namespace gridseg
