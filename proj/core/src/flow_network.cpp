#include "gridseg/flow_network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace gridseg {

namespace {

void check_arcs(const WeightedDigraph& graph) {
    if (graph.node_count == 0) {
        throw std::invalid_argument("flow network needs at least one node");
    }
    for (const auto& arc : graph.arcs) {
        if (arc.source >= graph.node_count || arc.target >= graph.node_count) {
            throw std::invalid_argument("arc endpoint out of range");
        }
        if (!(arc.weight >= 0.0) || !std::isfinite(arc.weight)) {
            throw std::invalid_argument("arc weights must be finite and non-negative");
        }
    }
}

} // namespace

FlowNetwork stationary_flow(const WeightedDigraph& graph, double teleportation) {
    check_arcs(graph);
    const auto n = graph.node_count;
    if (!(teleportation >= 0.0 && teleportation < 1.0)) {
        throw std::invalid_argument("teleportation rate must lie in [0, 1)");
    }

    std::map<std::pair<std::size_t, std::size_t>, double> merged;
    for (const auto& arc : graph.arcs) {
        if (arc.weight > 0.0) {
            merged[{arc.source, arc.target}] += arc.weight;
        }
    }
    if (merged.empty() && teleportation == 0.0) {
        throw std::invalid_argument("graph without arcs has no stationary flow at zero teleportation");
    }

    struct Link {
        std::size_t source, target;
        double weight;
    };
    std::vector<Link> links;
    links.reserve(merged.size());
    std::vector<double> out_strength(n, 0.0);
    std::vector<double> in_strength(n, 0.0);
    for (const auto& [key, w] : merged) {
        links.push_back({key.first, key.second, w});
        out_strength[key.first] += w;
        in_strength[key.second] += w;
    }

    std::vector<double> target(n, 1.0 / static_cast<double>(n));
    double total_in = 0.0;
    for (double s : in_strength) {
        total_in += s;
    }
    if (total_in > 0.0) {
        for (std::size_t v = 0; v < n; ++v) {
            target[v] = in_strength[v] / total_in;
        }
    }

    // Zero teleportation uses the lazy walk (same fixed point, aperiodic).
    const bool lazy = teleportation == 0.0;
    std::vector<double> p = target;
    if (total_in == 0.0 || lazy) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(n));
    }
    std::vector<double> next(n);
    constexpr int max_iterations = 1'000'000;
    for (int iter = 0; iter < max_iterations; ++iter) {
        double dangling = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (out_strength[v] == 0.0) {
                dangling += p[v];
            }
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (const auto& l : links) {
            next[l.target] += (1.0 - teleportation) * p[l.source] * l.weight / out_strength[l.source];
        }
        const double jump = teleportation * (1.0 - dangling) + dangling;
        double sum = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            next[v] += jump * target[v];
            if (lazy) {
                next[v] = 0.5 * (next[v] + p[v]);
            }
            sum += next[v];
        }
        double residual = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            next[v] /= sum;
            residual += std::abs(next[v] - p[v]);
        }
        std::swap(p, next);
        if (residual < 1e-12) {
            break;
        }
    }

    FlowNetwork network;
    network.teleportation = teleportation;
    network.node_flow = std::move(p);
    double arc_total = 0.0;
    network.arcs.reserve(links.size());
    for (const auto& l : links) {
        const double f = network.node_flow[l.source] * l.weight / out_strength[l.source];
        network.arcs.push_back({l.source, l.target, f});
        arc_total += f;
    }
    if (arc_total > 0.0) {
        for (auto& arc : network.arcs) {
            arc.flow /= arc_total;
        }
    }
    return network;
}

FlowNetwork undirected_flow(const WeightedDigraph& graph) {
    check_arcs(graph);
    const auto n = graph.node_count;
    std::map<std::pair<std::size_t, std::size_t>, double> links;
    for (const auto& arc : graph.arcs) {
        if (arc.weight > 0.0 && arc.source != arc.target) {
            links[std::minmax(arc.source, arc.target)] += arc.weight;
        }
    }
    FlowNetwork network;
    network.teleportation = 0.0;
    network.node_flow.assign(n, 0.0);
    double total = 0.0;
    for (const auto& [key, w] : links) {
        total += w;
    }
    if (total == 0.0) {
        std::fill(network.node_flow.begin(), network.node_flow.end(), 1.0 / static_cast<double>(n));
        return network;
    }
    network.arcs.reserve(2 * links.size());
    for (const auto& [key, w] : links) {
        const double f = 0.5 * w / total;
        network.arcs.push_back({key.first, key.second, f});
        network.arcs.push_back({key.second, key.first, f});
        network.node_flow[key.first] += f;
        network.node_flow[key.second] += f;
    }
    return network;
}

const char* to_string(FlowModel model) { return model == FlowModel::Undirected ? "undirected" : "directed"; }

FlowNetwork make_flow(const WeightedDigraph& graph, FlowModel model, double teleportation) {
    return model == FlowModel::Undirected ? undirected_flow(graph) : stationary_flow(graph, teleportation);
}

} // namespace gridseg
