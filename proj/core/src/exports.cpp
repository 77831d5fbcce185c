#include "gridseg/exports.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace gridseg {

std::string format_number(double value) {
    if (value == 0.0) {
        return "0";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string influence_edges_csv(const InfluenceGraph& graph) {
    std::string out = "src,dst,weight_mw\n";
    for (const auto& e : graph.edges) {
        out += graph.labels[e.source];
        out += ',';
        out += graph.labels[e.target];
        out += ',';
        out += format_number(e.weight);
        out += '\n';
    }
    return out;
}

std::string heatmap_csv(std::span<const std::string> labels, const WeightedDigraph& graph,
                        std::span<const std::size_t> order) {
    const auto n = graph.node_count;
    std::vector<double> dense(n * n, 0.0);
    for (const auto& a : graph.arcs) {
        dense[a.source * n + a.target] += a.weight;
    }
    std::string out = "node";
    for (auto j : order) {
        out += ',';
        out += labels[j];
    }
    out += '\n';
    for (auto i : order) {
        out += labels[i];
        for (auto j : order) {
            out += ',';
            out += format_number(dense[i * n + j]);
        }
        out += '\n';
    }
    return out;
}

namespace {

// Qualitative palette; modules beyond it cycle.
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};

} // namespace

std::string graph_dot(std::span<const std::string> labels, const WeightedDigraph& graph, const Partition& modules) {
    std::map<std::pair<std::size_t, std::size_t>, double> merged;
    double wmax = 0.0;
    for (const auto& a : graph.arcs) {
        wmax = std::max(wmax, merged[{a.source, a.target}] += a.weight);
    }
    std::ostringstream out;
    out << "digraph gridseg {\n  node [style=filled, shape=ellipse];\n";
    for (std::size_t v = 0; v < graph.node_count; ++v) {
        const auto m = modules.module[v];
        out << "  \"" << labels[v] << "\" [fillcolor=\"" << kPalette[m % std::size(kPalette)] << "\", module=" << m + 1
            << "];\n";
    }
    for (const auto& [key, w] : merged) {
        const double pen = wmax > 0.0 ? 0.5 + 4.5 * w / wmax : 0.5;
        out << "  \"" << labels[key.first] << "\" -> \"" << labels[key.second] << "\" [weight=" << format_number(w)
            << ", penwidth=" << format_number(pen) << "];\n";
    }
    out << "}\n";
    return out.str();
}

namespace {

void collect_leaves(const HierarchyNode& node, std::vector<std::size_t>& path, std::span<const std::string> labels,
                    nlohmann::json& leaves) {
    if (node.is_leaf()) {
        nlohmann::json names = nlohmann::json::array();
        for (auto v : node.nodes) {
            names.push_back(labels[v]);
        }
        leaves.push_back({{"module_path", path}, {"nodes", std::move(names)}});
        return;
    }
    for (std::size_t c = 0; c < node.children.size(); ++c) {
        path.push_back(c + 1);
        collect_leaves(node.children[c], path, labels, leaves);
        path.pop_back();
    }
}

} // namespace

nlohmann::json partition_json(const HierarchyNode& root, std::span<const std::string> labels, double codelength) {
    nlohmann::json leaves = nlohmann::json::array();
    std::vector<std::size_t> path;
    if (root.is_leaf()) {
        path.push_back(1);
    }
    collect_leaves(root, path, labels, leaves);
    auto per_level = modules_per_level(root);
    if (per_level.empty()) {
        per_level.push_back(1);
    }
    return {{"codelength_bits", codelength},
            {"top_modules", root.is_leaf() ? std::size_t{1} : root.children.size()},
            {"depth", std::max<std::size_t>(root.depth(), 1)},
            {"modules_per_level", per_level},
            {"leaves", std::move(leaves)}};
}

std::string partition_csv(const HierarchyNode& root, std::span<const std::string> labels, const std::string& key) {
    const auto paths = module_paths(root, labels.size());
    const auto depth = std::max<std::size_t>(root.depth(), 1);
    std::string out = key;
    for (std::size_t l = 1; l <= depth; ++l) {
        out += ",level" + std::to_string(l);
    }
    out += '\n';
    for (std::size_t v = 0; v < labels.size(); ++v) {
        out += labels[v];
        for (std::size_t l = 0; l < depth; ++l) {
            out += ',';
            if (paths[v].empty()) {
                out += '1';
            } else if (l < paths[v].size()) {
                out += std::to_string(paths[v][l] + 1);
            }
        }
        out += '\n';
    }
    return out;
}

std::string dump_json(const nlohmann::json& value) { return value.dump(2) + "\n"; }

} // namespace gridseg
