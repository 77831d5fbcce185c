#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridseg/graph.hpp"
#include "gridseg/influence.hpp"
#include "gridseg/map_equation.hpp"
#include "gridseg/optimizer.hpp"

namespace gridseg {

/// Shortest round-trip-safe text for artifact numbers (printf "%.12g").
std::string format_number(double value);

/// `src,dst,weight_mw`, one row per edge in (source, target) order.
std::string influence_edges_csv(const InfluenceGraph& graph);

/// Dense weight matrix in the given node order. The header row is `node`
/// followed by the column labels; each row starts with its label.
std::string heatmap_csv(std::span<const std::string> labels, const WeightedDigraph& graph,
                        std::span<const std::size_t> order);

/// GraphViz digraph. Pen width scales linearly from 0.5 to 5 with the weight;
/// nodes are filled by top-level module.
std::string graph_dot(std::span<const std::string> labels, const WeightedDigraph& graph, const Partition& modules);

/// `{codelength, top_modules, depth, modules_per_level, leaves: [{module_path, nodes}]}`.
/// Module paths are 1-based.
nlohmann::json partition_json(const HierarchyNode& root, std::span<const std::string> labels, double codelength);

/// `<key>,level1,...,levelD` with one row per node; 1-based module indices
/// (within the parent module). Cells below a node's leaf are empty. A leaf root
/// yields a single `level1` column of 1s.
std::string partition_csv(const HierarchyNode& root, std::span<const std::string> labels, const std::string& key);

/// Two-space-indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& value);

} // namespace gridseg
