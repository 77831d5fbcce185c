#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridseg/graph.hpp"
#include "gridseg/grid_case.hpp"
#include "gridseg/map_equation.hpp"

namespace gridseg {

struct ClusterInfo {
    std::vector<std::size_t> branches;  // branch indices, ascending
    std::vector<std::string> labels;
    bool connected = true;
    std::vector<std::size_t> border_branches;  // subset of `branches`
    double total_base_flow_mw = 0.0;           // sum of |Pfrom|
};

/// Topological diagnostics of a line clustering.
struct ClusterReport {
    std::vector<ClusterInfo> clusters;       // indexed by module id
    std::vector<std::size_t> clusters_per_level;  // level 1 first
    std::size_t non_connected = 0;

    /// Labels of every border line across clusters, in branch order.
    std::vector<std::string> border_labels() const;
};

/// A cluster is connected iff its lines plus their end buses form a
/// connected subgraph. A border line shares a bus with a line of another
/// cluster. `node_branch` maps partition nodes to branch indices;
/// `base_flows` (per branch, MW) may be empty. Throws std::invalid_argument
/// on a size mismatch or an out-of-service/unknown branch.
ClusterReport cluster_connectivity(const Partition& partition, std::span<const std::size_t> node_branch,
                                   const GridCase& grid, std::span<const double> base_flows = {});

/// Connectivity of bus clusters (partition over bus positions): a cluster is
/// connected iff its buses induce a connected subgraph.
std::vector<bool> bus_cluster_connectivity(const Partition& partition, const GridCase& grid);

/// Per node (a line, via `node_branch`): the other nodes whose lines share a
/// bus with it, ascending.
std::vector<std::vector<std::size_t>> line_adjacency(const GridCase& grid, std::span<const std::size_t> node_branch);

/// Per bus position: the buses joined to it by an in-service branch, ascending.
std::vector<std::vector<std::size_t>> bus_adjacency(const GridCase& grid);

enum class BaselineKind { Connectivity, Conductance };

const char* to_string(BaselineKind kind);

/// Undirected bus graph (both arc directions present). Connectivity: weight 1
/// per in-service branch; conductance: r / (r^2 + x^2). Parallel branches
/// are summed into one edge.
WeightedDigraph baseline_graph(const GridCase& grid, BaselineKind kind);

struct PartitionSimilarity {
    double adjusted_rand = 0.0;
    double normalized_mutual_information = 0.0;
};

/// Adjusted Rand index and NMI (arithmetic-mean normalization). Degenerate
/// denominators score 1 for identical partitions and 0 otherwise. Throws
/// std::invalid_argument on a size mismatch.
PartitionSimilarity compare_partitions(const Partition& a, const Partition& b);

/// Nodes ordered by module id, then by node index.
std::vector<std::size_t> heatmap_order(const Partition& partition);

nlohmann::json to_json(const ClusterReport& report);

} // namespace gridseg
