#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gridseg/graph.hpp"
#include "gridseg/grid_case.hpp"
#include "gridseg/powerflow.hpp"

namespace gridseg {

struct Intervention {
    enum class Kind { LineOutage };

    Kind kind = Kind::LineOutage;
    std::size_t target = 0;  // branch index
};

enum class NodeStatus { Simulated, SkippedIslanding, SkippedNonconvergence };

const char* to_string(NodeStatus status);

/// Copy of `grid` with `branch` switched out; injections unchanged. Throws
/// std::out_of_range for a bad index and std::invalid_argument when the
/// branch is already out of service.
GridCase apply_outage(const GridCase& grid, std::size_t branch);
GridCase apply(const GridCase& grid, const Intervention& intervention);

/// True iff `branch` is a bridge of the in-service topology (parallel
/// branches count, so one of a parallel pair never islands).
bool is_islanding(const GridCase& grid, std::size_t branch);
/// is_islanding for every branch at once; false for out-of-service branches.
std::vector<bool> islanding_branches(const GridCase& grid);

/// Absolute change of every branch active flow caused by one intervention.
/// `delta` has one entry per branch (MW); delta[source] is 0 by convention.
struct InfluenceRow {
    std::size_t source = 0;
    std::vector<double> delta;
    NodeStatus status = NodeStatus::Simulated;
};

/// Simulates the outage of `branch` against `base` (a converged solution of
/// `grid` computed with `options.method`). AC solves warm-start from the base
/// voltages and retry once from flat start before giving up with
/// SkippedNonconvergence (delta all zero). Throws std::invalid_argument for an
/// islanding outage.
InfluenceRow influence_row(const GridCase& grid, const PowerFlowSolution& base, std::size_t branch,
                           const SolverOptions& options);

/// Stacked rows for every in-service branch.
struct InfluenceMatrix {
    std::vector<std::size_t> node_branch;  // node -> branch index
    std::vector<std::string> labels;       // node -> branch label
    std::vector<InfluenceRow> rows;        // node -> row
    PowerFlowSolution base;
    std::vector<double> base_flows;  // per branch, MW

    std::size_t node_count() const { return node_branch.size(); }
};

/// Runs all single-line outages, in parallel over `workers` threads
/// (0 = hardware concurrency). The result does not depend on scheduling.
/// Throws SolverError if the base case does not solve.
InfluenceMatrix compute_influence_matrix(const GridCase& grid, const SolverOptions& options, unsigned workers = 0);

struct InfluenceEdge {
    std::size_t source;  // node ids
    std::size_t target;
    double weight;  // MW

    bool operator==(const InfluenceEdge&) const = default;
};

/// Directed graph over in-service lines; edge i->j iff |dz_i[j]| >= threshold.
struct InfluenceGraph {
    std::vector<std::size_t> node_branch;
    std::vector<std::string> labels;
    std::vector<NodeStatus> status;
    std::vector<InfluenceEdge> edges;  // sorted by (source, target)
    double threshold = 1.0;

    std::size_t node_count() const { return node_branch.size(); }
    WeightedDigraph digraph() const;
};

/// Throws std::invalid_argument unless threshold > 0.
InfluenceGraph threshold_influence(const InfluenceMatrix& matrix, double threshold_mw);

InfluenceGraph build_influence_graph(const GridCase& grid, const SolverOptions& options, double threshold_mw = 1.0,
                                     unsigned workers = 0);

} // namespace gridseg
