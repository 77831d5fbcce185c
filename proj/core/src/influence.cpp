#include "gridseg/influence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "gridseg/error.hpp"

namespace gridseg {

const char* to_string(NodeStatus status) {
    switch (status) {
    case NodeStatus::Simulated:
        return "simulated";
    case NodeStatus::SkippedIslanding:
        return "skipped-islanding";
    case NodeStatus::SkippedNonconvergence:
        return "skipped-nonconvergence";
    }
    return "?";
}

GridCase apply_outage(const GridCase& grid, std::size_t branch) {
    if (branch >= grid.branch_count()) {
        throw std::out_of_range("branch index " + std::to_string(branch) + " out of range");
    }
    if (!grid.branches()[branch].in_service) {
        throw std::invalid_argument("branch " + std::to_string(branch) + " is already out of service");
    }
    return grid.with_branch_status(branch, false);
}

GridCase apply(const GridCase& grid, const Intervention& intervention) {
    switch (intervention.kind) {
    case Intervention::Kind::LineOutage:
        return apply_outage(grid, intervention.target);
    }
    throw std::invalid_argument("unknown intervention kind");
}

std::vector<bool> islanding_branches(const GridCase& grid) {
    const auto topology = bus_topology_graph(grid);
    const auto bridges = find_bridges(topology);
    std::vector<bool> result(grid.branch_count(), false);
    for (std::size_t k = 0; k < topology.edges.size(); ++k) {
        result[topology.edges[k].id] = bridges[k];
    }
    return result;
}

bool is_islanding(const GridCase& grid, std::size_t branch) {
    if (branch >= grid.branch_count()) {
        throw std::out_of_range("branch index " + std::to_string(branch) + " out of range");
    }
    return islanding_branches(grid)[branch];
}

namespace {

InfluenceRow row_from(const GridCase& outaged, const PowerFlowSolution& solution, const std::vector<double>& base_flows,
                      std::size_t branch) {
    InfluenceRow row;
    row.source = branch;
    const auto flows = branch_flows(solution, outaged);
    row.delta.resize(flows.size());
    for (std::size_t j = 0; j < flows.size(); ++j) {
        row.delta[j] = j == branch ? 0.0 : std::abs(flows[j] - base_flows[j]);
    }
    return row;
}

InfluenceRow influence_row_impl(const GridCase& grid, const PowerFlowSolution& base,
                                const std::vector<double>& base_flows, std::size_t branch,
                                const SolverOptions& options) {
    const auto outaged = apply_outage(grid, branch);
    if (options.method == Method::DC) {
        return row_from(outaged, solve_dc(outaged), base_flows, branch);
    }
    auto solution = solve_ac(outaged, options, base.voltages());
    if (!solution.converged) {
        solution = solve_ac(outaged, SolverOptions{options.method, options.tolerance, options.max_iterations, true});
    }
    if (!solution.converged) {
        InfluenceRow row;
        row.source = branch;
        row.delta.assign(grid.branch_count(), 0.0);
        row.status = NodeStatus::SkippedNonconvergence;
        return row;
    }
    return row_from(outaged, solution, base_flows, branch);
}

} // namespace

InfluenceRow influence_row(const GridCase& grid, const PowerFlowSolution& base, std::size_t branch,
                           const SolverOptions& options) {
    if (is_islanding(grid, branch)) {
        throw std::invalid_argument("outage of branch " + std::to_string(branch) + " islands the grid");
    }
    return influence_row_impl(grid, base, branch_flows(base, grid), branch, options);
}

InfluenceMatrix compute_influence_matrix(const GridCase& grid, const SolverOptions& options, unsigned workers) {
    options.check();
    InfluenceMatrix matrix;
    matrix.base = solve(grid, options);
    if (!matrix.base.converged) {
        throw SolverError("base case power flow failed: " + matrix.base.diagnostic);
    }
    matrix.base_flows = branch_flows(matrix.base, grid);

    const auto labels = branch_labels(grid);
    for (const auto& br : grid.branches()) {
        if (br.in_service) {
            matrix.node_branch.push_back(br.index);
            matrix.labels.push_back(labels[br.index]);
        }
    }
    const auto islanding = islanding_branches(grid);
    const auto n = matrix.node_count();
    matrix.rows.resize(n);

    auto compute_row = [&](std::size_t node) {
        const auto branch = matrix.node_branch[node];
        if (islanding[branch]) {
            InfluenceRow row;
            row.source = branch;
            row.delta.assign(grid.branch_count(), 0.0);
            row.status = NodeStatus::SkippedIslanding;
            return row;
        }
        return influence_row_impl(grid, matrix.base, matrix.base_flows, branch, options);
    };

    // Rows land in their node slot, so the result is schedule independent.
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(n);
    auto work = [&] {
        for (auto node = next.fetch_add(1); node < n; node = next.fetch_add(1)) {
            try {
                matrix.rows[node] = compute_row(node);
            } catch (...) {
                failures[node] = std::current_exception();
            }
        }
    };

    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back(work);
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return matrix;
}

InfluenceGraph threshold_influence(const InfluenceMatrix& matrix, double threshold_mw) {
    if (!(threshold_mw > 0.0) || !std::isfinite(threshold_mw)) {
        throw std::invalid_argument("influence threshold must be a positive number of MW");
    }
    InfluenceGraph graph;
    graph.node_branch = matrix.node_branch;
    graph.labels = matrix.labels;
    graph.threshold = threshold_mw;
    const auto n = matrix.node_count();
    graph.status.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = matrix.rows[i];
        graph.status.push_back(row.status);
        if (row.status != NodeStatus::Simulated) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double w = row.delta[matrix.node_branch[j]];
            if (std::isfinite(w) && w >= threshold_mw) {
                graph.edges.push_back({i, j, w});
            }
        }
    }
    return graph;
}

InfluenceGraph build_influence_graph(const GridCase& grid, const SolverOptions& options, double threshold_mw,
                                     unsigned workers) {
    return threshold_influence(compute_influence_matrix(grid, options, workers), threshold_mw);
}

WeightedDigraph InfluenceGraph::digraph() const {
    WeightedDigraph g;
    g.node_count = node_count();
    g.arcs.reserve(edges.size());
    for (const auto& e : edges) {
        g.arcs.push_back({e.source, e.target, e.weight});
    }
    return g;
}

} // namespace gridseg
