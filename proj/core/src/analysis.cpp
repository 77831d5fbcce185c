#include "gridseg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gridseg {

std::vector<std::string> ClusterReport::border_labels() const {
    std::vector<std::pair<std::size_t, std::string>> all;
    for (const auto& c : clusters) {
        for (auto b : c.border_branches) {
            auto pos = std::find(c.branches.begin(), c.branches.end(), b) - c.branches.begin();
            all.emplace_back(b, c.labels[static_cast<std::size_t>(pos)]);
        }
    }
    std::sort(all.begin(), all.end());
    std::vector<std::string> out;
    for (auto& [b, label] : all) {
        out.push_back(std::move(label));
    }
    return out;
}

ClusterReport cluster_connectivity(const Partition& partition, std::span<const std::size_t> node_branch,
                                   const GridCase& grid, std::span<const double> base_flows) {
    if (partition.node_count() != node_branch.size()) {
        throw std::invalid_argument("partition does not match the line set");
    }
    if (!base_flows.empty() && base_flows.size() != grid.branch_count()) {
        throw std::invalid_argument("base flows do not match the case branch count");
    }
    const auto labels = branch_labels(grid);
    for (auto b : node_branch) {
        if (b >= grid.branch_count() || !grid.branches()[b].in_service) {
            throw std::invalid_argument("partition node is not an in-service branch of the case");
        }
    }

    ClusterReport report;
    report.clusters.resize(partition.module_count);
    report.clusters_per_level = {partition.module_count};

    // Module of each line touching each bus.
    std::vector<std::vector<std::size_t>> bus_modules(grid.bus_count());
    for (std::size_t v = 0; v < node_branch.size(); ++v) {
        const auto& br = grid.branches()[node_branch[v]];
        for (int end : {br.from, br.to}) {
            bus_modules[grid.bus_position(end)].push_back(partition.module[v]);
        }
    }

    for (std::size_t m = 0; m < partition.module_count; ++m) {
        auto& cluster = report.clusters[m];
        std::vector<std::size_t> nodes;
        for (std::size_t v = 0; v < node_branch.size(); ++v) {
            if (partition.module[v] == m) {
                nodes.push_back(v);
            }
        }
        std::sort(nodes.begin(), nodes.end(),
                  [&](std::size_t a, std::size_t b) { return node_branch[a] < node_branch[b]; });

        DisjointSets buses(grid.bus_count());
        std::vector<bool> touched(grid.bus_count(), false);
        for (auto v : nodes) {
            const auto b = node_branch[v];
            const auto& br = grid.branches()[b];
            const auto f = grid.bus_position(br.from);
            const auto t = grid.bus_position(br.to);
            buses.unite(f, t);
            touched[f] = touched[t] = true;
            cluster.branches.push_back(b);
            cluster.labels.push_back(labels[b]);
            if (!base_flows.empty()) {
                cluster.total_base_flow_mw += std::abs(base_flows[b]);
            }
            const bool border = std::any_of(bus_modules[f].begin(), bus_modules[f].end(),
                                            [&](std::size_t other) { return other != m; }) ||
                                std::any_of(bus_modules[t].begin(), bus_modules[t].end(),
                                            [&](std::size_t other) { return other != m; });
            if (border) {
                cluster.border_branches.push_back(b);
            }
        }
        std::size_t root = static_cast<std::size_t>(-1);
        for (std::size_t i = 0; i < grid.bus_count(); ++i) {
            if (!touched[i]) {
                continue;
            }
            const auto r = buses.find(i);
            if (root == static_cast<std::size_t>(-1)) {
                root = r;
            } else if (r != root) {
                cluster.connected = false;
                break;
            }
        }
        if (!cluster.connected) {
            ++report.non_connected;
        }
    }
    return report;
}

std::vector<bool> bus_cluster_connectivity(const Partition& partition, const GridCase& grid) {
    if (partition.node_count() != grid.bus_count()) {
        throw std::invalid_argument("partition does not match the bus set");
    }
    DisjointSets sets(grid.bus_count());
    for (const auto& br : grid.branches()) {
        if (!br.in_service) {
            continue;
        }
        const auto f = grid.bus_position(br.from);
        const auto t = grid.bus_position(br.to);
        if (partition.module[f] == partition.module[t]) {
            sets.unite(f, t);
        }
    }
    std::vector<std::size_t> root(partition.module_count, static_cast<std::size_t>(-1));
    std::vector<bool> connected(partition.module_count, true);
    for (std::size_t i = 0; i < grid.bus_count(); ++i) {
        const auto m = partition.module[i];
        const auto r = sets.find(i);
        if (root[m] == static_cast<std::size_t>(-1)) {
            root[m] = r;
        } else if (root[m] != r) {
            connected[m] = false;
        }
    }
    return connected;
}

std::vector<std::vector<std::size_t>> line_adjacency(const GridCase& grid, std::span<const std::size_t> node_branch) {
    std::vector<std::vector<std::size_t>> at_bus(grid.bus_count());
    for (std::size_t v = 0; v < node_branch.size(); ++v) {
        const auto& br = grid.branches()[node_branch[v]];
        at_bus[grid.bus_position(br.from)].push_back(v);
        at_bus[grid.bus_position(br.to)].push_back(v);
    }
    std::vector<std::vector<std::size_t>> out(node_branch.size());
    for (const auto& nodes : at_bus) {
        for (auto a : nodes) {
            for (auto b : nodes) {
                if (a != b) {
                    out[a].push_back(b);
                }
            }
        }
    }
    for (auto& list : out) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return out;
}

std::vector<std::vector<std::size_t>> bus_adjacency(const GridCase& grid) {
    std::vector<std::vector<std::size_t>> out(grid.bus_count());
    for (const auto& br : grid.branches()) {
        if (!br.in_service) {
            continue;
        }
        const auto f = grid.bus_position(br.from);
        const auto t = grid.bus_position(br.to);
        if (f != t) {
            out[f].push_back(t);
            out[t].push_back(f);
        }
    }
    for (auto& list : out) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return out;
}

const char* to_string(BaselineKind kind) {
    return kind == BaselineKind::Connectivity ? "connectivity" : "conductance";
}

WeightedDigraph baseline_graph(const GridCase& grid, BaselineKind kind) {
    std::map<std::pair<std::size_t, std::size_t>, double> weights;
    for (const auto& br : grid.branches()) {
        if (!br.in_service) {
            continue;
        }
        auto f = grid.bus_position(br.from);
        auto t = grid.bus_position(br.to);
        if (f == t) {
            continue;
        }
        if (f > t) {
            std::swap(f, t);
        }
        double w = 1.0;
        if (kind == BaselineKind::Conductance) {
            const double z2 = br.r * br.r + br.x * br.x;
            w = z2 > 0.0 ? std::abs(br.r) / z2 : 0.0;
        }
        weights[{f, t}] += w;
    }
    WeightedDigraph graph;
    graph.node_count = grid.bus_count();
    for (const auto& [key, w] : weights) {
        graph.add_undirected(key.first, key.second, w);
    }
    return graph;
}

namespace {

double choose2(double x) { return x * (x - 1.0) / 2.0; }

} // namespace

PartitionSimilarity compare_partitions(const Partition& a, const Partition& b) {
    if (a.node_count() != b.node_count()) {
        throw std::invalid_argument("partitions cover different node counts");
    }
    const auto n = a.node_count();
    const auto ca = Partition::from_labels(a.module);
    const auto cb = Partition::from_labels(b.module);
    const bool identical = ca == cb;

    std::map<std::pair<std::size_t, std::size_t>, double> table;
    std::vector<double> rows(ca.module_count, 0.0);
    std::vector<double> cols(cb.module_count, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        table[{ca.module[v], cb.module[v]}] += 1.0;
        rows[ca.module[v]] += 1.0;
        cols[cb.module[v]] += 1.0;
    }

    PartitionSimilarity s;
    double index = 0.0;
    for (const auto& [key, count] : table) {
        index += choose2(count);
    }
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (double r : rows) {
        sum_a += choose2(r);
    }
    for (double c : cols) {
        sum_b += choose2(c);
    }
    const double total = choose2(static_cast<double>(n));
    const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    s.adjusted_rand = denom != 0.0 ? (index - expected) / denom : (identical ? 1.0 : 0.0);

    const double nd = static_cast<double>(n);
    double ha = 0.0;
    double hb = 0.0;
    for (double r : rows) {
        ha -= (r / nd) * std::log(r / nd);
    }
    for (double c : cols) {
        hb -= (c / nd) * std::log(c / nd);
    }
    double mi = 0.0;
    for (const auto& [key, count] : table) {
        mi += (count / nd) * std::log(count * nd / (rows[key.first] * cols[key.second]));
    }
    const double hsum = ha + hb;
    s.normalized_mutual_information = hsum > 0.0 ? std::clamp(2.0 * mi / hsum, 0.0, 1.0) : (identical ? 1.0 : 0.0);
    return s;
}

std::vector<std::size_t> heatmap_order(const Partition& partition) {
    std::vector<std::size_t> order(partition.node_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return partition.module[a] < partition.module[b];
    });
    return order;
}

nlohmann::json to_json(const ClusterReport& report) {
    nlohmann::json clusters = nlohmann::json::array();
    for (std::size_t m = 0; m < report.clusters.size(); ++m) {
        const auto& c = report.clusters[m];
        nlohmann::json border = nlohmann::json::array();
        for (std::size_t k = 0; k < c.branches.size(); ++k) {
            if (std::find(c.border_branches.begin(), c.border_branches.end(), c.branches[k]) !=
                c.border_branches.end()) {
                border.push_back(c.labels[k]);
            }
        }
        clusters.push_back({{"module", m + 1},
                            {"lines", c.labels},
                            {"connected", c.connected},
                            {"border_lines", std::move(border)},
                            {"total_base_flow_MW", c.total_base_flow_mw}});
    }
    return {{"clusters_per_level", report.clusters_per_level},
            {"non_connected_clusters", report.non_connected},
            {"border_lines", report.border_labels()},
            {"clusters", std::move(clusters)}};
}

} // namespace gridseg
