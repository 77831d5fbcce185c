#include "gridseg/map_equation.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace gridseg {

double plogp(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

std::vector<std::vector<std::size_t>> Partition::members() const {
    std::vector<std::vector<std::size_t>> out(module_count);
    for (std::size_t v = 0; v < module.size(); ++v) {
        out[module[v]].push_back(v);
    }
    return out;
}

Partition Partition::from_labels(std::span<const std::size_t> labels) {
    Partition p;
    p.module.resize(labels.size());
    std::unordered_map<std::size_t, std::size_t> seen;
    for (std::size_t v = 0; v < labels.size(); ++v) {
        auto [it, inserted] = seen.emplace(labels[v], p.module_count);
        if (inserted) {
            ++p.module_count;
        }
        p.module[v] = it->second;
    }
    return p;
}

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.module.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        p.module[v] = v;
    }
    p.module_count = n;
    return p;
}

Partition Partition::single_module(std::size_t n) {
    Partition p;
    p.module.assign(n, 0);
    p.module_count = n == 0 ? 0 : 1;
    return p;
}

MapEquationTerms codelength(const FlowNetwork& flows, const Partition& partition) {
    const auto n = flows.node_count();
    if (partition.node_count() != n) {
        throw std::invalid_argument("partition size does not match flow network");
    }
    const auto canonical = Partition::from_labels(partition.module);
    const auto m = canonical.module_count;

    MapEquationTerms t;
    t.module_exit.assign(m, 0.0);
    t.module_flow.assign(m, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        t.module_flow[canonical.module[v]] += flows.node_flow[v];
    }
    for (const auto& arc : flows.arcs) {
        const auto a = canonical.module[arc.source];
        if (a != canonical.module[arc.target]) {
            t.module_exit[a] += arc.flow;
        }
    }

    for (double e : t.module_exit) {
        t.index_rate += e;
    }
    if (t.index_rate > 0.0) {
        for (double e : t.module_exit) {
            if (e > 0.0) {
                const double share = e / t.index_rate;
                t.index_entropy -= share * std::log2(share);
            }
        }
    }

    t.module_rate.assign(m, 0.0);
    t.module_entropy.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        t.module_rate[i] = t.module_exit[i] + t.module_flow[i];
    }
    for (std::size_t v = 0; v < n; ++v) {
        const auto i = canonical.module[v];
        const double share = flows.node_flow[v] / t.module_rate[i];
        if (share > 0.0) {
            t.module_entropy[i] -= share * std::log2(share);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (t.module_exit[i] > 0.0) {
            const double share = t.module_exit[i] / t.module_rate[i];
            t.module_entropy[i] -= share * std::log2(share);
        }
    }

    t.codelength = t.index_rate * t.index_entropy;
    for (std::size_t i = 0; i < m; ++i) {
        t.codelength += t.module_rate[i] * t.module_entropy[i];
    }
    return t;
}

} // namespace gridseg
