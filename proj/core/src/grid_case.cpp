#include "gridseg/grid_case.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "gridseg/error.hpp"

namespace gridseg {

const char* to_string(BusType type) {
    switch (type) {
    case BusType::PQ:
        return "PQ";
    case BusType::PV:
        return "PV";
    case BusType::Slack:
        return "slack";
    }
    return "?";
}

GridCase::GridCase(std::string name, double base_mva, std::vector<Bus> buses,
                   std::vector<Branch> branches, std::vector<Generator> generators)
    : name_(std::move(name)),
      base_mva_(base_mva),
      buses_(std::move(buses)),
      branches_(std::move(branches)),
      generators_(std::move(generators)) {
    bus_pos_.reserve(buses_.size());
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        if (!bus_pos_.emplace(buses_[i].id, i).second) {
            throw CaseError("duplicate bus id " + std::to_string(buses_[i].id));
        }
    }
    for (std::size_t k = 0; k < branches_.size(); ++k) {
        auto& br = branches_[k];
        br.index = k;
        if (!bus_pos_.contains(br.from) || !bus_pos_.contains(br.to)) {
            throw CaseError("branch " + std::to_string(k) + " (" + std::to_string(br.from) + "-" +
                            std::to_string(br.to) + ") refers to a missing bus");
        }
    }
    for (std::size_t g = 0; g < generators_.size(); ++g) {
        if (!bus_pos_.contains(generators_[g].bus)) {
            throw CaseError("generator " + std::to_string(g) + " refers to missing bus " +
                            std::to_string(generators_[g].bus));
        }
    }
}

std::size_t GridCase::in_service_branch_count() const {
    return static_cast<std::size_t>(
        std::count_if(branches_.begin(), branches_.end(), [](const Branch& b) { return b.in_service; }));
}

std::size_t GridCase::bus_position(int id) const {
    auto it = bus_pos_.find(id);
    if (it == bus_pos_.end()) {
        throw CaseError("unknown bus id " + std::to_string(id));
    }
    return it->second;
}

std::optional<std::size_t> GridCase::find_bus(int id) const {
    auto it = bus_pos_.find(id);
    if (it == bus_pos_.end()) {
        return std::nullopt;
    }
    return it->second;
}

GridCase GridCase::with_branch_status(std::size_t branch, bool in_service) const {
    GridCase copy = *this;
    copy.branches_.at(branch).in_service = in_service;
    return copy;
}

GridCase GridCase::with_scaled_load(double factor) const {
    GridCase copy = *this;
    for (auto& bus : copy.buses_) {
        bus.pd *= factor;
        bus.qd *= factor;
    }
    return copy;
}

bool GridCase::operator==(const GridCase& other) const {
    return name_ == other.name_ && base_mva_ == other.base_mva_ && buses_ == other.buses_ &&
           branches_ == other.branches_ && generators_ == other.generators_;
}

std::vector<std::string> branch_labels(const GridCase& grid) {
    std::map<std::pair<int, int>, int> seen;
    std::vector<std::string> labels;
    labels.reserve(grid.branch_count());
    for (const auto& br : grid.branches()) {
        auto key = std::minmax(br.from, br.to);
        int ordinal = ++seen[{key.first, key.second}];
        auto label = std::to_string(br.from) + "_" + std::to_string(br.to);
        if (ordinal > 1) {
            label += "_" + std::to_string(ordinal);
        }
        labels.push_back(std::move(label));
    }
    return labels;
}

std::string branch_label(const GridCase& grid, std::size_t branch) {
    return branch_labels(grid).at(branch);
}

std::vector<std::string> validate(const GridCase& grid) {
    std::vector<std::string> issues;
    if (!(grid.base_mva() > 0.0)) {
        issues.push_back("baseMVA must be positive");
    }
    for (const auto& bus : grid.buses()) {
        if (!(bus.vm > 0.0)) {
            issues.push_back("bus " + std::to_string(bus.id) + ": Vm must be positive");
        }
    }
    for (const auto& br : grid.branches()) {
        const auto name = "branch " + std::to_string(br.index) + " (" + std::to_string(br.from) + "-" +
                          std::to_string(br.to) + ")";
        if (br.from == br.to) {
            issues.push_back(name + ": from and to bus are the same");
        }
        if (br.in_service && br.x == 0.0) {
            issues.push_back(name + ": zero reactance on an in-service branch");
        }
    }

    std::vector<int> online_gens(grid.bus_count(), 0);
    for (const auto& gen : grid.generators()) {
        if (gen.in_service) {
            ++online_gens[grid.bus_position(gen.bus)];
        }
    }
    for (std::size_t i = 0; i < grid.bus_count(); ++i) {
        const auto& bus = grid.buses()[i];
        if (bus.type != BusType::PQ && online_gens[i] == 0) {
            issues.push_back("bus " + std::to_string(bus.id) + ": " + to_string(bus.type) +
                             " bus without an in-service generator");
        }
    }

    const auto topology = bus_topology_graph(grid);
    const auto component = connected_components(topology);
    const std::size_t components =
        component.empty() ? 0 : *std::max_element(component.begin(), component.end()) + 1;
    std::vector<int> slacks(components, 0);
    for (std::size_t i = 0; i < grid.bus_count(); ++i) {
        if (grid.buses()[i].type == BusType::Slack) {
            ++slacks[component[i]];
        }
    }
    for (std::size_t c = 0; c < components; ++c) {
        if (slacks[c] != 1) {
            auto first = std::find(component.begin(), component.end(), c) - component.begin();
            issues.push_back("component containing bus " + std::to_string(grid.buses()[first].id) + " has " +
                             std::to_string(slacks[c]) + " slack buses (expected 1)");
        }
    }
    return issues;
}

Multigraph bus_topology_graph(const GridCase& grid) {
    Multigraph graph;
    graph.vertex_count = grid.bus_count();
    for (const auto& br : grid.branches()) {
        if (br.in_service) {
            graph.edges.push_back({grid.bus_position(br.from), grid.bus_position(br.to), br.index});
        }
    }
    return graph;
}

} // namespace gridseg
