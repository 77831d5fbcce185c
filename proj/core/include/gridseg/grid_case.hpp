#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridseg/graph.hpp"

namespace gridseg {

enum class BusType { PQ, PV, Slack };

const char* to_string(BusType type);

struct Bus {
    int id = 0;
    BusType type = BusType::PQ;
    double pd = 0.0;  // MW
    double qd = 0.0;  // MVAr
    double gs = 0.0;  // MW at 1 pu
    double bs = 0.0;  // MVAr at 1 pu
    double vm = 1.0;  // pu
    double va = 0.0;  // rad
    double base_kv = 0.0;
    int area = 1;

    bool operator==(const Bus&) const = default;
};

struct Branch {
    std::size_t index = 0;
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
    double b = 0.0;
    double tap = 0.0;    // 0 means nominal (1.0)
    double shift = 0.0;  // rad
    bool in_service = true;

    double effective_tap() const { return tap == 0.0 ? 1.0 : tap; }

    bool operator==(const Branch&) const = default;
};

struct Generator {
    int bus = 0;
    double pg = 0.0;  // MW
    double qg = 0.0;  // MVAr
    double vg = 1.0;  // pu
    bool in_service = true;

    bool operator==(const Generator&) const = default;
};

/// Immutable grid state: injections plus topology.
///
/// Buses are addressed by external id at the boundary and by dense position
/// (0..n-1, file order) internally. Branch indices are dense and equal to the
/// branch position. Construction throws CaseError when a branch or generator
/// refers to a missing bus or when bus ids repeat.
class GridCase {
public:
    GridCase() = default;
    GridCase(std::string name, double base_mva, std::vector<Bus> buses,
             std::vector<Branch> branches, std::vector<Generator> generators);

    const std::string& name() const { return name_; }
    double base_mva() const { return base_mva_; }
    std::span<const Bus> buses() const { return buses_; }
    std::span<const Branch> branches() const { return branches_; }
    std::span<const Generator> generators() const { return generators_; }

    std::size_t bus_count() const { return buses_.size(); }
    std::size_t branch_count() const { return branches_.size(); }
    std::size_t in_service_branch_count() const;

    /// Dense position of bus `id`; throws CaseError if absent.
    std::size_t bus_position(int id) const;
    std::optional<std::size_t> find_bus(int id) const;

    /// Copy with one branch switched in or out. Injections are untouched.
    GridCase with_branch_status(std::size_t branch, bool in_service) const;
    /// Copy with every bus demand (P and Q) multiplied by `factor`.
    GridCase with_scaled_load(double factor) const;

    bool operator==(const GridCase& other) const;

private:
    std::string name_;
    double base_mva_ = 100.0;
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Generator> generators_;
    std::unordered_map<int, std::size_t> bus_pos_;
};

/// "from_to", with "_k" appended for the k-th (k >= 2) parallel branch
/// between the same pair of buses.
std::string branch_label(const GridCase& grid, std::size_t branch);
std::vector<std::string> branch_labels(const GridCase& grid);

/// Human-readable invariant violations; empty when the case is solvable.
std::vector<std::string> validate(const GridCase& grid);

/// One vertex per bus (dense positions), one edge per in-service branch.
Multigraph bus_topology_graph(const GridCase& grid);

} // namespace gridseg
