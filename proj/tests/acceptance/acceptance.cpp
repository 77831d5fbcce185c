// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dc_reference.hpp"
#include "gridseg/analysis.hpp"
#include "gridseg/flow_network.hpp"
#include "gridseg/influence.hpp"
#include "gridseg/matpower.hpp"
#include "gridseg/optimizer.hpp"
#include "gridseg/pipeline.hpp"
#include "gridseg/powerflow.hpp"
#include "map_equation_reference.hpp"

namespace fs = std::filesystem;
using namespace gridseg;

namespace {

constexpr double kVmTolerance = 1e-4;           // pu
constexpr double kVaTolerance = 1e-3;           // rad
constexpr int kMaxAcIterations = 10;
constexpr double kAcRuntimeLimit = 1.0;         // s
constexpr double kLodfTolerance = 1e-6;         // MW
constexpr double kLodfRuntimeLimit = 5.0;       // s
constexpr std::size_t kIeee14Clusters = 2;
constexpr int kSeedsForMode = 10;
constexpr std::size_t kRtsClusters = 7;
constexpr std::size_t kRtsClusterSlack = 1;
constexpr double kAreaAriFloor = 0.9;
constexpr double kRtsRuntimeLimit = 30.0;       // s
constexpr std::size_t kIeee118Clusters = 9;
constexpr std::size_t kIeee118ClusterSlack = 1;
constexpr double kIeee118RuntimeLimit = 60.0;   // s
constexpr std::size_t kBaselineModules = 3;
constexpr int kRandomGraphs = 100;
constexpr std::size_t kMaxRandomNodes = 8;
constexpr int kOptimalFloor = 95;
constexpr double kNearOptimalRatio = 1.01;

fs::path data(const std::string& name) { return fs::path(GRIDSEG_DATA_DIR) / name; }

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig default_config(const fs::path& case_path) {
    RunConfig c;
    c.case_path = case_path;
    return c;
}

std::string counts(const std::vector<std::size_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s + "]";
}

Verdict power_flow_correctness() {
    const auto grid = load_matpower(data("case14.m"));
    Stopwatch clock;
    const auto sol = solve_ac(grid);
    const double runtime = clock.seconds();
    std::ifstream in(fs::path(GRIDSEG_TEST_DIR) / "golden/ieee14_ac_reference.json");
    const auto ref = nlohmann::json::parse(in);
    double vm_err = 0.0;
    double va_err = 0.0;
    for (std::size_t i = 0; i < grid.bus_count(); ++i) {
        vm_err = std::max(vm_err, std::abs(sol.vm[i] - ref["bus"][i]["Vm"].get<double>()));
        va_err = std::max(va_err, std::abs(sol.va[i] - ref["bus"][i]["Va_rad"].get<double>()));
    }
    const bool pass = sol.converged && sol.iterations <= kMaxAcIterations && vm_err <= kVmTolerance &&
                      va_err <= kVaTolerance && runtime < kAcRuntimeLimit;
    return {pass, "iterations " + std::to_string(sol.iterations) + ", max |dVm| " + fmt("%.2e", vm_err) +
                      " pu, max |dVa| " + fmt("%.2e", va_err) + " rad, " + fmt("%.3f", runtime) + " s"};
}

Verdict dc_influence_oracle() {
    SolverOptions options;
    options.method = Method::DC;
    double worst = 0.0;
    std::size_t rows = 0;
    double runtime = 0.0;
    for (const char* name : {"case14.m", "case73_rts96.m"}) {
        const auto grid = load_matpower(data(name));
        Stopwatch clock;
        const auto matrix = compute_influence_matrix(grid, options);
        runtime += clock.seconds();
        const auto model = oracle::dc_model(grid);
        for (std::size_t v = 0; v < matrix.node_count(); ++v) {
            if (matrix.rows[v].status != NodeStatus::Simulated) {
                continue;
            }
            const auto expected = oracle::lodf_prediction(grid, model, matrix.node_branch[v]);
            for (std::size_t j = 0; j < expected.size(); ++j) {
                worst = std::max(worst, std::abs(matrix.rows[v].delta[j] - expected[j]));
            }
            ++rows;
        }
    }
    return {worst <= kLodfTolerance && runtime < kLodfRuntimeLimit,
            std::to_string(rows) + " rows, max deviation " + fmt("%.2e", worst) + " MW, " + fmt("%.3f", runtime) +
                " s"};
}

Verdict ieee14_reproduction() {
    const auto grid = load_matpower(data("case14.m"));
    std::map<std::size_t, int> tally;
    std::map<std::size_t, bool> border_in_all;
    for (int seed = 1; seed <= kSeedsForMode; ++seed) {
        auto c = default_config(data("case14.m"));
        c.seed = static_cast<std::uint64_t>(seed);
        const auto s = segment(grid, c);
        const auto k = s.top.module_count;
        ++tally[k];
        const auto border = s.report.border_labels();
        const bool has = std::find(border.begin(), border.end(), "4_5") != border.end();
        border_in_all[k] = (border_in_all.count(k) ? border_in_all[k] : true) && has;
    }
    const auto mode = std::max_element(tally.begin(), tally.end(), [](const auto& a, const auto& b) {
                          return a.second < b.second || (a.second == b.second && a.first > b.first);
                      })->first;
    const bool pass = mode == kIeee14Clusters && border_in_all[mode];
    return {pass, "mode " + std::to_string(mode) + " clusters (" + std::to_string(tally[mode]) + "/" +
                      std::to_string(kSeedsForMode) + " seeds), 4_5 border " + (border_in_all[mode] ? "yes" : "no")};
}

int area_of(const GridCase& grid, int bus) { return grid.buses()[grid.bus_position(bus)].area; }

/// A tie joins two areas, possibly through series junction buses (degree 2,
/// no load, no generation).
std::vector<bool> inter_area_ties(const GridCase& grid) {
    std::vector<std::vector<std::size_t>> incident(grid.bus_count());
    std::vector<bool> injects(grid.bus_count(), false);
    for (std::size_t l = 0; l < grid.branch_count(); ++l) {
        const auto& br = grid.branches()[l];
        if (br.in_service) {
            incident[grid.bus_position(br.from)].push_back(l);
            incident[grid.bus_position(br.to)].push_back(l);
        }
    }
    for (std::size_t i = 0; i < grid.bus_count(); ++i) {
        const auto& b = grid.buses()[i];
        injects[i] = b.pd != 0.0 || b.qd != 0.0;
    }
    for (const auto& g : grid.generators()) {
        injects[grid.bus_position(g.bus)] = true;
    }
    auto terminal = [&](std::size_t line, int bus) {
        std::set<std::size_t> seen{line};
        while (true) {
            const auto pos = grid.bus_position(bus);
            if (injects[pos] || incident[pos].size() != 2) {
                return bus;
            }
            const auto next = incident[pos][0] == line ? incident[pos][1] : incident[pos][0];
            if (!seen.insert(next).second) {
                return bus;
            }
            const auto& br = grid.branches()[next];
            bus = br.from == bus ? br.to : br.from;
            line = next;
        }
    };
    std::vector<bool> tie(grid.branch_count(), false);
    for (std::size_t l = 0; l < grid.branch_count(); ++l) {
        const auto& br = grid.branches()[l];
        tie[l] = area_of(grid, terminal(l, br.from)) != area_of(grid, terminal(l, br.to));
    }
    return tie;
}

/// Label with the area digit stripped from both bus ids ("114_116" -> "14_16").
std::string area_free_label(const std::string& label) {
    std::string out;
    std::size_t start = 0;
    while (start <= label.size()) {
        auto end = label.find('_', start);
        if (end == std::string::npos) {
            end = label.size();
        }
        const auto part = label.substr(start, end - start);
        if (!out.empty()) {
            out += '_';
        }
        out += part.size() == 3 ? part.substr(1) : part;
        start = end + 1;
    }
    return out;
}

Verdict rts96_reproduction() {
    const auto grid = load_matpower(data("case73_rts96.m"));
    Stopwatch clock;
    const auto s = segment(grid, default_config(data("case73_rts96.m")));
    const double runtime = clock.seconds();

    const auto ties = inter_area_ties(grid);
    std::size_t broken = 0;
    bool broken_are_ties = true;
    for (const auto& c : s.report.clusters) {
        if (!c.connected) {
            ++broken;
            for (auto b : c.branches) {
                broken_are_ties = broken_are_ties && ties[b];
            }
        }
    }

    // Induced partition of each area over its intra-area lines, keyed by the
    // area-free label so the three areas line up.
    std::map<int, std::map<std::string, std::size_t>> induced;
    for (std::size_t v = 0; v < s.graph.node_count(); ++v) {
        const auto b = s.graph.node_branch[v];
        const auto& br = grid.branches()[b];
        const int a = area_of(grid, br.from);
        if (a == area_of(grid, br.to)) {
            induced[a][area_free_label(s.graph.labels[v])] = s.top.module[v];
        }
    }
    double worst_ari = 1.0;
    std::size_t common_lines = 0;
    std::vector<int> areas;
    for (const auto& [a, m] : induced) {
        areas.push_back(a);
    }
    for (std::size_t i = 0; i < areas.size(); ++i) {
        for (std::size_t j = i + 1; j < areas.size(); ++j) {
            std::vector<std::size_t> la;
            std::vector<std::size_t> lb;
            for (const auto& [key, m] : induced[areas[i]]) {
                const auto it = induced[areas[j]].find(key);
                if (it != induced[areas[j]].end()) {
                    la.push_back(m);
                    lb.push_back(it->second);
                }
            }
            common_lines = la.size();
            worst_ari = std::min(
                worst_ari, compare_partitions(Partition::from_labels(la), Partition::from_labels(lb)).adjusted_rand);
        }
    }

    const auto k = s.top.module_count;
    const bool count_ok = k + kRtsClusterSlack >= kRtsClusters && k <= kRtsClusters + kRtsClusterSlack;
    const bool pass = count_ok && broken == 1 && broken_are_ties && areas.size() == 3 && worst_ari >= kAreaAriFloor &&
                      runtime < kRtsRuntimeLimit;
    return {pass, std::to_string(k) + " clusters, " + std::to_string(broken) + " non-connected (" +
                      (broken_are_ties ? "all ties" : "not only ties") + "), min area ARI " +
                      fmt("%.4f", worst_ari) + " over " + std::to_string(common_lines) + " lines, " +
                      fmt("%.3f", runtime) + " s"};
}

Verdict ieee118_reproduction() {
    const auto grid = load_matpower(data("case118.m"));
    Stopwatch clock;
    const auto s = segment(grid, default_config(data("case118.m")));
    const double runtime = clock.seconds();
    const auto k = s.top.module_count;
    const bool count_ok = k + kIeee118ClusterSlack >= kIeee118Clusters && k <= kIeee118Clusters + kIeee118ClusterSlack;
    const bool pass = count_ok && s.report.non_connected == 1 && runtime < kIeee118RuntimeLimit;
    return {pass, std::to_string(k) + " clusters, " + std::to_string(s.report.non_connected) + " non-connected, " +
                      "codelength " + fmt("%.5f", s.codelength) + " bits, " + fmt("%.3f", runtime) + " s"};
}

Verdict baseline_contrast() {
    const auto grid = load_matpower(data("case73_rts96.m"));
    const auto config = default_config(data("case73_rts96.m"));
    bool pass = true;
    std::string detail;
    for (auto kind : {BaselineKind::Connectivity, BaselineKind::Conductance}) {
        const auto s = segment_baseline(grid, kind, config);
        const auto broken = static_cast<std::size_t>(std::count(s.connected.begin(), s.connected.end(), false));
        pass = pass && s.top.module_count == kBaselineModules && broken == 0;
        detail += std::string(detail.empty() ? "" : "; ") + to_string(kind) + " " + std::to_string(s.top.module_count) +
                  " modules " + counts(modules_per_level(s.hierarchy)) + ", " + std::to_string(broken) +
                  " non-connected";
    }
    return {pass, detail};
}

Verdict map_equation_optimality() {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> size(2, kMaxRandomNodes);
    std::uniform_real_distribution<double> density(0.2, 0.6);
    std::uniform_real_distribution<double> weight(0.1, 10.0);
    int optimal = 0;
    double worst_ratio = 1.0;
    bool monotone = true;
    for (int t = 0; t < kRandomGraphs; ++t) {
        const auto n = size(rng);
        std::bernoulli_distribution keep(density(rng));
        WeightedDigraph g;
        g.node_count = n;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                if (u != v && keep(rng)) {
                    g.arcs.push_back({u, v, weight(rng)});
                }
            }
        }
        const auto flows = stationary_flow(g, 0.15);
        const auto result = optimize_two_level(flows);
        oracle::Matrix dense(n, std::vector<double>(n, 0.0));
        for (const auto& a : flows.arcs) {
            dense[a.source][a.target] += a.flow;
        }
        const auto best = oracle::brute_force(flows.node_flow, dense);
        if (result.codelength <= best.length + 1e-10) {
            ++optimal;
        } else {
            worst_ratio = std::max(worst_ratio, result.codelength / best.length);
        }
        for (std::size_t k = 1; k < result.trace.size(); ++k) {
            monotone = monotone && result.trace[k] <= result.trace[k - 1] + 1e-12;
        }
    }
    const bool pass = optimal >= kOptimalFloor && worst_ratio <= kNearOptimalRatio && monotone;
    return {pass, std::to_string(optimal) + "/" + std::to_string(kRandomGraphs) + " optimal, worst ratio " +
                      fmt("%.4f", worst_ratio) + ", traces " + (monotone ? "monotone" : "not monotone")};
}

Verdict determinism() {
    const auto root = fs::temp_directory_path() / "gridseg_acceptance_determinism";
    fs::remove_all(root);
    auto first = default_config(data("case73_rts96.m"));
    first.output_dir = root / "first";
    const auto a = run_pipeline(first);
    auto replay = RunConfig::from_json(nlohmann::json::parse(slurp(first.output_dir / "manifest.json")));
    replay.output_dir = root / "second";
    replay.workers = 3;
    const auto b = run_pipeline(replay);
    bool identical = a.exit_code == kExitOk && b.exit_code == kExitOk && a.written.size() == b.written.size();
    std::size_t files = 0;
    if (identical) {
        for (const auto& path : a.written) {
            identical = identical && slurp(path) == slurp(replay.output_dir / path.filename());
            ++files;
        }
    }
    fs::remove_all(root);
    return {identical, std::to_string(files) + " artifacts compared byte for byte"};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria{
        {"1 power-flow correctness (IEEE-14 AC vs reference solver)", power_flow_correctness},
        {"2 DC influence rows equal LODF prediction (IEEE-14, RTS-96)", dc_influence_oracle},
        {"3 IEEE-14: 2 clusters, 4_5 on the border", ieee14_reproduction},
        {"4 RTS-96: 7+-1 clusters, one non-connected tie cluster, areas agree", rts96_reproduction},
        {"5 IEEE-118: 9+-1 clusters, exactly one non-connected", ieee118_reproduction},
        {"6 RTS-96 bus-graph baselines: 3 connected modules each", baseline_contrast},
        {"7 map-equation optimality on 100 random graphs (n <= 8)", map_equation_optimality},
        {"8 determinism: identical manifests give identical artifacts", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Stopwatch clock;
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("[%s] %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), clock.seconds());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
