#include "gridseg/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "gridseg/error.hpp"
#include "gridseg/exports.hpp"
#include "gridseg/matpower.hpp"

#ifndef GRIDSEG_VERSION
#define GRIDSEG_VERSION "0.0.0"
#endif

namespace gridseg {

const char* to_string(Emit emit) {
    switch (emit) {
    case Emit::Json:
        return "json";
    case Emit::Csv:
        return "csv";
    case Emit::Dot:
        return "dot";
    case Emit::Heatmap:
        return "heatmap";
    }
    return "?";
}

Emit emit_from_string(const std::string& text) {
    for (auto e : {Emit::Json, Emit::Csv, Emit::Dot, Emit::Heatmap}) {
        if (text == to_string(e)) {
            return e;
        }
    }
    throw std::invalid_argument("unknown export '" + text + "'");
}

namespace {

Method method_from_string(const std::string& text) {
    if (text == "ac") {
        return Method::AC;
    }
    if (text == "dc") {
        return Method::DC;
    }
    throw std::invalid_argument("unknown solver '" + text + "'");
}

FlowModel flow_model_from_string(const std::string& text) {
    if (text == "undirected") {
        return FlowModel::Undirected;
    }
    if (text == "directed") {
        return FlowModel::Directed;
    }
    throw std::invalid_argument("unknown flow model '" + text + "'");
}

BaselineKind baseline_from_string(const std::string& text) {
    if (text == "connectivity") {
        return BaselineKind::Connectivity;
    }
    if (text == "conductance") {
        return BaselineKind::Conductance;
    }
    throw std::invalid_argument("unknown baseline '" + text + "'");
}

} // namespace

void RunConfig::check() const {
    if (!(threshold_mw > 0.0)) {
        throw std::invalid_argument("threshold must be positive");
    }
    if (!(teleportation >= 0.0 && teleportation < 1.0)) {
        throw std::invalid_argument("teleportation must lie in [0, 1)");
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json emits = nlohmann::json::array();
    for (auto e : emit) {
        emits.push_back(to_string(e));
    }
    return {{"case", case_path.generic_string()},
            {"solver", gridseg::to_string(method)},
            {"flow_model", gridseg::to_string(flow_model)},
            {"threshold_mw", threshold_mw},
            {"tau", teleportation},
            {"seed", seed},
            {"trials", trials},
            {"baseline", baseline ? nlohmann::json(gridseg::to_string(*baseline)) : nlohmann::json(nullptr)},
            {"emit", std::move(emits)}};
}

RunConfig RunConfig::from_json(const nlohmann::json& value) {
    const auto& v = value.contains("config") ? value.at("config") : value;
    RunConfig c;
    try {
        c.case_path = v.at("case").get<std::string>();
        c.method = method_from_string(v.value("solver", std::string("ac")));
        c.flow_model = flow_model_from_string(v.value("flow_model", std::string("undirected")));
        c.threshold_mw = v.value("threshold_mw", c.threshold_mw);
        c.teleportation = v.value("tau", c.teleportation);
        c.seed = v.value("seed", c.seed);
        c.trials = v.value("trials", c.trials);
        if (v.contains("baseline") && !v.at("baseline").is_null()) {
            c.baseline = baseline_from_string(v.at("baseline").get<std::string>());
        }
        if (v.contains("emit")) {
            c.emit.clear();
            for (const auto& e : v.at("emit")) {
                c.emit.insert(emit_from_string(e.get<std::string>()));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
    }
    c.check();
    return c;
}

Segmentation segment(const GridCase& grid, const RunConfig& config) {
    config.check();
    SolverOptions options;
    options.method = config.method;
    Segmentation s;
    s.matrix = compute_influence_matrix(grid, options, config.workers);
    s.graph = threshold_influence(s.matrix, config.threshold_mw);
    s.flows = make_flow(s.graph.digraph(), config.flow_model, config.teleportation);
    s.hierarchy = optimize_hierarchical(s.flows, config.seed, config.trials);
    attach_zero_flow_nodes(s.hierarchy, s.flows, line_adjacency(grid, s.graph.node_branch));
    s.codelength = hierarchical_codelength(s.flows, s.hierarchy);
    s.top = top_level_partition(s.hierarchy, s.graph.node_count());
    s.report = cluster_connectivity(s.top, s.graph.node_branch, grid, s.matrix.base_flows);
    s.report.clusters_per_level = modules_per_level(s.hierarchy);
    if (s.report.clusters_per_level.empty()) {
        s.report.clusters_per_level.push_back(1);
    }
    return s;
}

BaselineSegmentation segment_baseline(const GridCase& grid, BaselineKind kind, const RunConfig& config) {
    config.check();
    BaselineSegmentation s;
    s.kind = kind;
    for (const auto& bus : grid.buses()) {
        s.labels.push_back(std::to_string(bus.id));
    }
    s.graph = baseline_graph(grid, kind);
    s.flows = make_flow(s.graph, config.flow_model, config.teleportation);
    s.hierarchy = optimize_hierarchical(s.flows, config.seed, config.trials);
    attach_zero_flow_nodes(s.hierarchy, s.flows, bus_adjacency(grid));
    s.codelength = hierarchical_codelength(s.flows, s.hierarchy);
    s.top = top_level_partition(s.hierarchy, grid.bus_count());
    s.connected = bus_cluster_connectivity(s.top, grid);
    return s;
}

namespace {

nlohmann::json case_summary(const GridCase& grid) {
    return {{"name", grid.name()},
            {"buses", grid.bus_count()},
            {"branches", grid.branch_count()},
            {"in_service_branches", grid.in_service_branch_count()}};
}

nlohmann::json artifact_list(const Artifacts& artifacts) {
    nlohmann::json names = nlohmann::json::array();
    for (const auto& [name, body] : artifacts) {
        names.push_back(name);
    }
    names.push_back("manifest.json");
    return names;
}

} // namespace

Artifacts render_artifacts(const GridCase& grid, const RunConfig& config, const Segmentation& s) {
    Artifacts out;
    const auto digraph = s.graph.digraph();
    if (config.emit.contains(Emit::Csv)) {
        out["influence_edges.csv"] = influence_edges_csv(s.graph);
        out["partition.csv"] = partition_csv(s.hierarchy, s.graph.labels, "branch");
    }
    if (config.emit.contains(Emit::Heatmap)) {
        out["influence_heatmap.csv"] = heatmap_csv(s.graph.labels, digraph, heatmap_order(s.top));
    }
    if (config.emit.contains(Emit::Dot)) {
        out["graph.dot"] = graph_dot(s.graph.labels, digraph, s.top);
    }
    if (config.emit.contains(Emit::Json)) {
        out["partition.json"] = dump_json(partition_json(s.hierarchy, s.graph.labels, s.codelength));
    }
    out["report.json"] = dump_json(to_json(s.report));

    nlohmann::json islanding = nlohmann::json::array();
    nlohmann::json nonconvergence = nlohmann::json::array();
    for (std::size_t v = 0; v < s.graph.node_count(); ++v) {
        if (s.graph.status[v] == NodeStatus::SkippedIslanding) {
            islanding.push_back(s.graph.labels[v]);
        } else if (s.graph.status[v] == NodeStatus::SkippedNonconvergence) {
            nonconvergence.push_back(s.graph.labels[v]);
        }
    }
    const nlohmann::json manifest = {
        {"tool", "gridseg"},
        {"version", GRIDSEG_VERSION},
        {"mode", "segment"},
        {"config", config.to_json()},
        {"case", case_summary(grid)},
        {"base_case",
         {{"method", to_string(s.matrix.base.method)},
          {"converged", s.matrix.base.converged},
          {"iterations", s.matrix.base.iterations},
          {"max_mismatch_MW", s.matrix.base.max_mismatch}}},
        {"influence_graph",
         {{"nodes", s.graph.node_count()},
          {"edges", s.graph.edges.size()},
          {"skipped_islanding", std::move(islanding)},
          {"skipped_nonconvergence", std::move(nonconvergence)}}},
        {"clustering",
         {{"codelength_bits", s.codelength},
          {"top_level_clusters", s.top.module_count},
          {"clusters_per_level", s.report.clusters_per_level},
          {"non_connected_clusters", s.report.non_connected},
          {"border_lines", s.report.border_labels()}}},
        {"artifacts", artifact_list(out)}};
    out["manifest.json"] = dump_json(manifest);
    return out;
}

Artifacts render_artifacts(const GridCase& grid, const RunConfig& config, const BaselineSegmentation& s) {
    Artifacts out;
    if (config.emit.contains(Emit::Csv)) {
        out["partition.csv"] = partition_csv(s.hierarchy, s.labels, "bus");
    }
    if (config.emit.contains(Emit::Heatmap)) {
        out["influence_heatmap.csv"] = heatmap_csv(s.labels, s.graph, heatmap_order(s.top));
    }
    if (config.emit.contains(Emit::Dot)) {
        out["graph.dot"] = graph_dot(s.labels, s.graph, s.top);
    }
    if (config.emit.contains(Emit::Json)) {
        out["partition.json"] = dump_json(partition_json(s.hierarchy, s.labels, s.codelength));
    }
    const auto members = s.top.members();
    nlohmann::json clusters = nlohmann::json::array();
    std::size_t non_connected = 0;
    for (std::size_t m = 0; m < members.size(); ++m) {
        nlohmann::json buses = nlohmann::json::array();
        for (auto v : members[m]) {
            buses.push_back(s.labels[v]);
        }
        clusters.push_back({{"module", m + 1}, {"buses", std::move(buses)}, {"connected", bool(s.connected[m])}});
        non_connected += s.connected[m] ? 0 : 1;
    }
    auto per_level = modules_per_level(s.hierarchy);
    if (per_level.empty()) {
        per_level.push_back(1);
    }
    out["report.json"] = dump_json({{"baseline", to_string(s.kind)},
                                    {"clusters_per_level", per_level},
                                    {"non_connected_clusters", non_connected},
                                    {"clusters", std::move(clusters)}});
    const nlohmann::json manifest = {{"tool", "gridseg"},
                                     {"version", GRIDSEG_VERSION},
                                     {"mode", "baseline"},
                                     {"config", config.to_json()},
                                     {"case", case_summary(grid)},
                                     {"clustering",
                                      {{"codelength_bits", s.codelength},
                                       {"top_level_clusters", s.top.module_count},
                                       {"clusters_per_level", per_level},
                                       {"non_connected_clusters", non_connected}}},
                                     {"artifacts", artifact_list(out)}};
    out["manifest.json"] = dump_json(manifest);
    return out;
}

std::vector<std::filesystem::path> write_artifacts(const std::filesystem::path& dir, const Artifacts& artifacts) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [name, body] : artifacts) {
        const auto path = dir / name;
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        file.write(body.data(), static_cast<std::streamsize>(body.size()));
        file.close();
        if (!file) {
            throw IoError("cannot write " + path.string());
        }
        written.push_back(path);
    }
    return written;
}

namespace {

RunOutcome run(const RunConfig& config) {
    RunOutcome outcome;
    try {
        config.check();
        const auto grid = load_matpower(config.case_path);
        Artifacts artifacts;
        if (config.baseline) {
            artifacts = render_artifacts(grid, config, segment_baseline(grid, *config.baseline, config));
        } else {
            artifacts = render_artifacts(grid, config, segment(grid, config));
        }
        outcome.manifest = nlohmann::json::parse(artifacts.at("manifest.json"));
        outcome.written = write_artifacts(config.output_dir, artifacts);
    } catch (const ParseError& e) {
        outcome = {kExitParse, std::string("parse error: ") + e.what(), nullptr, {}};
    } catch (const CaseError& e) {
        outcome = {kExitParse, std::string("invalid case: ") + e.what(), nullptr, {}};
    } catch (const SolverError& e) {
        outcome = {kExitSolver, std::string("solver error: ") + e.what(), nullptr, {}};
    } catch (const IoError& e) {
        outcome = {kExitIo, std::string("i/o error: ") + e.what(), nullptr, {}};
    } catch (const std::invalid_argument& e) {
        outcome = {kExitUsage, std::string("invalid configuration: ") + e.what(), nullptr, {}};
    } catch (const std::exception& e) {
        outcome = {kExitSolver, std::string("error: ") + e.what(), nullptr, {}};
    }
    return outcome;
}

} // namespace

RunOutcome run_pipeline(const RunConfig& config) { return run(config); }

RunOutcome run_baseline(const RunConfig& config) {
    auto c = config;
    if (!c.baseline) {
        c.baseline = BaselineKind::Connectivity;
    }
    return run(c);
}

} // namespace gridseg
