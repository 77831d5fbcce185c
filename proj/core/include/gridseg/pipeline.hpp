#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridseg/analysis.hpp"
#include "gridseg/flow_network.hpp"
#include "gridseg/grid_case.hpp"
#include "gridseg/influence.hpp"
#include "gridseg/optimizer.hpp"
#include "gridseg/powerflow.hpp"

namespace gridseg {

enum class Emit { Json, Csv, Dot, Heatmap };

const char* to_string(Emit emit);
Emit emit_from_string(const std::string& text);  // throws std::invalid_argument

/// Everything that determines a run's artifacts. `output_dir` and `workers`
/// only affect where and how fast, so they are not part of the manifest.
struct RunConfig {
    std::filesystem::path case_path;
    Method method = Method::AC;
    FlowModel flow_model = FlowModel::Undirected;
    double threshold_mw = 1.0;
    double teleportation = 0.15;
    std::uint64_t seed = 42;
    unsigned trials = 10;
    std::filesystem::path output_dir = ".";
    std::set<Emit> emit{Emit::Json, Emit::Csv, Emit::Dot, Emit::Heatmap};
    std::optional<BaselineKind> baseline;
    unsigned workers = 0;

    /// Throws std::invalid_argument unless threshold > 0, 0 <= tau < 1 and
    /// trials >= 1. `teleportation` only matters for the directed flow model.
    void check() const;

    nlohmann::json to_json() const;
    /// Reads the `config` object of a manifest (or the object itself).
    static RunConfig from_json(const nlohmann::json& value);
};

/// Influence-graph clustering of a loaded case. Lines with zero visit rate
/// (no influence either way) join the cluster of the nearest line sharing a
/// bus; this leaves the codelength unchanged.
struct Segmentation {
    InfluenceMatrix matrix;
    InfluenceGraph graph;
    FlowNetwork flows;
    HierarchyNode hierarchy;
    double codelength = 0.0;
    Partition top;
    ClusterReport report;
};

Segmentation segment(const GridCase& grid, const RunConfig& config);

/// Bus-graph clustering of a loaded case; zero-flow buses are attached as
/// in `segment`.
struct BaselineSegmentation {
    BaselineKind kind = BaselineKind::Connectivity;
    std::vector<std::string> labels;  // bus ids
    WeightedDigraph graph;
    FlowNetwork flows;
    HierarchyNode hierarchy;
    double codelength = 0.0;
    Partition top;
    std::vector<bool> connected;  // per top-level module
};

BaselineSegmentation segment_baseline(const GridCase& grid, BaselineKind kind, const RunConfig& config);

/// Artifact file name -> contents.
using Artifacts = std::map<std::string, std::string>;

Artifacts render_artifacts(const GridCase& grid, const RunConfig& config, const Segmentation& result);
Artifacts render_artifacts(const GridCase& grid, const RunConfig& config, const BaselineSegmentation& result);

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitSolver = 3, kExitIo = 4 };

struct RunOutcome {
    int exit_code = kExitOk;
    std::string message;
    nlohmann::json manifest;  // null on failure
    std::vector<std::filesystem::path> written;
};

/// Loads the case, clusters it, and writes the artifacts only after every
/// one of them has been produced; a failure leaves no files behind unless
/// the write itself fails midway. Never throws.
RunOutcome run_pipeline(const RunConfig& config);
/// As run_pipeline with `config.baseline` forced on (connectivity if unset).
RunOutcome run_baseline(const RunConfig& config);

/// Writes `artifacts` into `dir`, creating it. Throws IoError.
std::vector<std::filesystem::path> write_artifacts(const std::filesystem::path& dir, const Artifacts& artifacts);

} // namespace gridseg
