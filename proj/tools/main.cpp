#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gridseg/case_json.hpp"
#include "gridseg/error.hpp"
#include "gridseg/matpower.hpp"
#include "gridseg/pipeline.hpp"
#include "gridseg/powerflow.hpp"

namespace {

using namespace gridseg;

int print_outcome(const RunOutcome& outcome) {
    if (outcome.exit_code != kExitOk) {
        std::cerr << "gridseg: " << outcome.message << "\n";
        return outcome.exit_code;
    }
    const auto& c = outcome.manifest.at("clustering");
    std::cout << "top-level clusters: " << c.at("top_level_clusters").get<std::size_t>()
              << "\nnon-connected clusters: " << c.at("non_connected_clusters").get<std::size_t>()
              << "\ncodelength (bits): " << c.at("codelength_bits").get<double>() << "\n";
    for (const auto& path : outcome.written) {
        std::cout << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

// Maps library exceptions raised outside run_pipeline onto exit codes.
template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        std::cerr << "gridseg: parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const CaseError& e) {
        std::cerr << "gridseg: invalid case: " << e.what() << "\n";
        return kExitParse;
    } catch (const SolverError& e) {
        std::cerr << "gridseg: solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const IoError& e) {
        std::cerr << "gridseg: i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gridseg: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Power-grid segmentation by influence-graph clustering"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("gridseg ") + "0.1.0");

    // segment
    auto* seg = app.add_subcommand("segment", "Build the influence graph of a case and cluster it");
    std::string case_path;
    std::string solver = "ac";
    RunConfig config;
    std::string baseline;
    std::vector<std::string> emits;
    std::string manifest_path;
    std::string out_dir = ".";
    seg->add_option("case", case_path, "MATPOWER case file");
    seg->add_option("--solver", solver, "Power-flow model")
        ->check(CLI::IsMember({"ac", "dc"}))
        ->capture_default_str();
    seg->add_option("--threshold", config.threshold_mw, "Influence edge threshold in MW")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    std::string flow_model = "undirected";
    seg->add_option("--flow", flow_model, "Random-walk model on the influence graph")
        ->check(CLI::IsMember({"undirected", "directed"}))
        ->capture_default_str();
    seg->add_option("--tau", config.teleportation, "Teleportation probability (directed flow only)")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    seg->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    seg->add_option("--trials", config.trials, "Optimizer restarts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    seg->add_option("--out", out_dir, "Output directory")->capture_default_str();
    seg->add_option("--baseline", baseline, "Cluster a naive bus graph instead")
        ->check(CLI::IsMember({"connectivity", "conductance"}));
    seg->add_option("--emit", emits, "Artifact kinds to write (repeatable; default all)")
        ->check(CLI::IsMember({"json", "csv", "dot", "heatmap"}));
    auto* manifest_opt = seg->add_option("--manifest", manifest_path, "Re-run the configuration stored in a manifest")
                             ->check(CLI::ExistingFile);
    seg->add_option("--workers", config.workers, "Contingency threads (0 = all cores)")->capture_default_str();
    for (auto* opt : {"--solver", "--flow", "--threshold", "--tau", "--seed", "--trials", "--baseline", "--emit"}) {
        manifest_opt->excludes(seg->get_option(opt));
    }

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Run a base-case power flow and print it as JSON");
    std::string solve_case;
    std::string solve_method = "ac";
    solve_cmd->add_option("case", solve_case, "MATPOWER case file")->required();
    solve_cmd->add_option("--solver", solve_method, "Power-flow model")
        ->check(CLI::IsMember({"ac", "dc"}))
        ->capture_default_str();

    // inspect
    auto* inspect_cmd = app.add_subcommand("inspect", "Validate a case and print its canonical JSON");
    std::string inspect_case;
    inspect_cmd->add_option("case", inspect_case, "MATPOWER case file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*seg) {
        return guarded([&] {
            if (!manifest_path.empty()) {
                std::ifstream in(manifest_path);
                nlohmann::json doc;
                try {
                    doc = nlohmann::json::parse(in);
                } catch (const nlohmann::json::exception& e) {
                    throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
                }
                const auto workers = config.workers;
                config = RunConfig::from_json(doc);
                config.workers = workers;
                if (!case_path.empty()) {
                    config.case_path = case_path;
                }
            } else {
                if (case_path.empty()) {
                    throw std::invalid_argument("a case file or --manifest is required");
                }
                config.case_path = case_path;
                config.method = solver == "dc" ? Method::DC : Method::AC;
                config.flow_model = flow_model == "directed" ? FlowModel::Directed : FlowModel::Undirected;
                if (!baseline.empty()) {
                    config.baseline = baseline == "conductance" ? BaselineKind::Conductance
                                                                : BaselineKind::Connectivity;
                }
                if (!emits.empty()) {
                    config.emit.clear();
                    for (const auto& e : emits) {
                        config.emit.insert(emit_from_string(e));
                    }
                }
            }
            config.output_dir = out_dir;
            return print_outcome(config.baseline ? run_baseline(config) : run_pipeline(config));
        });
    }
    if (*solve_cmd) {
        return guarded([&] {
            const auto grid = load_matpower(solve_case);
            SolverOptions options;
            options.method = solve_method == "dc" ? Method::DC : Method::AC;
            const auto solution = solve(grid, options);
            std::cout << to_json(solution, grid).dump(2) << "\n";
            return solution.converged ? kExitOk : kExitSolver;
        });
    }
    return guarded([&] {
        const auto grid = load_matpower(inspect_case);
        const auto problems = validate(grid);
        for (const auto& p : problems) {
            std::cerr << "warning: " << p << "\n";
        }
        std::cout << to_json(grid).dump(2) << "\n";
        return problems.empty() ? kExitOk : kExitParse;
    });
}
