#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridseg/grid_case.hpp"

namespace gridseg {

enum class Method { AC, DC };

const char* to_string(Method method);

struct SolverOptions {
    Method method = Method::AC;
    double tolerance = 1e-6;  // max bus power mismatch, pu
    int max_iterations = 20;
    bool flat_start = true;

    /// Throws std::invalid_argument on tolerance <= 0 or max_iterations < 1.
    void check() const;
};

struct VoltageState {
    std::vector<double> vm;  // pu, per bus position
    std::vector<double> va;  // rad
};

/// Solved state. Bus vectors are indexed by bus position and branch vectors
/// by branch index; out-of-service branches carry zero flow.
struct PowerFlowSolution {
    Method method = Method::AC;
    std::vector<double> vm;
    std::vector<double> va;
    std::vector<double> p_from;  // MW
    std::vector<double> p_to;
    std::vector<double> q_from;  // MVAr
    std::vector<double> q_to;
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;  // MW-equivalent
    std::string diagnostic;

    VoltageState voltages() const { return {vm, va}; }
};

/// Linear DC power flow. Throws SolverError when a connected component has no
/// slack (or more than one) or the reduced susceptance matrix is singular.
PowerFlowSolution solve_dc(const GridCase& grid);

/// Polar Newton-Raphson AC power flow without reactive limits. Failure to
/// converge is reported through `converged == false` and `diagnostic`;
/// topological problems throw SolverError.
PowerFlowSolution solve_ac(const GridCase& grid, const SolverOptions& options = {});
/// As above, starting from `start` (PV and slack magnitudes still come from
/// generator setpoints).
PowerFlowSolution solve_ac(const GridCase& grid, const SolverOptions& options, const VoltageState& start);

/// Dispatches on `options.method`.
PowerFlowSolution solve(const GridCase& grid, const SolverOptions& options);

/// Active flow at the from-end of every branch, in MW (length = branch count).
/// Throws std::logic_error on a non-converged solution.
std::vector<double> branch_flows(const PowerFlowSolution& solution, const GridCase& grid);

/// Complex bus power mismatch S_calc - S_specified in pu for a given voltage
/// profile. Slack entries are meaningless (slack absorbs the imbalance), and
/// PV reactive entries likewise.
std::vector<std::complex<double>> power_mismatch(const GridCase& grid, std::span<const double> vm,
                                                 std::span<const double> va);

nlohmann::json to_json(const PowerFlowSolution& solution, const GridCase& grid);

} // namespace gridseg
