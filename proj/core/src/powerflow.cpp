#include "gridseg/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "gridseg/error.hpp"

namespace gridseg {

namespace {

using Complex = std::complex<double>;
using CSparse = Eigen::SparseMatrix<Complex>;

struct BranchAdmittance {
    Complex ff, ft, tf, tt;
};

BranchAdmittance branch_admittance(const Branch& br) {
    const Complex ys = 1.0 / Complex(br.r, br.x);
    const Complex tap = std::polar(br.effective_tap(), br.shift);
    const Complex ytt = ys + Complex(0.0, br.b / 2.0);
    return {ytt / (tap * std::conj(tap)), -ys / std::conj(tap), -ys / tap, ytt};
}

CSparse build_ybus(const GridCase& grid) {
    const auto n = static_cast<Eigen::Index>(grid.bus_count());
    std::vector<Eigen::Triplet<Complex>> entries;
    for (const auto& br : grid.branches()) {
        if (!br.in_service) {
            continue;
        }
        const auto f = static_cast<Eigen::Index>(grid.bus_position(br.from));
        const auto t = static_cast<Eigen::Index>(grid.bus_position(br.to));
        const auto y = branch_admittance(br);
        entries.emplace_back(f, f, y.ff);
        entries.emplace_back(f, t, y.ft);
        entries.emplace_back(t, f, y.tf);
        entries.emplace_back(t, t, y.tt);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& bus = grid.buses()[static_cast<std::size_t>(i)];
        entries.emplace_back(i, i, Complex(bus.gs, bus.bs) / grid.base_mva());
    }
    CSparse ybus(n, n);
    ybus.setFromTriplets(entries.begin(), entries.end());
    ybus.makeCompressed();
    return ybus;
}

/// Bus roles after demoting PV buses that have no online generator.
struct BusRoles {
    std::vector<BusType> type;
    std::vector<double> setpoint;  // generator voltage setpoint where applicable
    std::vector<Complex> injection;  // scheduled S = Sgen - Sload, pu
};

BusRoles classify(const GridCase& grid) {
    const auto n = grid.bus_count();
    BusRoles roles{std::vector<BusType>(n), std::vector<double>(n, 1.0), std::vector<Complex>(n)};
    std::vector<bool> has_gen(n, false);
    for (const auto& gen : grid.generators()) {
        if (!gen.in_service) {
            continue;
        }
        const auto i = grid.bus_position(gen.bus);
        if (!has_gen[i]) {
            roles.setpoint[i] = gen.vg;
        }
        has_gen[i] = true;
        roles.injection[i] += Complex(gen.pg, gen.qg);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& bus = grid.buses()[i];
        roles.type[i] = bus.type;
        if (bus.type == BusType::PV && !has_gen[i]) {
            roles.type[i] = BusType::PQ;
        }
        roles.injection[i] = (roles.injection[i] - Complex(bus.pd, bus.qd)) / grid.base_mva();
    }
    return roles;
}

/// Every connected component must carry exactly one slack bus.
void check_slacks(const GridCase& grid) {
    const auto component = connected_components(bus_topology_graph(grid));
    const std::size_t count = component.empty() ? 0 : *std::max_element(component.begin(), component.end()) + 1;
    std::vector<int> slacks(count, 0);
    for (std::size_t i = 0; i < grid.bus_count(); ++i) {
        if (grid.buses()[i].type == BusType::Slack) {
            ++slacks[component[i]];
        }
    }
    for (std::size_t c = 0; c < count; ++c) {
        if (slacks[c] != 1) {
            const auto first = static_cast<std::size_t>(std::find(component.begin(), component.end(), c) -
                                                        component.begin());
            throw SolverError("connected component containing bus " + std::to_string(grid.buses()[first].id) +
                              " has " + std::to_string(slacks[c]) + " slack buses");
        }
    }
}

void fill_ac_branch_flows(const GridCase& grid, const std::vector<Complex>& v, PowerFlowSolution& sol) {
    const auto nl = grid.branch_count();
    sol.p_from.assign(nl, 0.0);
    sol.p_to.assign(nl, 0.0);
    sol.q_from.assign(nl, 0.0);
    sol.q_to.assign(nl, 0.0);
    for (const auto& br : grid.branches()) {
        if (!br.in_service) {
            continue;
        }
        const auto f = grid.bus_position(br.from);
        const auto t = grid.bus_position(br.to);
        const auto y = branch_admittance(br);
        const Complex sf = v[f] * std::conj(y.ff * v[f] + y.ft * v[t]) * grid.base_mva();
        const Complex st = v[t] * std::conj(y.tf * v[f] + y.tt * v[t]) * grid.base_mva();
        sol.p_from[br.index] = sf.real();
        sol.q_from[br.index] = sf.imag();
        sol.p_to[br.index] = st.real();
        sol.q_to[br.index] = st.imag();
    }
}

std::vector<Complex> mismatch(const CSparse& ybus, const std::vector<Complex>& v, const std::vector<Complex>& sbus) {
    std::vector<Complex> current(v.size(), Complex{});
    for (Eigen::Index k = 0; k < ybus.outerSize(); ++k) {
        for (CSparse::InnerIterator it(ybus, k); it; ++it) {
            current[static_cast<std::size_t>(it.row())] += it.value() * v[static_cast<std::size_t>(it.col())];
        }
    }
    std::vector<Complex> mis(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        mis[i] = v[i] * std::conj(current[i]) - sbus[i];
    }
    return mis;
}

} // namespace

const char* to_string(Method method) { return method == Method::AC ? "ac" : "dc"; }

void SolverOptions::check() const {
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("solver tolerance must be positive");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("solver max_iterations must be at least 1");
    }
}

PowerFlowSolution solve_dc(const GridCase& grid) {
    check_slacks(grid);
    const auto n = grid.bus_count();
    const auto roles = classify(grid);

    // Reduced variable numbering: every non-slack bus gets an angle unknown.
    constexpr auto none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> var(n, none);
    std::size_t nvar = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (roles.type[i] != BusType::Slack) {
            var[i] = nvar++;
        }
    }

    std::vector<double> injection(n);
    for (std::size_t i = 0; i < n; ++i) {
        injection[i] = roles.injection[i].real() - grid.buses()[i].gs / grid.base_mva();
    }
    std::vector<Eigen::Triplet<double>> entries;
    for (const auto& br : grid.branches()) {
        if (!br.in_service) {
            continue;
        }
        const auto f = grid.bus_position(br.from);
        const auto t = grid.bus_position(br.to);
        const double b = 1.0 / (br.x * br.effective_tap());
        // Phase shifters act as an equivalent injection pair.
        const double shift_flow = -b * br.shift;
        injection[f] -= shift_flow;
        injection[t] += shift_flow;
        auto add = [&](std::size_t r, std::size_t c, double value) {
            if (var[r] != none && var[c] != none) {
                entries.emplace_back(static_cast<Eigen::Index>(var[r]), static_cast<Eigen::Index>(var[c]), value);
            }
        };
        add(f, f, b);
        add(t, t, b);
        add(f, t, -b);
        add(t, f, -b);
    }

    std::vector<double> theta(n, 0.0);
    if (nvar > 0) {
        Eigen::SparseMatrix<double> bmat(static_cast<Eigen::Index>(nvar), static_cast<Eigen::Index>(nvar));
        bmat.setFromTriplets(entries.begin(), entries.end());
        bmat.makeCompressed();
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(nvar));
        for (std::size_t i = 0; i < n; ++i) {
            if (var[i] != none) {
                rhs[static_cast<Eigen::Index>(var[i])] = injection[i];
            }
        }
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(bmat);
        lu.factorize(bmat);
        if (lu.info() != Eigen::Success) {
            throw SolverError("singular susceptance matrix in DC power flow");
        }
        const Eigen::VectorXd x = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !x.allFinite()) {
            throw SolverError("DC power flow solve failed");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (var[i] != none) {
                theta[i] = x[static_cast<Eigen::Index>(var[i])];
            }
        }
    }

    PowerFlowSolution sol;
    sol.method = Method::DC;
    sol.vm.assign(n, 1.0);
    sol.va = theta;
    const auto nl = grid.branch_count();
    sol.p_from.assign(nl, 0.0);
    sol.p_to.assign(nl, 0.0);
    sol.q_from.assign(nl, 0.0);
    sol.q_to.assign(nl, 0.0);
    std::vector<double> net(n, 0.0);
    for (const auto& br : grid.branches()) {
        if (!br.in_service) {
            continue;
        }
        const auto f = grid.bus_position(br.from);
        const auto t = grid.bus_position(br.to);
        const double b = 1.0 / (br.x * br.effective_tap());
        const double pf = b * (theta[f] - theta[t] - br.shift) * grid.base_mva();
        sol.p_from[br.index] = pf;
        sol.p_to[br.index] = -pf;
        net[f] += pf;
        net[t] -= pf;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (roles.type[i] == BusType::Slack) {
            continue;
        }
        const double scheduled = (roles.injection[i].real() - grid.buses()[i].gs / grid.base_mva()) * grid.base_mva();
        worst = std::max(worst, std::abs(net[i] - scheduled));
    }
    sol.converged = true;
    sol.iterations = 1;
    sol.max_mismatch = worst;
    return sol;
}

PowerFlowSolution solve_ac(const GridCase& grid, const SolverOptions& options) {
    const auto n = grid.bus_count();
    VoltageState start{std::vector<double>(n, 1.0), std::vector<double>(n, 0.0)};
    if (!options.flat_start) {
        for (std::size_t i = 0; i < n; ++i) {
            start.vm[i] = grid.buses()[i].vm;
            start.va[i] = grid.buses()[i].va;
        }
    }
    return solve_ac(grid, options, start);
}

PowerFlowSolution solve_ac(const GridCase& grid, const SolverOptions& options, const VoltageState& start) {
    options.check();
    check_slacks(grid);
    const auto n = grid.bus_count();
    if (start.vm.size() != n || start.va.size() != n) {
        throw std::invalid_argument("initial voltage state does not match bus count");
    }
    const auto roles = classify(grid);
    const auto ybus = build_ybus(grid);

    std::vector<double> vm = start.vm;
    std::vector<double> va = start.va;
    for (std::size_t i = 0; i < n; ++i) {
        if (roles.type[i] != BusType::PQ) {
            vm[i] = roles.setpoint[i];
        }
    }

    constexpr int none = -1;
    std::vector<int> angle_var(n, none);
    std::vector<int> mag_var(n, none);
    int nvar = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (roles.type[i] != BusType::Slack) {
            angle_var[i] = nvar++;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (roles.type[i] == BusType::PQ) {
            mag_var[i] = nvar++;
        }
    }

    std::vector<Complex> v(n);
    auto refresh = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::polar(vm[i], va[i]);
        }
    };
    refresh();

    auto norm_of = [&](const std::vector<Complex>& mis, Eigen::VectorXd& f) {
        f.resize(nvar);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (angle_var[i] != none) {
                f[angle_var[i]] = mis[i].real();
                worst = std::max(worst, std::abs(mis[i].real()));
            }
            if (mag_var[i] != none) {
                f[mag_var[i]] = mis[i].imag();
                worst = std::max(worst, std::abs(mis[i].imag()));
            }
        }
        return std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
    };

    PowerFlowSolution sol;
    sol.method = Method::AC;
    Eigen::VectorXd f;
    auto mis = mismatch(ybus, v, roles.injection);
    double norm = norm_of(mis, f);
    int iteration = 0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool pattern_ready = false;

    while (norm > options.tolerance && iteration < options.max_iterations && std::isfinite(norm)) {
        // dS/dVa and dS/dVm in polar form, restricted to the unknowns.
        std::vector<Complex> current(n, Complex{});
        for (Eigen::Index k = 0; k < ybus.outerSize(); ++k) {
            for (CSparse::InnerIterator it(ybus, k); it; ++it) {
                current[static_cast<std::size_t>(it.row())] += it.value() * v[static_cast<std::size_t>(it.col())];
            }
        }
        std::vector<Eigen::Triplet<double>> jac;
        jac.reserve(static_cast<std::size_t>(ybus.nonZeros()) * 4 + 4 * n);
        auto emit = [&](std::size_t row, std::size_t col, Complex d_angle, Complex d_mag) {
            if (angle_var[row] != none) {
                if (angle_var[col] != none) {
                    jac.emplace_back(angle_var[row], angle_var[col], d_angle.real());
                }
                if (mag_var[col] != none) {
                    jac.emplace_back(angle_var[row], mag_var[col], d_mag.real());
                }
            }
            if (mag_var[row] != none) {
                if (angle_var[col] != none) {
                    jac.emplace_back(mag_var[row], angle_var[col], d_angle.imag());
                }
                if (mag_var[col] != none) {
                    jac.emplace_back(mag_var[row], mag_var[col], d_mag.imag());
                }
            }
        };
        for (Eigen::Index k = 0; k < ybus.outerSize(); ++k) {
            for (CSparse::InnerIterator it(ybus, k); it; ++it) {
                const auto i = static_cast<std::size_t>(it.row());
                const auto j = static_cast<std::size_t>(it.col());
                const Complex yv = it.value() * v[j];
                const Complex d_angle = Complex(0.0, -1.0) * v[i] * std::conj(yv);
                const Complex d_mag = v[i] * std::conj(it.value() * (v[j] / vm[j]));
                emit(i, j, d_angle, d_mag);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Complex d_angle = Complex(0.0, 1.0) * v[i] * std::conj(current[i]);
            const Complex d_mag = std::conj(current[i]) * (v[i] / vm[i]);
            emit(i, i, d_angle, d_mag);
        }
        Eigen::SparseMatrix<double> jmat(nvar, nvar);
        jmat.setFromTriplets(jac.begin(), jac.end());
        jmat.makeCompressed();
        if (!pattern_ready) {
            lu.analyzePattern(jmat);
            pattern_ready = true;
        }
        lu.factorize(jmat);
        if (lu.info() != Eigen::Success) {
            sol.diagnostic = "singular Jacobian at iteration " + std::to_string(iteration + 1);
            break;
        }
        const Eigen::VectorXd dx = lu.solve(f);
        if (!dx.allFinite()) {
            sol.diagnostic = "non-finite Newton step at iteration " + std::to_string(iteration + 1);
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (angle_var[i] != none) {
                va[i] -= dx[angle_var[i]];
            }
            if (mag_var[i] != none) {
                vm[i] -= dx[mag_var[i]];
            }
        }
        ++iteration;
        refresh();
        mis = mismatch(ybus, v, roles.injection);
        norm = norm_of(mis, f);
    }

    sol.vm = vm;
    sol.va = va;
    sol.iterations = iteration;
    sol.max_mismatch = norm * grid.base_mva();
    sol.converged = std::isfinite(norm) && norm <= options.tolerance &&
                    std::all_of(vm.begin(), vm.end(), [](double m) { return std::isfinite(m) && m > 0.0; });
    if (!sol.converged && sol.diagnostic.empty()) {
        sol.diagnostic = std::isfinite(norm)
                             ? "no convergence after " + std::to_string(iteration) + " iterations (mismatch " +
                                   std::to_string(sol.max_mismatch) + " MW)"
                             : "Newton iteration diverged";
    }
    fill_ac_branch_flows(grid, v, sol);
    return sol;
}

PowerFlowSolution solve(const GridCase& grid, const SolverOptions& options) {
    return options.method == Method::DC ? solve_dc(grid) : solve_ac(grid, options);
}

std::vector<double> branch_flows(const PowerFlowSolution& solution, const GridCase& grid) {
    if (!solution.converged) {
        throw std::logic_error("branch_flows called on a non-converged power flow");
    }
    if (solution.p_from.size() != grid.branch_count()) {
        throw std::invalid_argument("solution does not match case branch count");
    }
    std::vector<double> flows(grid.branch_count(), 0.0);
    for (const auto& br : grid.branches()) {
        if (br.in_service) {
            flows[br.index] = solution.p_from[br.index];
        }
    }
    return flows;
}

std::vector<std::complex<double>> power_mismatch(const GridCase& grid, std::span<const double> vm,
                                                 std::span<const double> va) {
    const auto roles = classify(grid);
    std::vector<Complex> v(grid.bus_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::polar(vm[i], va[i]);
    }
    return mismatch(build_ybus(grid), v, roles.injection);
}

nlohmann::json to_json(const PowerFlowSolution& solution, const GridCase& grid) {
    nlohmann::json buses = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.bus_count(); ++i) {
        buses.push_back({{"id", grid.buses()[i].id}, {"Vm", solution.vm[i]}, {"Va_rad", solution.va[i]}});
    }
    const auto labels = branch_labels(grid);
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& br : grid.branches()) {
        branches.push_back({{"index", br.index},
                            {"label", labels[br.index]},
                            {"in_service", br.in_service},
                            {"Pfrom_MW", solution.p_from[br.index]},
                            {"Pto_MW", solution.p_to[br.index]},
                            {"Qfrom_MVAr", solution.q_from[br.index]},
                            {"Qto_MVAr", solution.q_to[br.index]}});
    }
    return {{"case", grid.name()},
            {"method", to_string(solution.method)},
            {"converged", solution.converged},
            {"iterations", solution.iterations},
            {"max_mismatch_MW", solution.max_mismatch},
            {"diagnostic", solution.diagnostic},
            {"buses", std::move(buses)},
            {"branches", std::move(branches)}};
}

} // namespace gridseg
