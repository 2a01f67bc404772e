#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "precip/bundle.hpp"
#include "precip/config.hpp"
#include "precip/solver.hpp"
#include "precip/uncertainty.hpp"

namespace precip {

// 17 significant digits: lossless text round-trip for doubles
inline std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open output file '" + path + "'");
    return out;
}

} // namespace detail

// ---- control vectors -------------------------------------------------

inline void write_control_csv(const std::string& path, const ControlVector& v,
                              const TimeGrid& grid) {
    auto out = detail::open_out(path);
    out << "t,v\n";
    for (std::size_t k = 0; k < v.size(); ++k)
        out << format_number(grid.points[k]) << ','
            << format_number(v[k]) << '\n';
}

inline ControlVector read_control_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open control file '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(path + ": empty control file");
    // header is free-form except the value column must come last
    ControlVector v;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty())
            continue;
        const auto comma = line.find_last_of(',');
        if (comma == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 't,v' row");
        const std::string cell = detail::trim(line.substr(comma + 1));
        char* end = nullptr;
        const double x = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size())
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": malformed value '" + cell + "'");
        v.push_back(x);
    }
    if (v.empty())
        throw ConfigError(path + ": no control rows");
    return v;
}

// ---- trajectory exports ----------------------------------------------

// One row per grid point k < N_t: the control applies on [t_k, t_{k+1}).
// traj must be the trajectory driven by v_perturbed.
inline void write_timeseries_csv(const std::string& path,
                                 const ControlVector& v,
                                 const ControlVector& v_perturbed,
                                 const StateTrajectory& traj,
                                 const KineticsModel& model) {
    auto out = detail::open_out(path);
    out << "t,v,v_perturbed,c,c_tot,nucleation_rate,growth_rate\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const RateValue nuc = model.nucleation_rate(traj.c[k]);
        const RateValue gro = model.growth_rate_g0(traj.c[k]);
        out << format_number(traj.grid.points[k]) << ','
            << format_number(v[k]) << ','
            << format_number(v_perturbed[k]) << ','
            << format_number(traj.c[k]) << ','
            << format_number(traj.c_tot[k]) << ','
            << format_number(nuc.value) << ','
            << format_number(gro.value) << '\n';
    }
}

inline void write_psd_csv(const std::string& path, const PsdResult& psd,
                          const TimeGrid& grid) {
    auto out = detail::open_out(path);
    out << "x_nm,q,nucleation_time\n";
    for (const PsdSample& s : psd.samples)
        out << format_number(s.x) << ',' << format_number(s.q) << ','
            << format_number(grid.points[s.nucleation_index]) << '\n';
}

inline void write_nominal_trace_csv(const std::string& path,
                                    const OptTrace& trace) {
    auto out = detail::open_out(path);
    out << "iteration,value,stationarity,step,accepted\n";
    for (const OptTraceRow& r : trace.rows)
        out << r.iteration << ',' << format_number(r.value) << ','
            << format_number(r.stationarity) << ',' << format_number(r.step)
            << ',' << (r.accepted ? 1 : 0) << '\n';
}

inline void write_bundle_trace_csv(const std::string& path,
                                   const std::vector<BundleTraceRow>& rows) {
    auto out = detail::open_out(path);
    out << "outer,inner,h_center,h_trial,rho,tau,planes,serious,"
           "worst_scenario\n";
    for (const BundleTraceRow& r : rows)
        out << r.outer << ',' << r.inner << ',' << format_number(r.h_center)
            << ',' << format_number(r.h_trial) << ',' << format_number(r.rho)
            << ',' << format_number(r.tau) << ',' << r.planes << ','
            << (r.serious ? 1 : 0) << ',' << r.scenario_id << '\n';
}

// ---- per-scenario evaluation -----------------------------------------

struct ScenarioRow {
    UncertaintyScenario scenario;
    std::size_t id = 0;
    std::optional<double> value; // unset when the scenario failed
    std::string error;
    MomentSet moments;
    double mean = 0.0;
    double variance = 0.0;
};

// Evaluates the objective under every enumerated scenario.  Failures are
// recorded per row, never thrown: a control that starves one scenario is
// still reportable under the others.
inline std::vector<ScenarioRow> evaluate_scenarios(
    const ControlVector& v, const UncertaintySet& uset, const TimeGrid& grid,
    const KineticsModel& model, const KineticsParams& params,
    const ObjectiveSpec& spec, double m0_min = 1e-12) {
    const auto scenarios = enumerate_scenarios(uset);
    std::vector<ScenarioRow> rows(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        ScenarioRow& row = rows[i];
        row.scenario = scenarios[i];
        row.id = i;
        try {
            const StateTrajectory traj =
                solve_state(apply_scenario(scenarios[i], v), grid, model, params);
            row.moments = moment_set(traj, traj.final_index());
            if (row.moments.m0 <= m0_min)
                throw EmptyPopulation("no particles at the final time");
            row.mean = row.moments.m1 / row.moments.m0;
            row.variance =
                row.moments.m2 / row.moments.m0 - row.mean * row.mean;
            row.value = spec.weight_mean *
                            (row.mean - spec.target_mean) *
                            (row.mean - spec.target_mean) +
                        spec.weight_var * row.variance;
        } catch (const Error& e) {
            row.error = e.what();
        }
    }
    return rows;
}

inline void write_sweep_csv(
    const std::string& path,
    const std::vector<std::array<double, 5>>& rows) {
    auto out = detail::open_out(path);
    out << "size_pct,nominal_nominal,nominal_worst,robust_nominal,"
           "robust_worst\n";
    for (const auto& r : rows) {
        out << format_number(r[0]);
        for (int i = 1; i < 5; ++i)
            out << ',' << format_number(r[i]);
        out << '\n';
    }
}

} // namespace precip
