#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "precip/errors.hpp"
#include "precip/grid.hpp"
#include "precip/kinetics.hpp"
#include "precip/sensitivity.hpp"
#include "precip/solver.hpp"

namespace precip {

// Multiplicative two-level step perturbations of the control: levels in
// {u_l, 1, u_u} with at most one jump.  n is the number of control steps.
struct UncertaintySet {
    double u_l = 0.9;
    double u_u = 1.1;
    std::size_t n = 0;
};

inline void validate(const UncertaintySet& set) {
    const bool proper = set.u_l > 0.0 && set.u_l < 1.0 && set.u_u > 1.0 &&
                        std::isfinite(set.u_u);
    const bool degenerate = set.u_l == 1.0 && set.u_u == 1.0;
    if (!proper && !degenerate)
        throw ConfigError("uncertainty levels need 0 < u_l < 1 < u_u "
                          "(or the degenerate 1,1), got u_l=" +
                          std::to_string(set.u_l) + " u_u=" +
                          std::to_string(set.u_u));
    if (set.n == 0)
        throw ConfigError("uncertainty set needs n >= 1 steps");
}

// One realization: entries [0, jump) take level1, entries [jump, n) take
// level2.  jump ranges over 1..n; constant scenarios use jump = n.
struct UncertaintyScenario {
    double level1 = 1.0;
    double level2 = 1.0;
    std::size_t jump = 0;
    std::size_t n = 0;
};

inline std::vector<double> expand(const UncertaintyScenario& sc) {
    std::vector<double> u(sc.n, sc.level2);
    for (std::size_t i = 0; i < sc.jump && i < sc.n; ++i)
        u[i] = sc.level1;
    return u;
}

// Canonical deduplicated enumeration: the constant scenarios in ascending
// level order, then all ordered pairs of distinct levels, lexicographic in
// (level1, level2, jump).  Proper sets give 3 + 6(n-1) scenarios.
inline std::vector<UncertaintyScenario>
enumerate_scenarios(const UncertaintySet& set) {
    validate(set);
    std::vector<double> levels{set.u_l, 1.0, set.u_u};
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<UncertaintyScenario> out;
    for (double lv : levels)
        out.push_back({lv, lv, set.n, set.n});
    for (double a : levels)
        for (double b : levels) {
            if (a == b)
                continue;
            for (std::size_t j = 1; j < set.n; ++j)
                out.push_back({a, b, j, set.n});
        }
    return out;
}

inline ControlVector apply_scenario(const UncertaintyScenario& sc,
                           const ControlVector& v) {
    if (v.size() != sc.n)
        throw DimensionMismatch("scenario over " + std::to_string(sc.n) +
                                " steps applied to control of length " +
                                std::to_string(v.size()));
    ControlVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = (i < sc.jump ? sc.level1 : sc.level2) * v[i];
    return out;
}

// Worker count: environment override PRECIP_THREADS, else all cores.
inline unsigned thread_count() {
    if (const char* env = std::getenv("PRECIP_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1)
            return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

struct WorstCaseResult {
    UncertaintyScenario scenario; // first maximizer in canonical order
    std::size_t scenario_id = 0;
    double value = 0.0;
    std::vector<double> subgradient;      // u* o grad J(u* o v)
    std::vector<double> table;            // per-scenario objective values
    std::vector<std::size_t> empty_scenarios; // scored -inf
};

// Exact adversarial oracle by full enumeration.  Scenario evaluations may
// run on several threads; the argmax is a sequential scan over the table,
// so the result does not depend on the parallel schedule.
inline WorstCaseResult worst_case(const ControlVector& v,
                                  const UncertaintySet& set,
                                  const TimeGrid& grid,
                                  const KineticsModel& model,
                                  const KineticsParams& params,
                                  const ObjectiveSpec& spec,
                                  double m0_min = 1e-12) {
    const auto scenarios = enumerate_scenarios(set);
    const std::size_t m = scenarios.size();
    std::vector<double> table(m, 0.0);
    std::vector<std::exception_ptr> errors(m);

    auto eval_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                const StateTrajectory traj =
                    solve_state(apply_scenario(scenarios[i], v), grid, model, params);
                table[i] = objective(traj, spec, m0_min);
            } catch (const EmptyPopulation&) {
                table[i] = -std::numeric_limits<double>::infinity();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const unsigned workers = std::min<unsigned>(
        thread_count(), static_cast<unsigned>(m ? m : 1));
    if (workers <= 1) {
        eval_range(0, m);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (m + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(m, lo + chunk);
            if (lo < hi)
                pool.emplace_back(eval_range, lo, hi);
        }
        for (auto& t : pool)
            t.join();
    }
    for (std::size_t i = 0; i < m; ++i)
        if (errors[i])
            std::rethrow_exception(errors[i]);

    WorstCaseResult out;
    out.table = std::move(table);
    std::size_t best = m;
    for (std::size_t i = 0; i < m; ++i) {
        if (std::isinf(out.table[i]) && out.table[i] < 0.0) {
            out.empty_scenarios.push_back(i);
            continue;
        }
        if (best == m || out.table[i] > out.table[best])
            best = i;
    }
    if (best == m)
        throw EmptyPopulation("every scenario produced an empty population");
    out.scenario = scenarios[best];
    out.scenario_id = best;
    out.value = out.table[best];

    const ControlVector perturbed = apply_scenario(out.scenario, v);
    GradientResult grad =
        gradient_objective(perturbed, grid, model, params, spec, m0_min);
    out.subgradient.resize(v.size());
    const std::vector<double> u = expand(out.scenario);
    for (std::size_t i = 0; i < v.size(); ++i)
        out.subgradient[i] = u[i] * grad.gradient[i];
    return out;
}

} // namespace precip
