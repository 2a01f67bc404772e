#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "precip/errors.hpp"
#include "precip/grid.hpp"

namespace precip {

struct NominalConfig {
    double step_init = 1.0;
    double backtrack = 0.5;
    double armijo_c1 = 1e-4;
    double eps_stat = 1e-6;
    std::size_t max_iterations = 500;
};

inline void validate(const NominalConfig& cfg) {
    if (!(cfg.step_init > 0.0))
        throw ConfigError("step_init must be positive");
    if (!(cfg.backtrack > 0.0 && cfg.backtrack < 1.0))
        throw ConfigError("backtrack must lie in (0,1)");
    if (!(cfg.armijo_c1 > 0.0 && cfg.armijo_c1 < 1.0))
        throw ConfigError("armijo_c1 must lie in (0,1)");
}

// One line per objective evaluation along the descent; accepted rows carry
// the step that survived backtracking.
struct OptTraceRow {
    std::size_t iteration = 0;
    double value = 0.0;
    double stationarity = 0.0;
    double step = 0.0;
    bool accepted = false;
};

struct OptTrace {
    std::vector<OptTraceRow> rows;
    std::string status; // stationary | iter_cap | line_search_failed
    std::size_t iterations = 0;
    double final_value = 0.0;
};

// Projected gradient with Armijo backtracking over the admissible set.
// The objective is a callback v -> (value, gradient) so tests can inject
// analytic functions; the step resets to step_init every iteration and
// a trial v' = project(v - alpha*g) is accepted when
//   f(v') <= f(v) - armijo_c1 * <g, v - v'>.
// Stops at the projected-gradient stationarity test
//   ||v - project(v - g)|| <= eps_stat.
template <class Objective>
std::pair<ControlVector, OptTrace>
optimize_nominal(Objective&& objective, const AdmissibleSet& set,
                 const NominalConfig& cfg, const ControlVector& start) {
    validate(cfg);
    OptTrace trace;
    ControlVector v = project_to_admissible(start, set);
    double value;
    std::vector<double> grad;
    try {
        std::tie(value, grad) = objective(v);
    } catch (const EmptyPopulation& e) {
        throw BadInitialControl(std::string("initial control infeasible "
                                            "for the objective: ") +
                                e.what());
    }

    auto stationarity = [&]() {
        ControlVector step_point(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            step_point[i] = v[i] - grad[i];
        const ControlVector proj = project_to_admissible(step_point, set);
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (v[i] - proj[i]) * (v[i] - proj[i]);
        return std::sqrt(s);
    };

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        const double stat = stationarity();
        if (stat <= cfg.eps_stat) {
            trace.status = "stationary";
            trace.iterations = it;
            trace.final_value = value;
            return {v, std::move(trace)};
        }
        double alpha = cfg.step_init;
        bool moved = false;
        while (alpha >= 1e-18) {
            ControlVector trial(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                trial[i] = v[i] - alpha * grad[i];
            trial = project_to_admissible(trial, set);
            const auto [trial_value, trial_grad] = objective(trial);
            double descent = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i)
                descent += grad[i] * (v[i] - trial[i]);
            const bool ok =
                trial_value <= value - cfg.armijo_c1 * descent;
            trace.rows.push_back({it, trial_value, stat, alpha, ok});
            if (ok) {
                v = trial;
                value = trial_value;
                grad = trial_grad;
                moved = true;
                break;
            }
            alpha *= cfg.backtrack;
        }
        if (!moved) {
            trace.status = "line_search_failed";
            trace.iterations = it;
            trace.final_value = value;
            return {v, std::move(trace)};
        }
    }
    trace.status = "iter_cap";
    trace.iterations = cfg.max_iterations;
    trace.final_value = value;
    return {v, std::move(trace)};
}

// Uniform feasible start: v_i = budget / sum(deltas) projected onto the set
// (projection is the identity for interior budgets).
inline ControlVector uniform_start(const AdmissibleSet& set) {
    const double sd = set.grid.delta_sum();
    const double level = set.has_budget ? set.budget / sd
                                        : 0.5 * (set.lower + set.upper);
    ControlVector v(set.grid.steps(), level);
    return project_to_admissible(v, set);
}

} // namespace precip
