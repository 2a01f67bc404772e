#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "precip/errors.hpp"

namespace precip {

using ControlVector = std::vector<double>;

// Time discretization t_0 < t_1 < ... < t_{N_t} with t_0 = 0.  Controls and
// states are indexed 0..N_t-1 against the left endpoints; deltas[k] is the
// width of interval k.
struct TimeGrid {
    std::vector<double> points;
    std::vector<double> deltas;

    std::size_t steps() const { return deltas.size(); }
    double horizon() const { return points.back(); }
    double delta_sum() const {
        return std::accumulate(deltas.begin(), deltas.end(), 0.0);
    }
};

inline TimeGrid make_uniform_grid(double horizon, std::size_t n_steps) {
    if (!(horizon > 0.0))
        throw InvalidGrid("grid horizon must be positive, got " +
                          std::to_string(horizon));
    if (n_steps < 2)
        throw InvalidGrid("grid needs at least 2 steps, got " +
                          std::to_string(n_steps));
    TimeGrid g;
    g.points.resize(n_steps + 1);
    g.deltas.assign(n_steps, horizon / static_cast<double>(n_steps));
    for (std::size_t k = 0; k <= n_steps; ++k)
        g.points[k] = horizon * static_cast<double>(k) /
                      static_cast<double>(n_steps);
    g.points[0] = 0.0;
    g.points[n_steps] = horizon;
    return g;
}

// Box [lower, upper]^{N_t} intersected with the dosing budget
// sum_k deltas[k] * v[k] = budget (equality; disabled when has_budget is
// false so optimizer unit tests can run on plain boxes).  Carries its grid
// so projection and feasibility need no extra argument.
struct AdmissibleSet {
    double lower = 0.0;
    double upper = 0.0;
    double budget = 0.0;
    bool has_budget = true;
    TimeGrid grid;
};

inline void validate(const AdmissibleSet& set) {
    // Signed boxes are fine at this level; dosing-rate nonnegativity is a
    // run-configuration rule, enforced when the set is resolved from one.
    if (!(set.lower < set.upper))
        throw InfeasibleSet("need lower < upper, got [" +
                            std::to_string(set.lower) + ", " +
                            std::to_string(set.upper) + "]");
    if (set.has_budget) {
        const double sd = set.grid.delta_sum();
        if (set.budget < set.lower * sd - 1e-12 ||
            set.budget > set.upper * sd + 1e-12)
            throw InfeasibleSet(
                "budget " + std::to_string(set.budget) +
                " outside feasible range [" + std::to_string(set.lower * sd) +
                ", " + std::to_string(set.upper * sd) + "]");
    }
}

namespace detail {

// Budget residual of the clipped multiplier step; strictly decreasing in mu
// wherever some coordinate is unclipped.
inline double budget_residual(const ControlVector& w,
                              const std::vector<double>& deltas,
                              const AdmissibleSet& set, double mu) {
    double r = -set.budget;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double vi =
            std::clamp(w[i] - mu * deltas[i], set.lower, set.upper);
        r += deltas[i] * vi;
    }
    return r;
}

} // namespace detail

// Euclidean projection onto the admissible set.  KKT reduces to
// v_i = clip(w_i - mu*delta_i, l, u) with mu solving the budget equation;
// the residual is monotone in mu, so bisection on a geometrically grown
// bracket is exact up to tolerance.
inline ControlVector project_to_admissible(const ControlVector& w,
                                           const AdmissibleSet& set) {
    if (w.size() != set.grid.steps())
        throw DimensionMismatch("control length " + std::to_string(w.size()) +
                                " vs grid steps " +
                                std::to_string(set.grid.steps()));
    validate(set);
    ControlVector v(w.size());
    if (!set.has_budget) {
        for (std::size_t i = 0; i < w.size(); ++i)
            v[i] = std::clamp(w[i], set.lower, set.upper);
        return v;
    }
    const auto& d = set.grid.deltas;
    double mu = 0.0;
    double r0 = detail::budget_residual(w, d, set, 0.0);
    double lo = 0.0, hi = 0.0;
    // Degenerate budgets (V_tot at a box corner) never change sign; the
    // capped bracket still drives every coordinate onto its bound.
    if (r0 > 0.0) {
        hi = 1.0;
        while (detail::budget_residual(w, d, set, hi) > 0.0 && hi < 1e30) {
            lo = hi;
            hi *= 2.0;
        }
    } else if (r0 < 0.0) {
        lo = -1.0;
        while (detail::budget_residual(w, d, set, lo) < 0.0 && lo > -1e30) {
            hi = lo;
            lo *= 2.0;
        }
    }
    for (int it = 0; it < 200; ++it) {
        mu = 0.5 * (lo + hi);
        const double r = detail::budget_residual(w, d, set, mu);
        if (r > 0.0)
            lo = mu;
        else
            hi = mu;
        if (hi - lo < 1e-16 * (1.0 + std::abs(mu)))
            break;
    }
    mu = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < w.size(); ++i)
        v[i] = std::clamp(w[i] - mu * d[i], set.lower, set.upper);
    return v;
}

inline bool is_admissible(const ControlVector& v, const AdmissibleSet& set,
                          double tol = 1e-9) {
    if (v.size() != set.grid.steps())
        throw DimensionMismatch("control length " + std::to_string(v.size()) +
                                " vs grid steps " +
                                std::to_string(set.grid.steps()));
    for (double vi : v)
        if (vi < set.lower - tol || vi > set.upper + tol)
            return false;
    if (set.has_budget) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += set.grid.deltas[i] * v[i];
        if (std::abs(s - set.budget) > tol)
            return false;
    }
    return true;
}

// Mean-size target and moment weights of the scalar objective
// J = w_mean*(m1/m0 - target)^2 + w_var*(m2/m0 - (m1/m0)^2).
struct ObjectiveSpec {
    double weight_mean = 1.0;
    double weight_var = 1.0;
    double target_mean = 4.0;
};

} // namespace precip
