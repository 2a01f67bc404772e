#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "precip/errors.hpp"
#include "precip/grid.hpp"
#include "precip/kinetics.hpp"

namespace precip {

// Forward state on a grid with N_t steps.  States live at the left endpoints
// points[0..N_t-1]; index k is the state at time points[k].
//   c[k]        liquid-phase concentration, c[0] = 0
//   c_tot[k]    total dosed-and-reduced mass, c_tot[0] = 0
//   s[i]        growth prefix sum over the first i steps,
//               s[i] = sum_{m<i} G0(c[m]) * deltas[m]  (size N_t + 1)
//   nucleus_mass[k] = N(c[k]) * deltas[k]
//   g0[k]       growth rate G0(c[k]) at the state
struct StateTrajectory {
    TimeGrid grid;
    KineticsParams params;
    std::vector<double> c;
    std::vector<double> c_tot;
    std::vector<double> s;
    std::vector<double> nucleus_mass;
    std::vector<double> g0;

    std::size_t size() const { return c.size(); }
    std::size_t final_index() const { return c.size() - 1; }
};

// Exact total mass for piecewise-constant dosing with first-order precursor
// reduction: c_tot[k] = integral of (1 - e^{-k_r (t_k - tau)}) v(tau).
// Evaluated by the O(N_t) recurrence that tracks the pending (unreduced)
// precursor p[k] = integral of e^{-k_r (t_k - tau)} v(tau); both agree with
// the closed-form interval sums to rounding.
inline std::vector<double> total_concentration(const ControlVector& v,
                                               const TimeGrid& grid,
                                               double k_r) {
    if (v.size() != grid.steps())
        throw DimensionMismatch("control length " + std::to_string(v.size()) +
                                " vs grid steps " +
                                std::to_string(grid.steps()));
    const std::size_t n = v.size();
    std::vector<double> ct(n, 0.0);
    double pending = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dk = grid.deltas[k];
        const double decay = std::exp(-k_r * dk);
        const double gain = -std::expm1(-k_r * dk); // 1 - e^{-k_r dk}
        ct[k + 1] = ct[k] + pending * gain + v[k] * (dk - gain / k_r);
        pending = pending * decay + v[k] * gain / k_r;
    }
    return ct;
}

namespace detail {

// base of the characteristic power; positive whenever growth is nonnegative
// and beta < 1.
inline double char_base(double xn_pow, double one_minus_beta, double ds) {
    return xn_pow + one_minus_beta * ds;
}

} // namespace detail

// Size at time points[k+1] of a particle nucleated at points[l]:
//   (x_n^{1-beta} + (1-beta)(s[k+1] - s[l]))^{1/(1-beta)}
// For beta = -1 this is sqrt(x_n^2 + 2 (s[k+1] - s[l])).
inline double characteristic_size(std::size_t l, std::size_t k,
                                  const StateTrajectory& traj) {
    const double ob = 1.0 - traj.params.beta;
    const double xb = std::pow(traj.params.x_n, ob);
    const double base = detail::char_base(xb, ob, traj.s[k + 1] - traj.s[l]);
    if (!(base > 0.0))
        throw DegenerateCharacteristic(
            "characteristic base " + std::to_string(base) +
            " at (l=" + std::to_string(l) + ", k=" + std::to_string(k) + ")");
    return std::pow(base, 1.0 / ob);
}

// Concentration recurrence: mass enters with c_tot increments and leaves
// through nucleation and the growth of every particle cohort.  O(N_t^2)
// with one O(N_t) row of cohort volumes carried across steps.
inline StateTrajectory solve_state(const ControlVector& v,
                                   const TimeGrid& grid,
                                   const KineticsModel& model,
                                   const KineticsParams& params) {
    if (v.size() != grid.steps())
        throw DimensionMismatch("control length " + std::to_string(v.size()) +
                                " vs grid steps " +
                                std::to_string(grid.steps()));
    const std::size_t n = v.size();
    StateTrajectory traj;
    traj.grid = grid;
    traj.params = params;
    traj.c.assign(n, 0.0);
    traj.c_tot = total_concentration(v, grid, params.k_r);
    traj.s.assign(n + 1, 0.0);
    traj.nucleus_mass.assign(n, 0.0);
    traj.g0.assign(n, 0.0);

    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const double ob = 1.0 - params.beta;
    const double xb = std::pow(params.x_n, ob);
    const double p3 = 3.0 / ob;

    std::vector<double> cohort3(n, 0.0); // cohort3[l] = cube of cohort l size
    for (std::size_t k = 0; k < n; ++k) {
        const RateValue nuc = model.nucleation_rate(traj.c[k]);
        const RateValue gro = model.growth_rate_g0(traj.c[k]);
        traj.nucleus_mass[k] = nuc.value * grid.deltas[k];
        traj.g0[k] = gro.value;
        traj.s[k + 1] = traj.s[k] + gro.value * grid.deltas[k];
        if (k + 1 == n)
            break;
        double sink = 0.0;
        for (std::size_t l = 0; l <= k; ++l) {
            const double base =
                detail::char_base(xb, ob, traj.s[k + 1] - traj.s[l]);
            if (!(base > 0.0))
                throw DegenerateCharacteristic(
                    "characteristic base " + std::to_string(base) +
                    " at step " + std::to_string(k));
            const double cur = std::pow(base, p3);
            sink += traj.nucleus_mass[l] * (cur - cohort3[l]);
            cohort3[l] = cur;
        }
        traj.c[k + 1] = traj.c[k] + g1 * (traj.c_tot[k + 1] - traj.c_tot[k]) -
                        g2 * sink;
        if (!std::isfinite(traj.c[k + 1]))
            throw NumericalBlowup("non-finite concentration at index " +
                                  std::to_string(k + 1));
    }
    return traj;
}

// p-th moment of the particle population at state index k (time points[k]):
// cohorts nucleated before t_k weighted by their current size^p.  The index
// convention makes gamma1*c_tot[k] - gamma2*m3(k) - c[k] telescope to zero.
inline double moments(const StateTrajectory& traj, int p, std::size_t k) {
    const double ob = 1.0 - traj.params.beta;
    const double xb = std::pow(traj.params.x_n, ob);
    const double pw = static_cast<double>(p) / ob;
    double m = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
        const double base = detail::char_base(xb, ob, traj.s[k] - traj.s[l]);
        if (!(base > 0.0))
            throw DegenerateCharacteristic("characteristic base " +
                                           std::to_string(base) +
                                           " in moment at state " +
                                           std::to_string(k));
        m += traj.nucleus_mass[l] * std::pow(base, pw);
    }
    return m;
}

struct MomentSet {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
};

inline MomentSet moment_set(const StateTrajectory& traj, std::size_t k) {
    return {moments(traj, 0, k), moments(traj, 1, k), moments(traj, 2, k),
            moments(traj, 3, k)};
}

// Number density sample along one characteristic: cohort l observed at
// state k has size x and density q = x^{-beta} N(c_l) / G0(c_l).
struct PsdSample {
    double x = 0.0;
    double q = 0.0;
    std::size_t nucleation_index = 0;
};

struct PsdResult {
    std::vector<PsdSample> samples;
    std::size_t dropped = 0; // cohorts with growth below g_min at birth
};

inline PsdResult reconstruct_psd(const StateTrajectory& traj, std::size_t k,
                                 double g_min = 1e-12) {
    PsdResult out;
    out.samples.reserve(k);
    for (std::size_t l = 0; l < k; ++l) {
        const double g = traj.g0[l];
        if (g <= g_min) {
            ++out.dropped;
            continue;
        }
        const double nucleation_rate =
            traj.nucleus_mass[l] / traj.grid.deltas[l];
        const double x = characteristic_size(l, k - 1, traj);
        const double q =
            std::pow(x, -traj.params.beta) * nucleation_rate / g;
        out.samples.push_back({x, q, l});
    }
    return out;
}

// Scalar quality objective at the final state:
//   weight_mean * (m1/m0 - target)^2 + weight_var * (m2/m0 - (m1/m0)^2)
inline double objective(const StateTrajectory& traj, const ObjectiveSpec& spec,
                        double m0_min = 1e-12) {
    const std::size_t k = traj.final_index();
    const double m0 = moments(traj, 0, k);
    if (m0 <= m0_min)
        throw EmptyPopulation("zeroth moment " + std::to_string(m0) +
                              " at final state");
    const double mean = moments(traj, 1, k) / m0;
    const double var = moments(traj, 2, k) / m0 - mean * mean;
    const double dm = mean - spec.target_mean;
    return spec.weight_mean * dm * dm + spec.weight_var * var;
}

} // namespace precip
