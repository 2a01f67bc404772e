#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "precip/errors.hpp"
#include "precip/grid.hpp"
#include "precip/kinetics.hpp"
#include "precip/solver.hpp"

namespace precip {

// Residual of the discrete state system at an arbitrary (v, c) pair:
//   F[0]   = c[0]
//   F[k+1] = c[k+1] - (c[k] + gamma1*(c_tot[k+1]-c_tot[k]) - gamma2*sink_k)
// where the sink is rebuilt from the given c, not from a solved trajectory.
// dF[k+1]/dc[k+1] = 1, and F[k+1] involves only c[0..k+1], so the Jacobian
// in c is unit lower-triangular.
inline std::vector<double> state_residual(const ControlVector& v,
                                          const std::vector<double>& c,
                                          const TimeGrid& grid,
                                          const KineticsModel& model,
                                          const KineticsParams& params) {
    if (v.size() != grid.steps() || c.size() != grid.steps())
        throw DimensionMismatch("state_residual: length mismatch");
    const std::size_t n = v.size();
    const std::vector<double> ct = total_concentration(v, grid, params.k_r);
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const double ob = 1.0 - params.beta;
    const double xb = std::pow(params.x_n, ob);
    const double p3 = 3.0 / ob;

    std::vector<double> s(n + 1, 0.0), nd(n, 0.0), F(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        s[k + 1] = s[k] + model.growth_rate_g0(c[k]).value * grid.deltas[k];
        nd[k] = model.nucleation_rate(c[k]).value * grid.deltas[k];
    }
    F[0] = c[0];
    std::vector<double> cohort3(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double sink = 0.0;
        for (std::size_t l = 0; l <= k; ++l) {
            const double base = xb + ob * (s[k + 1] - s[l]);
            const double cur = std::pow(base, p3);
            sink += nd[l] * (cur - cohort3[l]);
            cohort3[l] = cur;
        }
        F[k + 1] = c[k + 1] - (c[k] + g1 * (ct[k + 1] - ct[k]) - g2 * sink);
    }
    return F;
}

struct GradientResult {
    std::vector<double> gradient; // dJ/dv, length N_t
    std::vector<double> adjoint;  // lambda, length N_t
    double value = 0.0;           // J(v)
};

// Objective gradient by the adjoint method.  The objective has no explicit
// v-dependence, so dJ/dv = -lambda^T dF/dv with the unit-triangular adjoint
// system solved by one reverse sweep over the recurrence; the dosing part
// dF/dv is applied through the reverse of the total-concentration
// recurrence.  Cost is a small multiple of one forward solve.
inline GradientResult gradient_objective(const ControlVector& v,
                                         const TimeGrid& grid,
                                         const KineticsModel& model,
                                         const KineticsParams& params,
                                         const ObjectiveSpec& spec,
                                         double m0_min = 1e-12) {
    const StateTrajectory traj = solve_state(v, grid, model, params);
    const std::size_t n = traj.size();
    const std::size_t M = n - 1;
    const double ob = 1.0 - params.beta;
    const double xb = std::pow(params.x_n, ob);
    const double beta = params.beta;
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const auto& s = traj.s;
    const auto& nd = traj.nucleus_mass;
    const auto& d = grid.deltas;

    const double m0 = moments(traj, 0, M);
    if (m0 <= m0_min)
        throw EmptyPopulation("zeroth moment " + std::to_string(m0) +
                              " at final state");
    const double m1 = moments(traj, 1, M);
    const double m2 = moments(traj, 2, M);
    const double mu = m1 / m0;
    const double dm = mu - spec.target_mean;

    GradientResult out;
    out.value = spec.weight_mean * dm * dm +
                spec.weight_var * (m2 / m0 - mu * mu);

    // Seeds dJ/dm_p.
    const double a = 2.0 * spec.weight_mean * dm - 2.0 * spec.weight_var * mu;
    const double Jm1 = a / m0;
    const double Jm0 = -a * m1 / (m0 * m0) - spec.weight_var * m2 / (m0 * m0);
    const double Jm2 = spec.weight_var / m0;

    std::vector<double> cbar(n, 0.0), Sbar(n + 1, 0.0), ndbar(n, 0.0),
        ctbar(n, 0.0);

    // Moment seeding: m_p(M) = sum_{l<M} nd[l] * base_l^{p/ob},
    // base_l = xb + ob*(s[M] - s[l]).
    for (std::size_t l = 0; l < M; ++l) {
        const double base = xb + ob * (s[M] - s[l]);
        const double r1 = std::pow(base, 1.0 / ob);
        ndbar[l] += Jm0 + Jm1 * r1 + Jm2 * r1 * r1;
        // d base^{p/ob} / d s = p * base^{(p-ob)/ob} applied to +s[M], -s[l]
        const double dsig =
            nd[l] * (Jm1 * r1 / base + Jm2 * 2.0 * r1 * r1 / base);
        Sbar[M] += dsig;
        Sbar[l] -= dsig;
    }

    const double p3 = 3.0 / ob;
    for (std::size_t k1 = M; k1-- > 0;) {
        const std::size_t K = k1; // reverse step K: c[K+1] from c[K]
        const double acc = cbar[K + 1];
        cbar[K] += acc;
        ctbar[K + 1] += g1 * acc;
        ctbar[K] -= g1 * acc;
        const double w = -g2 * acc;
        for (std::size_t l = 0; l <= K; ++l) {
            const double b1 = xb + ob * (s[K + 1] - s[l]);
            const double c1 = std::pow(b1, p3);
            const double t1 = w * nd[l] * 3.0 * c1 / b1;
            Sbar[K + 1] += t1;
            Sbar[l] -= t1;
            double c0 = 0.0;
            if (l < K) {
                const double b0 = xb + ob * (s[K] - s[l]);
                c0 = std::pow(b0, p3);
                const double t0 = w * nd[l] * 3.0 * c0 / b0;
                Sbar[K] -= t0;
                Sbar[l] += t0;
            }
            ndbar[l] += w * (c1 - c0);
        }
        // reverse s[K+1] = s[K] + G0(c[K]) d[K] and nd[K] = N(c[K]) d[K]
        Sbar[K] += Sbar[K + 1];
        cbar[K] += Sbar[K + 1] * model.growth_rate_g0(traj.c[K]).slope * d[K];
        cbar[K] += ndbar[K] * model.nucleation_rate(traj.c[K]).slope * d[K];
    }

    // Reverse of total_concentration: ct[k+1] = ct[k] + pending*gain
    // + v[k]*(d[k] - gain/k_r); pending' = pending*decay + v[k]*gain/k_r.
    out.gradient.assign(n, 0.0);
    double pendbar = 0.0;
    for (std::size_t j1 = M; j1-- > 0;) {
        const std::size_t j = j1;
        const double decay = std::exp(-params.k_r * d[j]);
        const double gain = -std::expm1(-params.k_r * d[j]);
        out.gradient[j] +=
            ctbar[j + 1] * (d[j] - gain / params.k_r) + pendbar * gain / params.k_r;
        pendbar = ctbar[j + 1] * gain + pendbar * decay;
        ctbar[j] += ctbar[j + 1];
    }
    out.adjoint = std::move(cbar);
    return out;
}

// Fourth-order central differences with per-coordinate step
// h*max(1, |v_i|).  The high order keeps truncation error below the
// smoothing-induced curvature of the growth law; verification oracle for
// gradient_objective.
inline std::vector<double> fd_gradient(const ControlVector& v,
                                       const TimeGrid& grid,
                                       const KineticsModel& model,
                                       const KineticsParams& params,
                                       const ObjectiveSpec& spec,
                                       double h = 3e-6) {
    std::vector<double> g(v.size(), 0.0);
    ControlVector work = v;
    auto eval = [&](std::size_t i, double x) {
        work[i] = x;
        const double f =
            objective(solve_state(work, grid, model, params), spec);
        work[i] = v[i];
        return f;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double hi = h * std::max(1.0, std::abs(v[i]));
        const double f1 = eval(i, v[i] + 2.0 * hi);
        const double f2 = eval(i, v[i] + hi);
        const double f3 = eval(i, v[i] - hi);
        const double f4 = eval(i, v[i] - 2.0 * hi);
        g[i] = (-f1 + 8.0 * f2 - 8.0 * f3 + f4) / (12.0 * hi);
    }
    return g;
}

} // namespace precip
