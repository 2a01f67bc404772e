#pragma once

// Reference integrator for the forward model, used only by the acceptance
// suite.  Instead of the production recurrences it advances every nucleation
// cohort by its own characteristic ODE dx/dt = G0(c) x^beta with Heun steps
// on a refined grid, tracks the precursor/dissolved phases as ODEs, and
// closes the system with the algebraic mass balance.  Nothing here shares
// discretization choices with the production solver beyond the rate laws.

#include <cmath>
#include <cstddef>
#include <vector>

#include "precip/grid.hpp"
#include "precip/kinetics.hpp"

namespace moc {

struct MocResult {
    double c = 0.0;    // dissolved concentration at t_end
    double mean = 0.0; // m1/m0 at t_end (0 when no particles)
    double m0 = 0.0;
};

inline MocResult integrate(const precip::ControlVector& v,
                           const precip::TimeGrid& grid,
                           const precip::KineticsModel& model,
                           const precip::KineticsParams& params,
                           std::size_t refine, double t_end) {
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const double beta = params.beta;
    const double xn = params.x_n;
    const double k_r = params.k_r;

    std::vector<double> x;      // cohort sizes
    std::vector<double> n;      // cohort numbers (fixed at birth)
    double pend = 0.0;          // precursor not yet reduced
    double ctot = 0.0;

    auto third_moment = [&](const std::vector<double>& sizes) {
        double m3 = 0.0;
        for (std::size_t l = 0; l < sizes.size(); ++l)
            m3 += n[l] * sizes[l] * sizes[l] * sizes[l];
        return m3;
    };

    std::vector<double> x_mid, x_new;
    // t_end must be a grid point; whole intervals are integrated
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        if (grid.points[k] >= t_end - 1e-9 * grid.horizon())
            break;
        const double dt = grid.deltas[k] / static_cast<double>(refine);
        for (std::size_t r = 0; r < refine; ++r) {
            // stage 1
            const double c1 = g1 * ctot - g2 * third_moment(x);
            const double gr1 = model.growth_rate_g0(c1).value;
            const double nu1 = model.nucleation_rate(c1).value;
            const double dp1 = v[k] - k_r * pend;
            const double dc1 = k_r * pend;

            // Euler predictor
            x_mid.resize(x.size());
            for (std::size_t l = 0; l < x.size(); ++l)
                x_mid[l] = x[l] + dt * gr1 * std::pow(x[l], beta);
            const double pend_mid = pend + dt * dp1;
            const double ctot_mid = ctot + dt * dc1;

            // stage 2 at t + dt
            const double c2 = g1 * ctot_mid - g2 * third_moment(x_mid);
            const double gr2 = model.growth_rate_g0(c2).value;
            const double nu2 = model.nucleation_rate(c2).value;
            const double dp2 = v[k] - k_r * pend_mid;
            const double dc2 = k_r * pend_mid;

            x_new.resize(x.size());
            for (std::size_t l = 0; l < x.size(); ++l)
                x_new[l] = x[l] + 0.5 * dt *
                                      (gr1 * std::pow(x[l], beta) +
                                       gr2 * std::pow(x_mid[l], beta));
            x.swap(x_new);
            pend += 0.5 * dt * (dp1 + dp2);
            ctot += 0.5 * dt * (dc1 + dc2);

            const double born = 0.5 * dt * (nu1 + nu2);
            if (born > 0.0) {
                x.push_back(xn);
                n.push_back(born);
            }
        }
    }

    MocResult out;
    out.c = g1 * ctot - g2 * third_moment(x);
    for (std::size_t l = 0; l < x.size(); ++l) {
        out.m0 += n[l];
        out.mean += n[l] * x[l];
    }
    out.mean = out.m0 > 0.0 ? out.mean / out.m0 : 0.0;
    return out;
}

} // namespace moc
