#pragma once

#include <random>
#include <vector>

#include "precip/grid.hpp"
#include "precip/kinetics.hpp"

namespace testutil {

// Bare recurrence kinetics for arithmetic fixtures: N(c) = c, G0(c) = c.
// Not physical (negative rates allowed); exercises the solver algebra.
struct IdentityKinetics final : precip::KineticsModel {
    precip::RateValue nucleation_rate(double c) const override {
        return {c, 1.0};
    }
    precip::RateValue growth_rate_g0(double c) const override {
        return {c, 1.0};
    }
};

struct ZeroKinetics final : precip::KineticsModel {
    precip::RateValue nucleation_rate(double) const override {
        return {0.0, 0.0};
    }
    precip::RateValue growth_rate_g0(double) const override {
        return {0.0, 0.0};
    }
};

// Constant nucleation with frozen growth; m0 grows linearly in time.
struct ConstNucleation final : precip::KineticsModel {
    double rate = 1.0;
    explicit ConstNucleation(double r) : rate(r) {}
    precip::RateValue nucleation_rate(double) const override {
        return {rate, 0.0};
    }
    precip::RateValue growth_rate_g0(double) const override {
        return {0.0, 0.0};
    }
};

// Fixture parameters for the arithmetic recurrence checks:
// k_r = 1, beta = -1, x_n = 1, gamma1 = gamma2 = 1.
inline precip::KineticsParams fixture_params() {
    precip::KineticsParams p;
    p.k_r = 1.0;
    p.beta = -1.0;
    p.x_n = 1.0;
    p.gamma1_override = 1.0;
    p.gamma2_override = 1.0;
    return p;
}

// Stock parameters: calibrated rate constants, gamma2 = pi/6 from
// rho = volume = 1.
inline precip::KineticsParams stock_params() { return {}; }

inline precip::ControlVector random_control(std::mt19937& rng, std::size_t n,
                                            double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    precip::ControlVector v(n);
    for (auto& vi : v)
        vi = dist(rng);
    return v;
}

} // namespace testutil
