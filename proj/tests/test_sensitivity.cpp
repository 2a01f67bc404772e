#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "precip/sensitivity.hpp"
#include "support.hpp"

using namespace precip;
using testutil::IdentityKinetics;
using testutil::ZeroKinetics;

namespace {

double rel_gap(const ControlVector& a, const ControlVector& b) {
    double num = 0.0, den = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / den;
}

} // namespace

TEST_CASE("state residual vanishes on a solved trajectory") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 30);
    std::mt19937 rng(3);
    const ControlVector v = testutil::random_control(rng, 30, 0.0, 9.0);
    const StateTrajectory traj = solve_state(v, g, kin, p);

    const std::vector<double> F = state_residual(v, traj.c, g, kin, p);
    REQUIRE(F.size() == traj.c.size());
    for (double fk : F)
        REQUIRE(std::abs(fk) <= 1e-12);
}

TEST_CASE("state residual isolates a single perturbed entry") {
    const IdentityKinetics kin;
    const KineticsParams p = testutil::fixture_params();
    const TimeGrid g = make_uniform_grid(3.0, 3);
    const ControlVector v{1.0, 0.0, 0.0};
    const StateTrajectory traj = solve_state(v, g, kin, p);

    std::vector<double> c = traj.c;
    const double eps = 1e-3;
    c[1] += eps;
    const std::vector<double> F = state_residual(v, c, g, kin, p);
    REQUIRE(F[1] == Catch::Approx(eps).margin(1e-15));
    REQUIRE(F[0] == 0.0);
    // downstream entries move too; only the perturbed row equals eps exactly
}

TEST_CASE("adjoint gradient matches finite differences") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 20);
    ObjectiveSpec spec;

    for (unsigned seed = 0; seed < 5; ++seed) {
        std::mt19937 rng(seed);
        const ControlVector v = testutil::random_control(rng, 20, 0.5, 6.0);

        const GradientResult gr = gradient_objective(v, g, kin, p, spec);
        const ControlVector fd = fd_gradient(v, g, kin, p, spec);
        REQUIRE(rel_gap(gr.gradient, fd) < 1e-4);

        // multiplicative perturbation of the control, as used when the
        // dosing profile is scaled pointwise
        ControlVector u(20);
        std::uniform_real_distribution<double> du(0.9, 1.1);
        for (double& ui : u)
            ui = du(rng);
        ControlVector uv(20);
        for (std::size_t i = 0; i < 20; ++i)
            uv[i] = u[i] * v[i];
        const GradientResult inner = gradient_objective(uv, g, kin, p, spec);
        ControlVector chained(20);
        for (std::size_t i = 0; i < 20; ++i)
            chained[i] = u[i] * inner.gradient[i];
        auto scaled_objective = [&](const ControlVector& w) {
            ControlVector uw(20);
            for (std::size_t i = 0; i < 20; ++i)
                uw[i] = u[i] * w[i];
            return objective(solve_state(uw, g, kin, p), spec);
        };
        ControlVector fd_chain(20, 0.0);
        for (std::size_t i = 0; i < 20; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(v[i]));
            ControlVector vp = v, vm = v;
            vp[i] += h;
            vm[i] -= h;
            fd_chain[i] =
                (scaled_objective(vp) - scaled_objective(vm)) / (2.0 * h);
        }
        REQUIRE(rel_gap(chained, fd_chain) < 1e-4);
    }
}

TEST_CASE("gradient value agrees with the plain objective") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 25);
    ObjectiveSpec spec;
    const ControlVector v(25, 3.0);
    const GradientResult gr = gradient_objective(v, g, kin, p, spec);
    REQUIRE(gr.value ==
            Catch::Approx(objective(solve_state(v, g, kin, p), spec))
                .margin(1e-14));
    REQUIRE(gr.adjoint.size() == 25);
    for (double lam : gr.adjoint)
        REQUIRE(std::isfinite(lam));
}

TEST_CASE("gradient is linear in the mean-tracking weight") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 15);
    const ControlVector v(15, 3.0);

    ObjectiveSpec mean_only;
    mean_only.weight_mean = 1.0;
    mean_only.weight_var = 0.0;
    ObjectiveSpec doubled = mean_only;
    doubled.weight_mean = 2.0;

    const ControlVector g1 =
        gradient_objective(v, g, kin, p, mean_only).gradient;
    const ControlVector g2 =
        gradient_objective(v, g, kin, p, doubled).gradient;
    for (std::size_t i = 0; i < 15; ++i)
        REQUIRE(g2[i] == Catch::Approx(2.0 * g1[i]).margin(1e-14));
}

TEST_CASE("structural zeros of the gradient") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 20);
    ObjectiveSpec spec;
    const ControlVector v(20, 3.0);

    // dosing in the last interval cannot influence the final state
    const GradientResult gr = gradient_objective(v, g, kin, p, spec);
    REQUIRE(gr.gradient.back() == 0.0);

    // zero weights null the whole gradient
    ObjectiveSpec zero;
    zero.weight_mean = 0.0;
    zero.weight_var = 0.0;
    const GradientResult gz = gradient_objective(v, g, kin, p, zero);
    for (double gi : gz.gradient)
        REQUIRE(gi == 0.0);
}

TEST_CASE("gradient propagates an empty population") {
    const KineticsParams p = testutil::fixture_params();
    const ZeroKinetics kin;
    const TimeGrid g = make_uniform_grid(10.0, 10);
    ObjectiveSpec spec;
    REQUIRE_THROWS_AS(
        gradient_objective(ControlVector(10, 1.0), g, kin, p, spec),
        EmptyPopulation);
}
