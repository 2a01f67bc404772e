#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "precip/uncertainty.hpp"
#include "support.hpp"

using namespace precip;

namespace {

// every vector on the grid with entries in {u_l, 1, u_u} that is constant
// or has exactly one downward/upward switch point
std::set<std::vector<double>> brute_force_profiles(const UncertaintySet& s) {
    std::set<std::vector<double>> out;
    const std::vector<double> levels{s.u_l, 1.0, s.u_u};
    for (double a : levels)
        out.insert(std::vector<double>(s.n, a));
    for (double a : levels)
        for (double b : levels) {
            if (a == b)
                continue;
            for (std::size_t j = 1; j < s.n; ++j) {
                std::vector<double> p(s.n, a);
                std::fill(p.begin() + static_cast<std::ptrdiff_t>(j), p.end(),
                          b);
                out.insert(p);
            }
        }
    return out;
}

} // namespace

TEST_CASE("scenario counts") {
    for (std::size_t n : {1u, 2u, 3u, 6u, 100u}) {
        UncertaintySet s;
        s.n = n;
        const auto scen = enumerate_scenarios(s);
        const std::size_t expected = n == 1 ? 3 : 3 + 6 * (n - 1);
        REQUIRE(scen.size() == expected);
    }
    UncertaintySet s;
    s.n = 100;
    REQUIRE(enumerate_scenarios(s).size() == 597);
}

TEST_CASE("enumeration covers exactly the two-level profiles") {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 6u}) {
        UncertaintySet s;
        s.n = n;
        const auto scen = enumerate_scenarios(s);
        std::set<std::vector<double>> seen;
        for (const auto& sc : scen) {
            const auto p = expand(sc);
            REQUIRE(p.size() == n);
            seen.insert(p);
        }
        // profiles are pairwise distinct and match the brute-force set
        REQUIRE(seen.size() == scen.size());
        REQUIRE(seen == brute_force_profiles(s));
    }
}

TEST_CASE("enumeration order is stable") {
    UncertaintySet s;
    s.n = 3;
    const auto scen = enumerate_scenarios(s);
    REQUIRE(scen.size() == 15);
    // constants first, ascending by level
    REQUIRE(expand(scen[0]) == std::vector<double>{0.9, 0.9, 0.9});
    REQUIRE(expand(scen[1]) == std::vector<double>{1.0, 1.0, 1.0});
    REQUIRE(expand(scen[2]) == std::vector<double>{1.1, 1.1, 1.1});
    // then ordered pairs, switch index innermost
    REQUIRE(expand(scen[3]) == std::vector<double>{0.9, 1.0, 1.0});
    REQUIRE(expand(scen[4]) == std::vector<double>{0.9, 0.9, 1.0});
    REQUIRE(expand(scen[5]) == std::vector<double>{0.9, 1.1, 1.1});
    REQUIRE(expand(scen[14]) == std::vector<double>{1.1, 1.1, 1.0});
}

TEST_CASE("set validation") {
    UncertaintySet bad;
    bad.n = 4;
    bad.u_l = 1.05;
    REQUIRE_THROWS_AS(validate(bad), ConfigError);
    bad.u_l = 0.9;
    bad.u_u = 0.95;
    REQUIRE_THROWS_AS(validate(bad), ConfigError);
    bad.u_u = 1.1;
    bad.n = 0;
    REQUIRE_THROWS_AS(validate(bad), ConfigError);

    UncertaintySet degenerate;
    degenerate.n = 4;
    degenerate.u_l = 1.0;
    degenerate.u_u = 1.0;
    REQUIRE_NOTHROW(validate(degenerate));
    REQUIRE(enumerate_scenarios(degenerate).size() == 1);
}

TEST_CASE("apply scales the control pointwise") {
    UncertaintySet s;
    s.n = 4;
    UncertaintyScenario sc;
    sc.level1 = 0.9;
    sc.level2 = 1.1;
    sc.jump = 2;
    sc.n = 4;
    const ControlVector v{1.0, 2.0, 3.0, 4.0};
    const ControlVector scaled = apply_scenario(sc, v);
    const ControlVector expect{0.9, 1.8, 3.3, 4.4};
    REQUIRE(scaled.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        REQUIRE(scaled[i] == Catch::Approx(expect[i]).margin(1e-15));
    REQUIRE_THROWS_AS(apply_scenario(sc, ControlVector{1.0, 2.0}), DimensionMismatch);
}

TEST_CASE("worst case dominates the applied objective") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 12);
    ObjectiveSpec spec;
    UncertaintySet s;
    s.n = 12;

    const ControlVector v(12, 3.0);
    const WorstCaseResult wc = worst_case(v, s, g, kin, p, spec);
    REQUIRE(wc.table.size() == enumerate_scenarios(s).size());
    REQUIRE(wc.scenario_id < wc.table.size());
    REQUIRE(wc.value == wc.table[wc.scenario_id]);
    for (double t : wc.table)
        REQUIRE(t <= wc.value);

    // the nominal profile is among the scenarios
    const double nominal = objective(solve_state(v, g, kin, p), spec);
    REQUIRE(wc.value >= nominal - 1e-15);

    // first maximizer wins ties
    for (std::size_t i = 0; i < wc.scenario_id; ++i)
        REQUIRE(wc.table[i] < wc.value);
}

TEST_CASE("degenerate set reduces to the nominal objective") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 10);
    ObjectiveSpec spec;
    UncertaintySet s;
    s.n = 10;
    s.u_l = 1.0;
    s.u_u = 1.0;

    const ControlVector v(10, 3.0);
    const WorstCaseResult wc = worst_case(v, s, g, kin, p, spec);
    const GradientResult gr = gradient_objective(v, g, kin, p, spec);
    REQUIRE(wc.value == Catch::Approx(gr.value).margin(1e-14));
    for (std::size_t i = 0; i < 10; ++i)
        REQUIRE(wc.subgradient[i] ==
                Catch::Approx(gr.gradient[i]).margin(1e-14));
}

// The scenario sets at different sizes are not nested (their off-nominal
// levels differ), so the discrete max need not grow along a size sweep.
// What always holds: the unperturbed profile is in every set, so the worst
// case dominates the nominal objective.
TEST_CASE("worst case dominates the nominal value at every set size") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 10);
    ObjectiveSpec spec;
    const ControlVector v(10, 3.0);

    const double nominal = gradient_objective(v, g, kin, p, spec).value;
    for (double size : {0.0, 0.05, 0.10, 0.15, 0.20}) {
        UncertaintySet s;
        s.n = 10;
        s.u_l = 1.0 - size;
        s.u_u = 1.0 + size;
        const double w = worst_case(v, s, g, kin, p, spec).value;
        REQUIRE(w >= nominal - 1e-12);
        if (size == 0.0)
            REQUIRE(w == Catch::Approx(nominal).margin(1e-14));
    }
}

TEST_CASE("scenario table is independent of the thread count") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 12);
    ObjectiveSpec spec;
    UncertaintySet s;
    s.n = 12;
    const ControlVector v(12, 3.0);

    setenv("PRECIP_THREADS", "1", 1);
    const WorstCaseResult one = worst_case(v, s, g, kin, p, spec);
    setenv("PRECIP_THREADS", "4", 1);
    const WorstCaseResult four = worst_case(v, s, g, kin, p, spec);
    unsetenv("PRECIP_THREADS");

    REQUIRE(one.scenario_id == four.scenario_id);
    REQUIRE(one.table.size() == four.table.size());
    for (std::size_t i = 0; i < one.table.size(); ++i)
        REQUIRE(one.table[i] == four.table[i]);
}

TEST_CASE("subgradient matches the chain rule at the worst scenario") {
    const KineticsParams p = testutil::stock_params();
    const CntKinetics kin(p);
    const TimeGrid g = make_uniform_grid(10.0, 10);
    ObjectiveSpec spec;
    UncertaintySet s;
    s.n = 10;
    const ControlVector v(10, 3.0);

    const WorstCaseResult wc = worst_case(v, s, g, kin, p, spec);
    const auto profile = expand(wc.scenario);
    const GradientResult inner =
        gradient_objective(apply_scenario(wc.scenario, v), g, kin, p, spec);
    for (std::size_t i = 0; i < 10; ++i)
        REQUIRE(wc.subgradient[i] ==
                Catch::Approx(profile[i] * inner.gradient[i]).margin(1e-14));
}
