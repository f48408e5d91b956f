#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nfrag/moments.hpp"
#include "nfrag/state.hpp"

using namespace nfrag;
using doctest::Approx;

TEST_SUITE_BEGIN("state");

TEST_CASE("analytic moments of the initial families") {
    const auto expo = InitialCondition::exponential(1.0, 1.0);
    CHECK(expo.analytic_moments().mu0 == Approx(1.0));
    CHECK(expo.analytic_moments().mu1 == Approx(1.0));
    CHECK(expo.analytic_moments().mu2 == Approx(2.0));

    const auto pulse = InitialCondition::pulse(1.0, 2.0, 1.0);
    CHECK(pulse.analytic_moments().mu0 == Approx(1.0));
    CHECK(pulse.analytic_moments().mu1 == Approx(1.5));
    CHECK(pulse.analytic_moments().mu2 == Approx(7.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("cell averages reproduce the exponential moments") {
    const Grid g = Grid::geometric(1e-10, 30.0, 200);
    const auto init = InitialCondition::exponential(1.0, 1.0);
    const State s = build_initial_state(init, g);

    // cell averaging integrates the density exactly, so mu_0 only misses the
    // tail beyond the truncation size
    CHECK(moment(g, s, 0.0) == Approx(1.0 - std::exp(-30.0)).epsilon(1e-13));
    CHECK(moment(g, s, 1.0) == Approx(1.0).epsilon(2e-3));
    CHECK(moment(g, s, 2.0) == Approx(2.0).epsilon(1e-2));
}

TEST_CASE("pulse cell averages") {
    const Grid g = Grid::geometric(1e-3, 10.0, 120);
    const State s = build_initial_state(InitialCondition::pulse(1.0, 2.0, 1.0), g);
    CHECK(moment(g, s, 0.0) == Approx(1.0).epsilon(1e-13));
    CHECK(moment(g, s, 1.0) == Approx(1.5).epsilon(2e-3));
    for (double d : s.density) CHECK(d >= 0.0);
}

TEST_CASE("tabulated densities") {
    const auto tent = InitialCondition::tabulated({{1.0, 0.0}, {2.0, 1.0}, {3.0, 0.0}});
    CHECK(tent.analytic_moments().mu0 == Approx(1.0));
    CHECK(tent.density(1.5) == Approx(0.5));
    CHECK(tent.density(0.5) == 0.0);
    CHECK(tent.integral(1.0, 3.0) == Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(InitialCondition::tabulated({{1.0, 0.5}, {2.0, -0.1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(InitialCondition::tabulated({{2.0, 0.5}, {1.0, 0.5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(InitialCondition::tabulated({{1.0, 0.5}}), std::invalid_argument);
}

TEST_CASE("family parameter validation") {
    CHECK_THROWS_AS(InitialCondition::exponential(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(InitialCondition::exponential(1.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(InitialCondition::pulse(2.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(InitialCondition::pulse(1.0, 2.0, 0.0), std::invalid_argument);
}

TEST_SUITE_END();
