#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nfrag/oracle.hpp"

using namespace nfrag;
using doctest::Approx;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("hierarchy right-hand side") {
    const auto h = MomentHierarchy::make(-0.5, 1.0, {1.0, 1.0, 2.0, 6.0});

    SUBCASE("mass line vanishes") {
        for (const auto& mu : {std::vector<double>{1.0, 1.0, 2.0, 6.0},
                               std::vector<double>{3.0, 0.7, 11.0, 2.0}}) {
            const auto d = moment_ode_rhs(h, mu);
            CHECK(std::abs(d[1]) <= 1e-14 * mu[1] * mu[0] * h.kappa * 4.0);
        }
    }

    SUBCASE("number line is the saturated growth rate") {
        const auto d = moment_ode_rhs(h, {1.0, 1.0, 2.0, 6.0});
        CHECK(d[0] == Approx(1.0).epsilon(1e-14));  // kappa (gamma-2) mu_0^2, gamma = 3
    }

    SUBCASE("stationary second moment for nu = 0") {
        const auto h0 = MomentHierarchy::make(0.0, 1.0, {1.0, 1.0, 2.0});
        const auto d = moment_ode_rhs(h0, {1.0, 1.0, 2.0});
        CHECK(std::abs(d[2]) <= 1e-14);
    }
}

TEST_CASE("hierarchy solve against closed forms") {
    SUBCASE("riccati number growth") {
        const auto h = MomentHierarchy::make(-0.5, 1.0, {1.0, 1.0, 2.0, 6.0});
        for (double t : {0.1, 0.5, 0.9}) {
            const auto mu = solve_hierarchy(h, t);
            CHECK(mu[0] == Approx(hierarchy_mu0_closed_form(h, t)).epsilon(1e-9));
            CHECK(mu[1] == Approx(1.0).epsilon(1e-10));
        }
        CHECK(solve_hierarchy(h, 0.9)[0] == Approx(10.0).epsilon(1e-9));
    }

    SUBCASE("relaxation of the second moment for nu = 0") {
        const auto h = MomentHierarchy::make(0.0, 1.0, {1.0, 1.0, 5.0});
        for (double t : {0.3, 1.0, 2.5}) {
            const auto mu = solve_hierarchy(h, t);
            const double expected = 2.0 + 3.0 * std::exp(-(2.0 / 3.0) * t);
            CHECK(mu[2] == Approx(expected).epsilon(1e-9));
            CHECK(mu[0] == Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("t = 0 returns the initial moments") {
        const auto h = MomentHierarchy::make(-0.3, 2.0, {1.5, 0.7, 0.9});
        CHECK(solve_hierarchy(h, 0.0) == h.initial);
    }

    SUBCASE("horizon precondition") {
        const auto h = MomentHierarchy::make(-0.5, 1.0, {1.0, 1.0});
        CHECK_THROWS_AS(solve_hierarchy(h, 1.0), std::domain_error);
        CHECK_THROWS_AS(solve_hierarchy(h, 2.0), std::domain_error);
    }

    SUBCASE("repeat solves are bit-identical") {
        const auto h = MomentHierarchy::make(-0.4, 1.3, {1.0, 0.8, 1.4, 3.0});
        const auto a = solve_hierarchy(h, 0.7);
        const auto b = solve_hierarchy(h, 0.7);
        CHECK(a == b);
    }
}

TEST_CASE("hierarchy construction guards") {
    CHECK_THROWS_AS(MomentHierarchy::make(-1.0, 1.0, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(MomentHierarchy::make(0.0, -1.0, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(MomentHierarchy::make(0.0, 1.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(MomentHierarchy::make(0.0, 1.0, {1.0, -2.0}), std::invalid_argument);
}

TEST_SUITE_END();
