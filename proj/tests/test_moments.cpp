#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>
#include <vector>

#include "nfrag/moments.hpp"

using namespace nfrag;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MomentSeries series_from(const std::vector<double>& orders,
                         const std::vector<double>& times,
                         const std::vector<std::vector<double>>& rows) {
    MomentSeries s(orders);
    for (std::size_t i = 0; i < times.size(); ++i) s.append(times[i], rows[i]);
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("moments");

TEST_CASE("pivot moments") {
    // cells [0,1), [1,4), [4,16) with pivots 0.5, 2, 8
    const Grid g = Grid::geometric(1.0, 16.0, 2);
    State s;
    s.density.assign(3, 0.0);
    s.density[1] = 3.0 / g.widths[1];  // three particles at pivot 2
    CHECK(moment(g, s, 2.0) == Approx(12.0).epsilon(1e-14));
    CHECK(moment(g, s, 0.0) == Approx(3.0).epsilon(1e-14));
    CHECK(moment(g, s, -0.5) == Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("horizon classification") {
    CHECK(t_star(1.0, 1.0, 1.0, 0.0, 3.0) == Approx(1.0).epsilon(1e-15));
    CHECK(t_star(1.0, 1.0, 1.0, 1.2, 5.0) == kInf);
    CHECK(t_star(1.0, 1.0, 1.0, 0.3, 2.0) == kInf);
    CHECK(t_star(2.0, 3.0, 0.5, 0.5, 3.0) ==
          Approx(std::pow(2.0, -0.5) / (0.5 * 0.5 * 1.0 * std::sqrt(3.0))).epsilon(1e-14));
}

TEST_CASE("zeroth-moment envelope branches") {
    // gamma = 2 freezes mu_0
    CHECK(mu0_envelope(7.0, 1.3, 1.0, 2.0, 0.7, 2.0) == Approx(1.3));
    // sigma < 1: saturated growth toward the horizon
    CHECK(mu0_envelope(0.5, 1.0, 1.0, 1.0, 0.0, 3.0) == Approx(2.0).epsilon(1e-14));
    // sigma = 1: exponential
    CHECK(mu0_envelope(1.0, 1.0, 1.0, 1.0, 1.0, 3.0) ==
          Approx(std::exp(1.0)).epsilon(1e-14));
    // sigma > 1: algebraic growth
    CHECK(mu0_envelope(1.0, 1.0, 1.0, 1.0, 1.5, 3.0) ==
          Approx(std::pow(1.0 + 0.5, 2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(mu0_envelope(1.0, 1.0, 1.0, 1.0, 0.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(mu0_envelope(2.0, 1.0, 1.0, 1.0, 0.5, 4.0), std::domain_error);
}

TEST_CASE("envelope is continuous across sigma = 1") {
    const double t = 0.37, mu0 = 1.4, rho = 2.2, kappa = 0.8, gamma = 3.3;
    const double below = mu0_envelope(t, mu0, rho, kappa, 1.0 - 1e-6, gamma);
    const double at = mu0_envelope(t, mu0, rho, kappa, 1.0, gamma);
    const double above = mu0_envelope(t, mu0, rho, kappa, 1.0 + 1e-6, gamma);
    CHECK(below == Approx(at).epsilon(1e-4));
    CHECK(above == Approx(at).epsilon(1e-4));
}

TEST_CASE("envelope diverges at the horizon") {
    const double horizon = t_star(1.0, 1.0, 1.0, 0.0, 3.0);
    CHECK(mu0_envelope((1.0 - 1e-9) * horizon, 1.0, 1.0, 1.0, 0.0, 3.0) > 1e6);
}

TEST_CASE("centered differences are exact for quadratics") {
    const std::vector<double> t = {0.0, 0.1, 0.25, 0.33, 0.5, 0.9};
    std::vector<double> f(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) f[i] = 3.0 * t[i] * t[i] - 2.0 * t[i] + 1.0;
    const auto d = fd_derivative(t, f);
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(d[i] == Approx(6.0 * t[i] - 2.0).epsilon(1e-12));
}

TEST_CASE("mass conservation check") {
    auto s = series_from({0.0, 1.0}, {0.0, 0.5, 1.0},
                         {{1.0, 2.0}, {1.1, 2.0}, {1.2, 2.0}});
    CHECK(check_mass_conservation(s, 1e-10).pass);
    auto drift = series_from({0.0, 1.0}, {0.0, 0.5, 1.0},
                             {{1.0, 2.0}, {1.1, 2.0}, {1.2, 2.0 + 1e-6}});
    const auto r = check_mass_conservation(drift, 1e-10);
    CHECK_FALSE(r.pass);
    CHECK(r.max_violation == Approx(5e-7).epsilon(1e-6));
}

TEST_CASE("monotonicity checks") {
    auto up = series_from({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0},
                          {{1.0, 1.0, 1.0}, {1.2, 1.1, 1.0}, {1.5, 1.2, 1.0}});
    CHECK(check_mu0_monotone(up, 1e-8).pass);
    CHECK(check_mu_sigma1_monotone(up, 0.5, 1e-8).pass);
    CHECK(check_mu0_lower_half(up).pass);

    auto down = series_from({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0},
                            {{1.0, 1.0, 1.0}, {0.9, 1.0, 1.0}, {0.8, 1.0, 1.0}});
    CHECK_FALSE(check_mu0_monotone(down, 1e-8).pass);
    auto collapse = series_from({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0},
                                {{1.0, 1.0, 1.0}, {0.4, 1.0, 1.0}, {0.4, 1.0, 1.0}});
    CHECK_FALSE(check_mu0_lower_half(collapse).pass);
}

TEST_CASE("superlinear inequality check wiring") {
    // kappa = 0 makes both sides vanish
    const std::vector<double> orders = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    std::vector<std::vector<double>> rows(5, {1.0, 1.0, 1.0, 1.0, 2.0, 3.0});
    auto s = series_from(orders, {0.0, 0.1, 0.2, 0.3, 0.4}, rows);
    CHECK(check_superlinear_inequality(s, 2.0, 0.5, 0.5, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1e-3)
              .pass);
    CHECK_THROWS_AS(
        check_superlinear_inequality(s, 3.0, 0.5, 0.5, 1.0, 0.5, 1.5, 1e-3),
        std::invalid_argument);

    // growing mu_2 with a zeroed positive coefficient must fail
    std::vector<std::vector<double>> grow;
    const std::vector<double> times = {0.0, 0.1, 0.2, 0.3, 0.4};
    for (double t : times) grow.push_back({1.0, 1.0, 1.0, 1.0, 2.0 + t, 3.0});
    auto gs = series_from(orders, times, grow);
    CHECK_FALSE(
        check_superlinear_inequality(gs, 2.0, 0.5, 0.5, 1.0, 1.0 / 3.0, 0.0, 1e-3).pass);
}

TEST_CASE("envelope shape fit") {
    const std::vector<double> orders = {0.0, 1.0, 2.0};
    const std::vector<double> times = {0.0, 0.25, 0.5, 1.0};
    std::vector<std::vector<double>> rows(4, {1.0, 1.0, 5.0});
    auto s = series_from(orders, times, rows);
    const auto r = check_superlinear_envelope_shape(s, 2.0, 0.5);
    CHECK(r.pass);
    // constant mu_m: the fit saturates at the latest time
    const double expected = 5.0 / std::pow(1.0 + 1.0, 2.0);
    CHECK(r.bound_extreme == Approx(expected).epsilon(1e-12));
    // and the fitted envelope dominates the series everywhere
    for (std::size_t i = 1; i < times.size(); ++i) CHECK(r.bound[i] >= 5.0 * (1 - 1e-12));
}

TEST_CASE("negative-moment envelope formulas") {
    // kappa = 0: mu_{-alpha} constant, bound reduces to (1 + mu_{-alpha}(0))
    const std::vector<double> orders = {-0.5, 0.0, 0.5, 1.0};
    const std::vector<double> times = {0.0, 0.5, 1.0};
    std::vector<std::vector<double>> rows(3, {1.7, 1.0, 0.9, 1.0});
    auto s = series_from(orders, times, rows);
    const auto r = check_neg_alpha_envelope(s, 0.5, 0.0, 4.0, 0.0, 0.5, 2.0, 1.0);
    CHECK(r.pass);
    CHECK(r.bound_extreme == Approx(2.7).epsilon(1e-14));

    const auto low = check_mu_sigma1_lower(s, 0.5, 0.0, 4.0, 0.5, 0.5, 2.0, 1.0);
    CHECK(low.pass);
    // Pi12 = 2.7, bound = 2.7^{-1} (0.5)^{2} = 0.0925...
    CHECK(low.bound_extreme == Approx(std::pow(2.7, -1.0) * 0.25).epsilon(1e-12));
}

TEST_CASE("lipschitz check") {
    const std::vector<double> times = {0.0, 0.5, 1.0};
    const std::vector<double> diffs = {0.1, 0.1};
    CHECK(check_time_lipschitz(times, diffs, 1.0, 2.0, 1.0, 1.0).pass);
    // bound kappa (gamma+2) (Pi1+rho)^2 = 16; observed rate 0.2
    CHECK_FALSE(check_time_lipschitz(times, {20.0, 0.1}, 1.0, 2.0, 1.0, 1.0).pass);
    CHECK_THROWS_AS(check_time_lipschitz(times, {0.1}, 1.0, 2.0, 1.0, 1.0),
                    std::invalid_argument);
}

TEST_SUITE_END();
