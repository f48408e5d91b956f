#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nfrag/oracle.hpp"
#include "nfrag/solver.hpp"

using namespace nfrag;
using doctest::Approx;

namespace {

// small standard setup shared by the solver tests
struct Setup {
    Grid grid;
    CollisionKernel phi;
    BreakageKernel beta;
    AllocationTable table;

    Setup(double nu, double s1, double s2, int cells = 40, double n = 20.0)
        : grid(Grid::geometric(1e-12, n, cells)),
          phi{1.0, s1, s2},
          beta(BreakageKernel::power_law(nu, 0.4 * (nu + 1.0))),
          table(build_allocation_table(grid, phi, beta)) {}
};

State monodisperse(const Grid& g, double size, double number) {
    State s;
    s.density.assign(g.size(), 0.0);
    const int k = g.locate(size);
    s.density[k] = number / g.widths[k];
    return s;
}

struct ZeroRhs : RhsFunction {
    int n;
    explicit ZeroRhs(int n) : n(n) {}
    int cells() const override { return n; }
    void eval(const std::vector<double>&, std::vector<double>& dr, std::vector<double>& nr,
              double& lam) const override {
        dr.assign(n, 0.0);
        nr.assign(n, 0.0);
        lam = 0.0;
    }
};

// drives every cell hard negative while reporting no loss rate, so the
// positivity safeguard is the only line of defense
struct HostileRhs : RhsFunction {
    int n;
    explicit HostileRhs(int n) : n(n) {}
    int cells() const override { return n; }
    void eval(const std::vector<double>& d, std::vector<double>& dr,
              std::vector<double>& nr, double& lam) const override {
        dr.assign(n, -1.0);
        nr.assign(n, -1.0);
        lam = 0.0;
        (void)d;
    }
};

}  // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("zero state has zero rhs") {
    Setup s(0.0, 0.0, 0.0);
    TableRhs rhs(s.table, 1);
    std::vector<double> d(s.grid.size(), 0.0), dr, nr;
    double lam = 1.0;
    rhs.eval(d, dr, nr, lam);
    CHECK(lam == 0.0);
    for (double v : dr) CHECK(v == 0.0);
    for (double v : nr) CHECK(v == 0.0);
}

TEST_CASE("single occupied cell, constant kernel") {
    Setup s(0.0, 0.0, 0.0);
    const State st = monodisperse(s.grid, 1.0, 1.0);
    const int k = s.grid.locate(1.0);
    TableRhs rhs(s.table, 1);
    std::vector<double> dr, nr;
    double lam = 0.0;
    rhs.eval(st.density, dr, nr, lam);

    // loss rate of the occupied cell's number is Phi g^2 = 2
    CHECK(lam == Approx(2.0).epsilon(1e-13));

    // nu = 0 has N = 2, so total number production balances the loss
    double total_number = 0.0, total_mass = 0.0;
    for (int i = 0; i < s.grid.size(); ++i) {
        total_number += nr[i];
        total_mass += s.grid.pivots[i] * nr[i];
    }
    CHECK(std::abs(total_number) <= 1e-6);
    CHECK(std::abs(total_mass) <= 1e-13 * s.grid.pivots[k]);
}

TEST_CASE("number derivative matches the pairwise collision average") {
    Setup s(-0.5, 0.0, 0.5, 32, 12.0);
    State st;
    st.density.assign(s.grid.size(), 0.0);
    for (int k = 0; k < s.grid.size(); ++k)
        st.density[k] = std::exp(-s.grid.pivots[k]) * (1.0 + 0.1 * (k % 3));

    TableRhs rhs(s.table, 1);
    std::vector<double> dr, nr;
    double lam = 0.0;
    rhs.eval(st.density, dr, nr, lam);

    double total = 0.0;
    for (double v : nr) total += v;

    // independent route: (1/2) sum (N - 2) Phi_n g_i g_j over ordered pairs
    double expected = 0.0;
    for (const auto& p : s.table.pairs()) {
        const double gi = st.density[p.i] * s.grid.widths[p.i];
        const double gj = st.density[p.j] * s.grid.widths[p.j];
        const auto [num, mass] = s.table.allocation_sums(p);
        const double sym = p.i == p.j ? 0.5 : 1.0;
        expected += sym * (num - 2.0) * p.rate * gi * gj;
    }
    CHECK(total == Approx(expected).epsilon(1e-10));
}

TEST_CASE("stepper leaves states alone under zero rhs") {
    ZeroRhs rhs(5);
    SolverSettings set;
    set.end_time = 1.0;
    Stepper stepper(rhs, set);
    State st;
    st.density = {1.0, 2.0, 0.0, 4.0, 5.0};
    st.time = 0.0;
    const State before = st;
    stepper.advance(st, 0.5);
    CHECK(st.density == before.density);
    CHECK(st.time > 0.0);
}

TEST_CASE("one fixed step reproduces the saturated number ODE to fourth order") {
    Setup s(-0.5, 0.0, 0.0);
    State st = monodisperse(s.grid, 1.0, 1.0);
    TableRhs rhs(s.table, 1);

    const double dt = 0.01;
    SolverSettings set;
    set.fixed_dt = dt;
    set.end_time = 1.0;
    set.loss_dt_cap = 1.0;
    Stepper stepper(rhs, set);
    stepper.advance(st, 1.0);
    REQUIRE(st.time == Approx(dt));

    double mu0 = 0.0;
    for (int k = 0; k < s.grid.size(); ++k) mu0 += st.density[k] * s.grid.widths[k];
    const double riccati = 1.0 / (1.0 - dt);  // kappa (gamma-2) mu_0(0) = 1
    CHECK(std::abs(mu0 - riccati) <= 5e-8);   // O(dt^4) plus the logged defect
}

TEST_CASE("negativity injection is rejected and ends in a stiffness error") {
    HostileRhs rhs(3);
    SolverSettings set;
    set.end_time = 1.0;
    set.dt_initial = 0.5;
    Stepper stepper(rhs, set);
    State st;
    st.density = {1e-20, 1e-20, 1e-20};
    st.time = 0.0;
    CHECK_THROWS_AS(stepper.advance(st, 1.0), StiffnessError);
    CHECK(stepper.rejected() > 10);
}

TEST_CASE("integrate: no collisions means a frozen trajectory") {
    Setup s(0.0, 0.0, 0.0, 24, 10.0);
    const CollisionKernel off{0.0, 0.0, 0.0};
    const auto table = build_allocation_table(s.grid, off, s.beta);
    State st = monodisperse(s.grid, 1.0, 1.0);
    SolverSettings set;
    set.end_time = 0.5;
    set.output_points = 6;
    const auto res = integrate_core(table, st, set, {0.0, 1.0, 2.0},
                                    KernelParams{0.0, 0.0, 0.0, 2.0}, {});
    CHECK(res.status == RunStatus::Ok);
    for (std::size_t r = 0; r < res.output_moments.rows(); ++r) {
        CHECK(res.output_moments.value(r, 0.0) == Approx(1.0).epsilon(1e-14));
        CHECK(res.output_moments.value(r, 2.0) ==
              Approx(res.output_moments.value(0, 2.0)).epsilon(1e-14));
    }
}

TEST_CASE("integrate: gamma = 2 freezes the particle number") {
    SimConfig cfg;
    cfg.nu = 0.0;
    cfg.sigma1 = cfg.sigma2 = 0.5;
    cfg.cells = 70;
    cfg.n = 30.0;
    cfg.horizon = 0.3;
    cfg.output_points = 7;
    const auto res = integrate(cfg);
    REQUIRE(res.status == RunStatus::Ok);
    const auto mu0 = res.step_moments.column(0.0);
    for (double v : mu0) CHECK(v == Approx(mu0.front()).epsilon(1e-8));
    CHECK(res.max_mass_drift <= 1e-12);
    CHECK(res.min_density >= 0.0);
}

TEST_CASE("integrate: saturated case follows the closed-form number growth") {
    SimConfig cfg;
    cfg.nu = -0.5;
    cfg.sigma1 = cfg.sigma2 = 0.0;
    cfg.cells = 40;
    cfg.n = 20.0;
    cfg.horizon = 0.5;
    cfg.output_points = 11;
    cfg.rel_tol = 1e-8;
    const auto res = integrate(cfg);
    REQUIRE(res.status == RunStatus::Ok);
    const double mu0_in = res.mu0_initial;
    for (std::size_t r = 0; r < res.output_moments.rows(); ++r) {
        const double t = res.output_moments.times()[r];
        const double expected = mu0_in / (1.0 - mu0_in * t);
        CHECK(res.output_moments.value(r, 0.0) == Approx(expected).epsilon(1e-4));
    }
    // weak form: theta = 1 residual equals the number balance error
    for (const auto& wf : res.weak_forms) {
        const auto r = wf.residuals();
        for (double v : r) CHECK(v <= 1e-10);
    }
}

TEST_CASE("unbounded test functions are rejected") {
    Setup s(0.0, 0.0, 0.0, 24, 10.0);
    const State st = monodisperse(s.grid, 1.0, 1.0);
    SolverSettings set;
    set.end_time = 0.1;
    set.output_points = 2;
    WeakFormSpec bad{"runaway", std::vector<double>(s.grid.size(), 1.0), 1.0};
    bad.theta.back() = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(integrate_core(s.table, st, set, {0.0, 1.0},
                                   KernelParams{1.0, 0.0, 0.0, 2.0}, {bad}),
                    std::invalid_argument);

    WeakFormSpec oversized{"oversized", std::vector<double>(s.grid.size(), 2.0), 1.0};
    CHECK_THROWS_AS(integrate_core(s.table, st, set, {0.0, 1.0},
                                   KernelParams{1.0, 0.0, 0.0, 2.0}, {oversized}),
                    std::invalid_argument);
}

TEST_CASE("integrate rejects horizons beyond T*") {
    SimConfig cfg;
    cfg.nu = -0.5;  // gamma = 3, sigma = 0: T* = 1/mu_0(0)
    cfg.cells = 24;
    cfg.n = 16.0;
    cfg.horizon = 1.5;
    CHECK_THROWS_AS(integrate(cfg), std::invalid_argument);

    cfg.probe_blowup = true;
    cfg.blowup_factor = 5.0;
    cfg.output_points = 16;
    const auto res = integrate(cfg);
    CHECK(res.status == RunStatus::BlowupStop);
    // mu_0 reaches 5x its start at t = (1 - 1/5)/mu_0(0) on the saturated law
    CHECK(res.stop_time == Approx(0.8).epsilon(0.05));
    CHECK(res.stop_time < 1.0);
}

TEST_CASE("integrate with the no-transfer kernel from a config") {
    SimConfig cfg;
    cfg.breakage = SimConfig::Breakage::NoTransfer;
    cfg.nu = -0.2;  // daughter count 2 (nu+2)/(nu+1) = 4.5
    cfg.sigma1 = 0.3;
    cfg.sigma2 = 0.8;
    cfg.cells = 36;
    cfg.e1 = 1e-10;
    cfg.n = 16.0;
    cfg.horizon = 0.2;
    cfg.output_points = 5;
    const auto res = integrate(cfg);
    CHECK(res.status == RunStatus::Ok);
    CHECK(res.kernel.gamma == Approx(2.0 * 1.8 / 0.8));
    CHECK(res.max_mass_drift <= 1e-12);
    // sigma > 1 with gamma > 2: global regime, growing particle number
    CHECK(!std::isfinite(res.horizon_t_star));
    const auto mu0 = res.step_moments.column(0.0);
    CHECK(mu0.back() > mu0.front());
}

TEST_CASE("integrate at the sigma2 = 1 kernel boundary") {
    SimConfig cfg;
    cfg.nu = -0.2;
    cfg.sigma1 = 0.0;
    cfg.sigma2 = 1.0;  // sigma = 1: global existence even with gamma > 2
    cfg.cells = 40;
    cfg.e1 = 1e-10;
    cfg.n = 16.0;
    cfg.horizon = 0.4;
    cfg.output_points = 9;
    const auto res = integrate(cfg);
    CHECK(res.status == RunStatus::Ok);
    CHECK(!std::isfinite(res.horizon_t_star));
    CHECK(res.max_mass_drift <= 1e-12);
    const auto mu0 = res.step_moments.column(0.0);
    for (std::size_t i = 0; i + 1 < mu0.size(); ++i)
        CHECK(mu0[i] <= mu0[i + 1] + 1e-10);  // daughter count > 2 grows mu_0
}

TEST_CASE("wall budget reports and stops") {
    SimConfig cfg;
    cfg.cells = 30;
    cfg.n = 12.0;
    cfg.horizon = 0.5;
    cfg.wall_budget = 1e-9;
    const auto res = integrate(cfg);
    CHECK(res.status == RunStatus::BudgetExceeded);
    CHECK_THROWS_AS(fine_reference(cfg, 2), BudgetError);
}

TEST_CASE("determinism across thread counts") {
    SimConfig base;
    base.nu = -0.3;
    base.sigma1 = 0.2;
    base.sigma2 = 0.7;
    base.cells = 36;
    base.n = 12.0;
    base.horizon = 0.2;
    base.output_points = 5;

    SimConfig threaded = base;
    threaded.threads = 4;

    const auto a = integrate(base);
    const auto b = integrate(threaded);
    REQUIRE(a.step_moments.rows() == b.step_moments.rows());
    for (std::size_t r = 0; r < a.step_moments.rows(); ++r)
        for (double m : a.step_moments.orders())
            CHECK(a.step_moments.value(r, m) == b.step_moments.value(r, m));
}

TEST_CASE("no-transfer gain term: combined and direct routes agree") {
    const Grid grid = Grid::geometric(1e-10, 12.0, 30);
    const CollisionKernel phi{1.0, 0.5, 0.5};
    const double nu = 0.0, alpha = 0.5;
    const auto combined =
        build_allocation_table(grid, phi, BreakageKernel::no_transfer(nu, alpha));
    const auto direct = build_no_transfer_table_direct(grid, phi, nu, alpha);

    const State st = build_initial_state(InitialCondition::exponential(1.0, 1.0), grid);
    SolverSettings set;
    set.end_time = 0.1;
    set.fixed_dt = 1e-3;
    set.output_points = 3;
    const KernelParams kp{1.0, 0.5, 0.5, 4.0};
    const auto ra = integrate_core(combined, st, set, {0.0, 1.0}, kp, {});
    const auto rb = integrate_core(direct, st, set, {0.0, 1.0}, kp, {});
    REQUIRE(ra.trajectory.states.size() == rb.trajectory.states.size());
    for (std::size_t i = 0; i < ra.trajectory.states.size(); ++i) {
        const auto& da = ra.trajectory.states[i].density;
        const auto& db = rb.trajectory.states[i].density;
        double worst = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < da.size(); ++k) {
            worst = std::max(worst, std::abs(da[k] - db[k]));
            scale = std::max(scale, std::abs(da[k]));
        }
        CHECK(worst <= 1e-12 * scale);
    }
}

TEST_SUITE_END();
