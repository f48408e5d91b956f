#include "nfrag/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nfrag {

MomentHierarchy MomentHierarchy::make(double nu, double kappa,
                                      std::vector<double> initial) {
    if (!std::isfinite(nu) || nu <= -1.0 || nu > 0.0)
        throw std::invalid_argument("nu must lie in (-1, 0]");
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument("kappa must be >= 0");
    if (initial.size() < 2)
        throw std::invalid_argument("hierarchy needs at least mu_0 and mu_1");
    for (double m : initial)
        if (!std::isfinite(m) || m < 0.0)
            throw std::invalid_argument("initial moments must be finite and nonnegative");
    MomentHierarchy h;
    h.nu = nu;
    h.kappa = kappa;
    h.max_order = static_cast<int>(initial.size()) - 1;
    h.initial = std::move(initial);
    return h;
}

std::vector<double> moment_ode_rhs(const MomentHierarchy& h,
                                   const std::vector<double>& mu) {
    const int max_m = static_cast<int>(mu.size()) - 1;
    std::vector<double> d(mu.size());
    // Pascal's triangle row by row
    std::vector<double> binom{1.0};
    for (int m = 0; m <= max_m; ++m) {
        double conv = 0.0;
        for (int j = 0; j <= m; ++j) conv += binom[j] * mu[j] * mu[m - j];
        d[m] = h.kappa * ((h.nu + 2.0) / (m + h.nu + 1.0) * conv - 2.0 * mu[m] * mu[0]);
        binom.push_back(0.0);
        for (int j = m + 1; j > 0; --j) binom[j] += binom[j - 1];
    }
    return d;
}

double hierarchy_mu0_closed_form(const MomentHierarchy& h, double t) {
    const double mu0 = h.initial[0];
    return mu0 / (1.0 - h.kappa * (h.gamma() - 2.0) * mu0 * t);
}

namespace {

// Dormand-Prince 5(4) pair; a different integrator family than the solver's
// SSP-RK3 so the two trajectories are independent evidence.
std::vector<double> dp5_integrate(const MomentHierarchy& h, std::vector<double> y,
                                  double t_end, double rel_tol) {
    // the rhs is autonomous, so the stage abscissae are not needed
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640,
                        e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    double abs_tol = 0.0;
    for (double v : y) abs_tol = std::max(abs_tol, v);
    abs_tol = rel_tol * std::max(abs_tol, 1e-300) * 1e-3;

    double t = 0.0;
    double dt = std::min(1e-3, t_end > 0.0 ? t_end : 1e-3);
    std::vector<double> k1 = moment_ode_rhs(h, y), k2(n), k3(n), k4(n), k5(n), k6(n),
                        k7(n), ytmp(n), y5(n);
    long guard = 0;
    while (t < t_end) {
        if (++guard > 2000000) throw std::runtime_error("hierarchy integration stalled");
        bool clipped = false;
        if (t + 1.01 * dt >= t_end) {
            dt = t_end - t;
            clipped = true;
        }
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * a21 * k1[i];
        k2 = moment_ode_rhs(h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
        k3 = moment_ode_rhs(h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = moment_ode_rhs(h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = moment_ode_rhs(h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                   a65 * k5[i]);
        k6 = moment_ode_rhs(h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            y5[i] = y[i] +
                    dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = moment_ode_rhs(h, y5);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = dt * std::abs(e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                           e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, e / sc);
        }
        if (err <= 1.0) {
            t = clipped ? t_end : t + dt;
            y.swap(y5);
            k1.swap(k7);  // first-same-as-last
        }
        // on rejection y is unchanged, so k1 stays valid
        const double fac = err > 1e-14 ? 0.9 * std::pow(err, -0.2) : 5.0;
        dt *= std::min(5.0, std::max(0.2, fac));
        if (!(dt > 1e-16 * std::max(t_end, 1.0)))
            throw std::runtime_error("hierarchy step underflow");
    }
    return y;
}

}  // namespace

std::vector<double> solve_hierarchy(const MomentHierarchy& h, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
    if (h.gamma() > 2.0 && h.kappa > 0.0) {
        const double horizon = 1.0 / (h.kappa * (h.gamma() - 2.0) * h.initial[0]);
        if (t >= horizon) {
            std::ostringstream msg;
            msg << "t = " << t << " is at or beyond the mu_0 blow-up time " << horizon;
            throw std::domain_error(msg.str());
        }
    }
    if (t == 0.0) return h.initial;
    return dp5_integrate(h, h.initial, t, 1e-10);
}

RunResult fine_reference(const SimConfig& config, int refinement_factor) {
    if (refinement_factor < 2)
        throw std::invalid_argument("refinement factor must be >= 2");
    SimConfig fine = config;
    fine.cells = config.cells * refinement_factor;
    fine.rel_tol = config.rel_tol / 10.0;
    RunResult res = integrate(fine);
    if (res.status == RunStatus::BudgetExceeded)
        throw BudgetError("fine reference exceeded the wall budget of " +
                          std::to_string(config.wall_budget) + " s");
    return res;
}

}  // namespace nfrag
