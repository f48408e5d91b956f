#include "nfrag/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nfrag {

namespace {

double override_or(const SimConfig& config, const std::string& name, double fallback) {
    const auto it = config.tolerance_overrides.find(name);
    return it != config.tolerance_overrides.end() ? it->second : fallback;
}

void add_order(std::vector<double>& orders, double m) {
    for (double o : orders)
        if (std::abs(o - m) <= 1e-12) return;
    orders.push_back(m);
}

BoundReport check_positivity(const RunResult& run) {
    BoundReport r;
    r.name = "positivity";
    r.identity = "min_k density_k >= 0 at every accepted step";
    r.tolerance = 0.0;
    r.observed_extreme = run.min_density;
    r.bound_extreme = 0.0;
    r.max_violation = std::max(0.0, -run.min_density);
    r.pass = run.min_density >= 0.0;
    return r;
}

BoundReport check_weak_form(const RunResult& run, const WeakFormSeries& wf, double tol,
                            double gamma) {
    BoundReport r;
    r.name = "weak_form_" + wf.name;
    r.identity =
        "sum theta u(t) - sum theta u(0) = (1/2) int_0^t sum Upsilon_theta Phi_n g g";
    r.tolerance = tol;
    const double scale =
        wf.norm_inf * (run.mu0_initial + run.rho) * std::max(1.0, run.stop_time);
    const auto res = wf.residuals();
    r.times = run.trajectory.times;
    r.observed = res;
    r.bound.assign(res.size(), tol * scale);
    for (double v : res) r.max_violation = std::max(r.max_violation, v / scale);
    r.observed_extreme = *std::max_element(res.begin(), res.end());
    r.bound_extreme = tol * scale;
    const double upsilon_bound = (gamma + 2.0) * wf.norm_inf;
    std::ostringstream note;
    note << "max |Upsilon_theta| over pairs = " << wf.max_abs_upsilon
         << " (bound (gamma+2)||theta|| = " << upsilon_bound << ")";
    r.note = note.str();
    r.pass = r.max_violation <= tol && wf.max_abs_upsilon <= upsilon_bound * (1.0 + 1e-12);
    return r;
}

BoundReport check_t_star(const RunResult& run, const SimConfig& config) {
    BoundReport r;
    r.name = "t_star";
    r.identity = "T* finite iff sigma in [0,1) and gamma > 2";
    r.tolerance = 0.0;
    r.bound_extreme = run.horizon_t_star;
    r.observed_extreme = run.stop_time;
    std::ostringstream note;
    if (std::isfinite(run.horizon_t_star))
        note << "finite horizon T* = " << run.horizon_t_star;
    else
        note << "infinite horizon (global existence regime)";
    note << "; sigma = " << run.kernel.sigma() << ", gamma = " << run.kernel.gamma;
    r.note = note.str();
    r.pass = config.probe_blowup || run.stop_time < run.horizon_t_star;
    r.max_violation = r.pass ? 0.0 : run.stop_time - run.horizon_t_star;
    return r;
}

}  // namespace

std::vector<std::string> default_checks(const SimConfig& config) {
    std::vector<std::string> names = {
        "mass_conservation", "positivity",        "mu0_envelope",
        "mu0_monotone",      "mu0_lower_half",    "superlinear_inequality",
        "superlinear_envelope", "neg_alpha_envelope", "mu_sigma1_lower",
        "weak_form",         "time_lipschitz",    "t_star"};
    // the sigma1-moment lower bound hypothesis holds for nu <= nu_sigma1 only
    if (config.sigma1 > 0.0 && config.sigma1 < 1.0) {
        const KernelConstants c = constants_power_law(config.nu,
                                                      std::numeric_limits<double>::quiet_NaN(),
                                                      config.sigma1);
        if (config.nu <= c.nu_sigma1 && c.l_sigma1 >= 1.0)
            names.push_back("mu_sigma1_monotone");
    }
    return names;
}

std::vector<double> required_moment_orders(const SimConfig& config,
                                           const std::vector<std::string>& checks) {
    std::vector<double> orders = config.moment_orders;
    add_order(orders, 0.0);
    add_order(orders, 1.0);
    const double m = config.check_m;
    const double s1 = config.sigma1;
    const double s2 = config.sigma2;
    for (const auto& name : checks) {
        if (name == "superlinear_inequality") {
            for (double o : {m, 1.0 + s1, 1.0 + s2, m + s2 - 1.0, m + s1 - 1.0, m + s2, s1})
                add_order(orders, o);
        } else if (name == "superlinear_envelope") {
            add_order(orders, m);
        } else if (name == "neg_alpha_envelope") {
            add_order(orders, -config.alpha_or_default());
        } else if (name == "mu_sigma1_lower") {
            add_order(orders, -config.alpha_or_default());
            add_order(orders, s1);
        } else if (name == "mu_sigma1_monotone") {
            add_order(orders, s1);
        }
    }
    std::sort(orders.begin(), orders.end());
    return orders;
}

ValidationReport evaluate_checks(const SimConfig& config, const RunResult& run,
                                 const std::vector<std::string>& checks) {
    ValidationReport rep;
    rep.run = run;
    rep.t_star_value = run.horizon_t_star;
    rep.horizon_classification =
        std::isfinite(run.horizon_t_star) ? "finite" : "infinite";

    const double s1 = config.sigma1;
    const double s2 = config.sigma2;
    const double sigma = s1 + s2;
    const double gamma = run.kernel.gamma;
    const double kappa = config.kappa;
    const double alpha = config.alpha_or_default();
    const double m = config.check_m;
    const MomentSeries& series = run.step_moments;

    const KernelConstants consts = constants_power_law(
        config.nu, m, (s1 > 0.0 && s1 < 1.0) ? s1 : std::numeric_limits<double>::quiet_NaN(),
        alpha);
    // both no-transfer parents contribute a full power-law share to the
    // negative moment, so the admissible constant doubles
    const double L_neg_alpha = config.breakage == SimConfig::Breakage::NoTransfer
                                   ? 2.0 * consts.L_neg_alpha
                                   : consts.L_neg_alpha;

    for (const auto& name : checks) {
        if (name == "mass_conservation") {
            rep.checks.push_back(
                check_mass_conservation(series, override_or(config, name, 1e-10)));
        } else if (name == "positivity") {
            rep.checks.push_back(check_positivity(run));
        } else if (name == "mu0_envelope") {
            rep.checks.push_back(check_mu0_envelope(series, kappa, sigma, gamma,
                                                    override_or(config, name, 1e-5)));
        } else if (name == "mu0_monotone") {
            rep.checks.push_back(
                check_mu0_monotone(series, override_or(config, name, 1e-8)));
        } else if (name == "mu0_lower_half") {
            rep.checks.push_back(check_mu0_lower_half(series));
        } else if (name == "mu_sigma1_monotone") {
            rep.checks.push_back(check_mu_sigma1_monotone(
                series, s1, override_or(config, name, 1e-8)));
        } else if (name == "superlinear_inequality") {
            rep.checks.push_back(check_superlinear_inequality(
                series, m, s1, s2, kappa, consts.kappa_m, consts.varsigma_m,
                override_or(config, name, 1e-3)));
            // the hypothesis wants varsigma_m >= 1; when the computed value is
            // smaller, also run the check with it raised to 1 and note the gap
            if (consts.varsigma_m < 1.0) {
                auto raised = check_superlinear_inequality(
                    series, m, s1, s2, kappa, consts.kappa_m, 1.0,
                    override_or(config, name, 1e-3));
                raised.name = "superlinear_inequality_varsigma_raised";
                std::ostringstream note;
                note << "computed varsigma_m = " << consts.varsigma_m
                     << " < 1; rerun with max(varsigma_m, 1) = 1";
                raised.note = note.str();
                rep.checks.push_back(std::move(raised));
            }
        } else if (name == "superlinear_envelope") {
            rep.checks.push_back(check_superlinear_envelope_shape(series, m, s2));
        } else if (name == "neg_alpha_envelope") {
            rep.checks.push_back(check_neg_alpha_envelope(
                series, alpha, kappa, L_neg_alpha, s1, s2, gamma, run.stop_time));
        } else if (name == "mu_sigma1_lower") {
            rep.checks.push_back(check_mu_sigma1_lower(
                series, alpha, kappa, L_neg_alpha, s1, s2, gamma, run.stop_time));
        } else if (name == "weak_form") {
            for (const auto& wf : run.weak_forms)
                rep.checks.push_back(
                    check_weak_form(run, wf, override_or(config, name, 1e-6), gamma));
        } else if (name == "time_lipschitz") {
            const double pi1 = mu0_envelope(run.stop_time, run.mu0_initial, run.rho,
                                            kappa, sigma, gamma);
            rep.checks.push_back(check_time_lipschitz(run.trajectory.times,
                                                      run.lipschitz_l1_diffs, kappa,
                                                      gamma, pi1, run.rho));
        } else if (name == "t_star") {
            rep.checks.push_back(check_t_star(run, config));
        } else {
            throw std::invalid_argument("unknown check `" + name + "`");
        }
    }

    if (config.self_test) {
        // corrupting the positive coefficient must make the inequality fail
        auto corrupted = check_superlinear_inequality(series, m, s1, s2, kappa,
                                                      consts.kappa_m, 0.0, 1e-3);
        BoundReport r;
        r.name = "self_test_corrupted_varsigma";
        r.identity = "the superlinear check must fail when varsigma_m is zeroed";
        r.tolerance = 0.0;
        r.max_violation = corrupted.pass ? 1.0 : 0.0;
        r.pass = !corrupted.pass;
        r.note = "corrupted check verdict: " + std::string(corrupted.pass ? "pass" : "fail");
        rep.checks.push_back(std::move(r));
    }

    rep.all_passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                                 [](const BoundReport& r) { return r.pass; });
    return rep;
}

ValidationReport run_validation(const SimConfig& config) {
    std::vector<std::string> checks = config.checks;
    if (checks.empty() ||
        std::find(checks.begin(), checks.end(), "default") != checks.end()) {
        std::vector<std::string> resolved = default_checks(config);
        for (const auto& c : checks)
            if (c != "default" &&
                std::find(resolved.begin(), resolved.end(), c) == resolved.end())
                resolved.push_back(c);
        checks = std::move(resolved);
    }

    SimConfig expanded = config;
    expanded.moment_orders = required_moment_orders(config, checks);
    RunResult run = integrate(expanded);
    return evaluate_checks(config, run, checks);
}

}  // namespace nfrag
