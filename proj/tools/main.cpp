// Command-line driver: run, validate, constants, converge, oracle.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nfrag/artifacts.hpp"
#include "nfrag/io.hpp"
#include "nfrag/oracle.hpp"
#include "nfrag/solver.hpp"
#include "nfrag/validation.hpp"

namespace {

using namespace nfrag;

struct CommonOpts {
    std::string config_path;
    std::string outdir = ".";
    int threads = 0;  // 0 = keep the configured value
    bool probe_blowup = false;
};

SimConfig load_config(const CommonOpts& opts) {
    SimConfig cfg = parse_config(read_file(opts.config_path));
    if (opts.threads > 0) cfg.threads = opts.threads;
    if (opts.probe_blowup) cfg.probe_blowup = true;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.outdir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads for the pair sums");
    cmd->add_flag("--probe-blowup", opts.probe_blowup,
                  "allow T beyond the finite horizon and stop on the blow-up proxy");
}

int cmd_run(const CommonOpts& opts) {
    const SimConfig cfg = load_config(opts);
    const RunResult res = integrate(cfg);
    write_run_artifacts(res, cfg, opts.outdir);
    std::cout << "status: " << (res.status == RunStatus::Ok ? "ok" : res.status_detail)
              << "\n"
              << "steps: " << res.steps_accepted << " accepted, " << res.steps_rejected
              << " rejected\n"
              << "max |mu_1(t) - mu_1(0)|/mu_1(0): " << format_double(res.max_mass_drift)
              << "\n";
    if (res.status == RunStatus::Ok || res.status == RunStatus::BlowupStop) return 0;
    return 2;
}

int cmd_validate(const CommonOpts& opts, bool self_test) {
    SimConfig cfg = load_config(opts);
    if (self_test) cfg.self_test = true;
    const ValidationReport rep = run_validation(cfg);
    std::filesystem::create_directories(opts.outdir);
    write_file_atomic((std::filesystem::path(opts.outdir) / "report.json").string(),
                      report_json(rep, emit_config(cfg)));
    for (const auto& c : rep.checks)
        std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name
                  << "  max_violation = " << format_double(c.max_violation)
                  << "  tol = " << format_double(c.tolerance) << "\n";
    std::cout << "horizon: " << rep.horizon_classification;
    if (std::isfinite(rep.t_star_value))
        std::cout << " (T* = " << format_double(rep.t_star_value) << ")";
    std::cout << "\n" << (rep.all_passed ? "all checks passed" : "CHECKS FAILED") << "\n";
    return rep.all_passed ? 0 : 1;
}

int cmd_constants(double nu, std::vector<double> m_list, double sigma1, double alpha,
                  double p) {
    if (m_list.empty()) m_list = {2.0};
    std::cout << constants_table(nu, m_list, sigma1, alpha, p);
    return 0;
}

int cmd_converge(const CommonOpts& opts, int levels, int ref_factor) {
    const SimConfig cfg = load_config(opts);

    std::vector<SimConfig> level_cfgs;
    for (int l = 0; l < levels; ++l) {
        SimConfig c = cfg;
        c.cells = cfg.cells << l;
        level_cfgs.push_back(c);
    }
    SimConfig finest = level_cfgs.back();
    const RunResult ref = fine_reference(finest, ref_factor);

    std::ostringstream csv;
    csv << "level,cells";
    for (double m : ref.output_moments.orders()) csv << ",err_mu_" << m;
    csv << "\n";
    std::vector<std::vector<double>> errors;
    for (int l = 0; l < levels; ++l) {
        const RunResult run = integrate(level_cfgs[l]);
        std::vector<double> err;
        csv << l << "," << level_cfgs[l].cells;
        for (double m : ref.output_moments.orders()) {
            double worst = 0.0;
            for (std::size_t r = 0; r < run.output_moments.rows(); ++r) {
                const double a = run.output_moments.value(r, m);
                const double b = ref.output_moments.value(r, m);
                worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
            }
            err.push_back(worst);
            csv << "," << format_double(worst);
        }
        csv << "\n";
        errors.push_back(std::move(err));
    }
    std::filesystem::create_directories(opts.outdir);
    write_file_atomic((std::filesystem::path(opts.outdir) / "converge.csv").string(),
                      csv.str());
    std::cout << csv.str();

    bool monotone = true;
    for (std::size_t l = 1; l < errors.size(); ++l)
        for (std::size_t c = 0; c < errors[l].size(); ++c)
            if (errors[l][c] > errors[l - 1][c] && errors[l - 1][c] > 1e-14)
                monotone = false;
    std::cout << (monotone ? "errors decrease monotonically\n"
                           : "WARNING: errors are not monotone\n");
    return monotone ? 0 : 1;
}

int cmd_oracle(const CommonOpts& opts, int max_order) {
    const SimConfig cfg = load_config(opts);
    if (cfg.sigma1 != 0.0 || cfg.sigma2 != 0.0) {
        std::cerr << "the moment hierarchy closes only for sigma1 = sigma2 = 0\n";
        return 2;
    }
    const Grid grid = make_grid(cfg);
    const State s0 = build_initial_state(make_initial_condition(cfg), grid);
    std::vector<double> init;
    for (int m = 0; m <= max_order; ++m) init.push_back(moment(grid, s0, m));
    const MomentHierarchy h = MomentHierarchy::make(cfg.nu, cfg.kappa, init);

    std::ostringstream csv;
    csv << "t";
    for (int m = 0; m <= max_order; ++m) csv << ",mu_" << m;
    csv << "\n";
    for (int i = 0; i < cfg.output_points; ++i) {
        const double t = cfg.horizon * i / (cfg.output_points - 1);
        const auto mu = solve_hierarchy(h, t);
        csv << format_double(t);
        for (double v : mu) csv << "," << format_double(v);
        csv << "\n";
    }
    std::filesystem::create_directories(opts.outdir);
    write_file_atomic((std::filesystem::path(opts.outdir) / "oracle_moments.csv").string(),
                      csv.str());
    std::cout << csv.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conservative solver for collision-induced fragmentation with mass transfer"};
    app.require_subcommand(1);

    CommonOpts run_opts, val_opts, conv_opts, orac_opts;
    bool self_test = false;
    int levels = 3, ref_factor = 2, oracle_order = 3;
    double nu = 0.0;
    double sigma1 = std::numeric_limits<double>::quiet_NaN();
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double p = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> m_list;

    auto* run_cmd = app.add_subcommand("run", "integrate and write moment/state files");
    add_common(run_cmd, run_opts);

    auto* val_cmd = app.add_subcommand("validate", "run and check every enabled bound");
    add_common(val_cmd, val_opts);
    val_cmd->add_flag("--self-test", self_test,
                      "also corrupt a constant and require that check to fail");

    auto* const_cmd = app.add_subcommand("constants", "closed-form kernel constants");
    const_cmd->add_option("--nu", nu, "power-law exponent in (-1, 0]")->required();
    const_cmd->add_option("--m", m_list, "moment orders m > 1");
    const_cmd->add_option("--sigma1", sigma1, "kernel exponent in (0, 1)");
    const_cmd->add_option("--alpha", alpha, "negative-moment order in (0, nu+1)");
    const_cmd->add_option("--p", p, "integrability parameter > 1/(nu+1)");

    auto* conv_cmd = app.add_subcommand("converge", "grid refinement study");
    add_common(conv_cmd, conv_opts);
    conv_cmd->add_option("--levels", levels, "number of doubling levels");
    conv_cmd->add_option("--ref-factor", ref_factor, "extra refinement of the reference");

    auto* orac_cmd = app.add_subcommand("oracle", "closed moment-hierarchy solve");
    add_common(orac_cmd, orac_opts);
    orac_cmd->add_option("--max-order", oracle_order, "highest integer moment");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts);
        if (val_cmd->parsed()) return cmd_validate(val_opts, self_test);
        if (const_cmd->parsed()) return cmd_constants(nu, m_list, sigma1, alpha, p);
        if (conv_cmd->parsed()) return cmd_converge(conv_opts, levels, ref_factor);
        if (orac_cmd->parsed()) return cmd_oracle(orac_opts, oracle_order);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
