#include "nfrag/artifacts.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "nfrag/io.hpp"

namespace nfrag {

namespace {

std::string order_label(double m) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", m);
    return buf;
}

const char* status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Ok: return "ok";
        case RunStatus::BlowupStop: return "blowup_stop";
        case RunStatus::StiffnessFailure: return "stiffness_failure";
        case RunStatus::BudgetExceeded: return "budget_exceeded";
    }
    return "unknown";
}

}  // namespace

std::string moments_csv(const RunResult& result) {
    const MomentSeries& s = result.output_moments;
    std::ostringstream out;
    out << "t";
    for (double m : s.orders()) out << ",mu_" << order_label(m);
    out << "\n";
    for (std::size_t r = 0; r < s.rows(); ++r) {
        out << format_double(s.times()[r]);
        for (double m : s.orders()) out << "," << format_double(s.value(r, m));
        out << "\n";
    }
    return out.str();
}

std::string states_csv(const RunResult& result) {
    std::ostringstream out;
    out << "t,cell,edge_lo,edge_hi,pivot,density\n";
    const Grid& g = result.grid;
    for (std::size_t i = 0; i < result.trajectory.states.size(); ++i) {
        const State& st = result.trajectory.states[i];
        for (int k = 0; k < g.size(); ++k) {
            out << format_double(result.trajectory.times[i]) << "," << k << ","
                << format_double(g.edges[k]) << "," << format_double(g.edges[k + 1]) << ","
                << format_double(g.pivots[k]) << "," << format_double(st.density[k])
                << "\n";
        }
    }
    return out.str();
}

std::string manifest_json(const RunResult& result, const std::string& config_text,
                          const std::vector<std::pair<std::string, std::string>>&
                              file_hashes) {
    nlohmann::json j;
    j["config"] = config_text;
    j["status"] = status_name(result.status);
    j["status_detail"] = result.status_detail;
    j["stop_time"] = result.stop_time;
    j["steps_accepted"] = result.steps_accepted;
    j["steps_rejected"] = result.steps_rejected;
    j["wall_seconds"] = result.wall_seconds;
    j["mu0_initial"] = result.mu0_initial;
    j["rho"] = result.rho;
    j["t_star"] = std::isfinite(result.horizon_t_star)
                      ? nlohmann::json(result.horizon_t_star)
                      : nlohmann::json("infinite");
    j["max_mass_drift"] = result.max_mass_drift;
    j["max_number_defect"] = result.max_number_defect;
    j["analytic_initial"] = {{"mu0", result.analytic_initial.mu0},
                             {"mu1", result.analytic_initial.mu1},
                             {"mu2", result.analytic_initial.mu2}};
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [name, hash] : file_hashes) files[name] = hash;
    j["files"] = files;
    return j.dump(2) + "\n";
}

namespace {

nlohmann::json check_to_json(const BoundReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["identity"] = r.identity;
    j["tolerance"] = r.tolerance;
    j["max_violation"] = r.max_violation;
    j["bound"] = std::isfinite(r.bound_extreme) ? nlohmann::json(r.bound_extreme)
                                                : nlohmann::json("infinite");
    j["observed"] = r.observed_extreme;
    j["verdict"] = r.pass ? "pass" : "fail";
    if (!r.note.empty()) j["note"] = r.note;
    if (!r.times.empty() && r.times.size() <= 512) {
        j["series"] = {{"t", r.times}, {"bound", r.bound}, {"observed", r.observed}};
        // infinities are not representable in JSON numbers
        for (auto& v : j["series"]["bound"])
            if (v.is_number() && !std::isfinite(v.get<double>())) v = "infinite";
    }
    return j;
}

}  // namespace

std::string report_json(const ValidationReport& report, const std::string& config_text) {
    nlohmann::json j;
    j["config"] = config_text;
    j["t_star"] = std::isfinite(report.t_star_value)
                      ? nlohmann::json(report.t_star_value)
                      : nlohmann::json("infinite");
    j["horizon_classification"] = report.horizon_classification;
    j["all_passed"] = report.all_passed;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : report.checks) j["checks"].push_back(check_to_json(c));
    return j.dump(2) + "\n";
}

std::string constants_table(double nu, const std::vector<double>& m_list, double sigma1,
                            double alpha, double p) {
    std::ostringstream out;
    out << "name,value,definition\n";
    auto row = [&](const std::string& name, double v, const char* def) {
        if (std::isnan(v)) return;
        out << name << "," << format_double(v) << "," << def << "\n";
    };
    const KernelConstants base =
        constants_power_law(nu, std::numeric_limits<double>::quiet_NaN(), sigma1, alpha, p);
    row("gamma", base.gamma, "(nu+2)/(nu+1)");
    row("l_sigma1", base.l_sigma1, "2^(sigma1-1)(nu+2)/(sigma1+nu+1)");
    row("nu_sigma1", base.nu_sigma1, "-(1+sigma1-2^sigma1)/(1-2^(sigma1-1))");
    row("L_neg_alpha", base.L_neg_alpha, "(nu+2)/(nu+1-alpha)");
    row("eta_coefficient", base.eta_coefficient,
        "(nu+2)((p-1)/(p(nu+1)-1))^((p-1)/p)");
    row("eta_exponent", base.eta_exponent, "1/p");
    for (double m : m_list) {
        const KernelConstants c = constants_power_law(nu, m);
        const std::string suffix = order_label(m);
        row("kappa_" + suffix, c.kappa_m, "(m-1)/(m+nu+1)");
        row("C_" + suffix, c.C_m, "2^(m-1)-1 for m in (1,2]u[3,inf); m for m in (2,3)");
        row("varsigma_" + suffix, c.varsigma_m, "C_m(nu+2)/(m+nu+1)");
    }
    return out.str();
}

std::vector<std::string> write_run_artifacts(const RunResult& result,
                                             const SimConfig& config,
                                             const std::string& outdir) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);
    std::vector<std::string> written;
    std::vector<std::pair<std::string, std::string>> hashes;

    const std::string moments = moments_csv(result);
    write_file_atomic((fs::path(outdir) / "moments.csv").string(), moments);
    written.push_back("moments.csv");
    hashes.emplace_back("moments.csv", git_blob_hash(moments));

    if (config.snapshots) {
        const std::string states = states_csv(result);
        write_file_atomic((fs::path(outdir) / "states.csv").string(), states);
        written.push_back("states.csv");
        hashes.emplace_back("states.csv", git_blob_hash(states));
    }

    const std::string manifest = manifest_json(result, emit_config(config), hashes);
    write_file_atomic((fs::path(outdir) / "manifest.json").string(), manifest);
    written.push_back("manifest.json");
    return written;
}

}  // namespace nfrag
