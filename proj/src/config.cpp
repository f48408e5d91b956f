#include "nfrag/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "nfrag/io.hpp"

namespace nfrag {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = {
        "mass_conservation",      "positivity",
        "mu0_envelope",           "mu0_monotone",
        "mu0_lower_half",         "mu_sigma1_monotone",
        "mu_sigma1_lower",        "superlinear_inequality",
        "superlinear_envelope",   "neg_alpha_envelope",
        "weak_form",              "time_lipschitz",
        "t_star"};
    return names;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    SimConfig run() {
        std::istringstream in(text_);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            parse_line(line, lineno);
        }
        validate();
        if (!issues_.empty()) throw ConfigError(std::move(issues_));
        return cfg_;
    }

  private:
    void error(int lineno, const std::string& msg) {
        std::ostringstream s;
        if (lineno > 0) s << "line " << lineno << ": ";
        s << msg;
        issues_.push_back(s.str());
    }

    void parse_line(std::string line, int lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) return;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            error(lineno, "expected `section.key = value`");
            return;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            error(lineno, "expected `section.key = value`");
            return;
        }
        apply(key, value, lineno);
    }

    bool to_double(const std::string& v, double& out, int lineno, const std::string& key) {
        try {
            std::size_t pos = 0;
            out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return true;
        } catch (const std::exception&) {
            error(lineno, key + ": `" + v + "` is not a number");
            return false;
        }
    }

    bool to_int(const std::string& v, int& out, int lineno, const std::string& key) {
        double d;
        if (!to_double(v, d, lineno, key)) return false;
        if (d != std::floor(d) || std::abs(d) > 1e9) {
            error(lineno, key + ": `" + v + "` is not an integer");
            return false;
        }
        out = static_cast<int>(d);
        return true;
    }

    bool to_bool(const std::string& v, bool& out, int lineno, const std::string& key) {
        if (v == "true" || v == "1") {
            out = true;
            return true;
        }
        if (v == "false" || v == "0") {
            out = false;
            return true;
        }
        error(lineno, key + ": `" + v + "` is not a boolean");
        return false;
    }

    void apply(const std::string& key, const std::string& value, int lineno) {
        SimConfig& c = cfg_;
        auto num = [&](double& field) { to_double(value, field, lineno, key); };
        auto integer = [&](int& field) { to_int(value, field, lineno, key); };
        auto boolean = [&](bool& field) { to_bool(value, field, lineno, key); };

        if (key == "kernel.kappa") return num(c.kappa);
        if (key == "kernel.sigma1") return num(c.sigma1);
        if (key == "kernel.sigma2") return num(c.sigma2);

        if (key == "breakage.kind") {
            if (value == "power_law")
                c.breakage = SimConfig::Breakage::PowerLaw;
            else if (value == "no_transfer")
                c.breakage = SimConfig::Breakage::NoTransfer;
            else
                error(lineno, "breakage.kind must be power_law or no_transfer");
            return;
        }
        if (key == "breakage.nu") return num(c.nu);
        if (key == "breakage.alpha") return num(c.alpha);
        if (key == "breakage.p") return num(c.p);

        if (key == "grid.e1") return num(c.e1);
        if (key == "grid.n") return num(c.n);
        if (key == "grid.cells") return integer(c.cells);

        if (key == "initial.family") {
            if (value == "exponential")
                c.init = SimConfig::Init::Exponential;
            else if (value == "pulse")
                c.init = SimConfig::Init::Pulse;
            else if (value == "tabulated")
                c.init = SimConfig::Init::Tabulated;
            else
                error(lineno, "initial.family must be exponential, pulse or tabulated");
            return;
        }
        if (key == "initial.amplitude") return num(c.init_amplitude);
        if (key == "initial.x0") return num(c.init_x0);
        if (key == "initial.a") return num(c.init_a);
        if (key == "initial.b") return num(c.init_b);
        if (key == "initial.height") return num(c.init_height);
        if (key == "initial.file") {
            c.init_file = value;
            return;
        }

        if (key == "run.T") return num(c.horizon);
        if (key == "run.output_points") return integer(c.output_points);
        if (key == "run.moments") {
            c.moment_orders.clear();
            for (const auto& item : split_list(value)) {
                double m;
                if (to_double(item, m, lineno, key)) c.moment_orders.push_back(m);
            }
            return;
        }
        if (key == "run.dt_initial") return num(c.dt_initial);
        if (key == "run.dt_max") return num(c.dt_max);
        if (key == "run.rel_tol") return num(c.rel_tol);
        if (key == "run.safety") return num(c.safety);
        if (key == "run.positivity_floor") return num(c.positivity_floor);
        if (key == "run.loss_dt_cap") return num(c.loss_dt_cap);
        if (key == "run.fixed_dt") return num(c.fixed_dt);
        if (key == "run.threads") return integer(c.threads);
        if (key == "run.probe_blowup") return boolean(c.probe_blowup);
        if (key == "run.blowup_factor") return num(c.blowup_factor);
        if (key == "run.snapshots") return boolean(c.snapshots);
        if (key == "run.wall_budget") return num(c.wall_budget);

        if (key == "validate.checks") {
            c.checks = split_list(value);
            return;
        }
        if (key == "validate.m") return num(c.check_m);
        if (key == "validate.self_test") return boolean(c.self_test);
        if (key.rfind("validate.tol.", 0) == 0) {
            const std::string name = key.substr(std::string("validate.tol.").size());
            double tol;
            if (to_double(value, tol, lineno, key)) c.tolerance_overrides[name] = tol;
            return;
        }

        error(lineno, "unknown key `" + key + "`");
    }

    void validate() {
        SimConfig& c = cfg_;
        auto check = [&](bool ok, const std::string& msg) {
            if (!ok) issues_.push_back(msg);
        };

        check(std::isfinite(c.kappa) && c.kappa >= 0.0, "kernel.kappa must be >= 0");
        check(std::isfinite(c.sigma1) && c.sigma1 >= 0.0 && c.sigma1 < 1.0,
              "kernel.sigma1 must lie in [0,1); sigma1 = 1 is excluded");
        check(std::isfinite(c.sigma2) && c.sigma2 >= c.sigma1 && c.sigma2 <= 1.0,
              "kernel.sigma2 must lie in [sigma1, 1]");
        check(std::isfinite(c.nu) && c.nu > -1.0 && c.nu <= 0.0,
              "breakage.nu must lie in (-1, 0]");
        if (c.nu > -1.0 && c.nu <= 0.0) {
            const double a = c.alpha_or_default();
            check(a > 0.0 && a < c.nu + 1.0, "breakage.alpha must lie in (0, nu+1)");
            const double p = c.p_or_default();
            check(p > 1.0 / (c.nu + 1.0), "breakage.p must exceed 1/(nu+1)");
        }
        check(std::isfinite(c.e1) && std::isfinite(c.n) && c.e1 > 0.0 && c.e1 < c.n,
              "grid needs 0 < e1 < n");
        check(c.cells >= 8, "grid.cells must be >= 8");

        switch (c.init) {
            case SimConfig::Init::Exponential:
                check(c.init_amplitude > 0.0 && c.init_x0 > 0.0,
                      "exponential initial data needs amplitude > 0 and x0 > 0");
                break;
            case SimConfig::Init::Pulse:
                check(c.init_a >= 0.0 && c.init_b > c.init_a && c.init_height > 0.0,
                      "pulse initial data needs 0 <= a < b and height > 0");
                break;
            case SimConfig::Init::Tabulated:
                check(!c.init_file.empty(), "tabulated initial data needs initial.file");
                break;
        }

        check(std::isfinite(c.horizon) && c.horizon > 0.0, "run.T must be positive");
        check(c.output_points >= 2, "run.output_points must be >= 2");
        for (double m : c.moment_orders)
            check(std::isfinite(m), "run.moments entries must be finite");
        check(c.dt_initial > 0.0, "run.dt_initial must be positive");
        check(c.dt_max >= c.dt_initial, "run.dt_max must be >= dt_initial");
        check(c.rel_tol > 0.0, "run.rel_tol must be positive");
        check(c.safety > 0.0 && c.safety <= 1.0, "run.safety must lie in (0, 1]");
        check(c.positivity_floor >= 0.0, "run.positivity_floor must be >= 0");
        check(c.loss_dt_cap > 0.0 && c.loss_dt_cap <= 1.0,
              "run.loss_dt_cap must lie in (0, 1]");
        check(c.fixed_dt >= 0.0, "run.fixed_dt must be >= 0");
        check(c.threads >= 1, "run.threads must be >= 1");
        check(c.blowup_factor > 1.0, "run.blowup_factor must exceed 1");
        check(c.wall_budget >= 0.0, "run.wall_budget must be >= 0");
        check(std::isfinite(c.check_m) && c.check_m > 1.0, "validate.m must exceed 1");

        for (const auto& name : c.checks) {
            if (name == "default") continue;
            const auto& known = known_checks();
            check(std::find(known.begin(), known.end(), name) != known.end(),
                  "unknown check `" + name + "` in validate.checks");
        }
    }

    const std::string& text_;
    SimConfig cfg_;
    std::vector<std::string> issues_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

std::string ConfigError::join(const std::vector<std::string>& issues) {
    std::ostringstream s;
    s << "invalid configuration (" << issues.size() << " problem"
      << (issues.size() == 1 ? "" : "s") << ")";
    for (const auto& i : issues) s << "\n  " << i;
    return s.str();
}

SimConfig parse_config(const std::string& text) { return Parser(text).run(); }

std::string emit_config(const SimConfig& c) {
    std::ostringstream out;
    auto g = [](double v) { return format_double(v); };
    out << "kernel.kappa = " << g(c.kappa) << "\n";
    out << "kernel.sigma1 = " << g(c.sigma1) << "\n";
    out << "kernel.sigma2 = " << g(c.sigma2) << "\n";
    out << "breakage.kind = "
        << (c.breakage == SimConfig::Breakage::PowerLaw ? "power_law" : "no_transfer")
        << "\n";
    out << "breakage.nu = " << g(c.nu) << "\n";
    if (c.alpha > 0.0) out << "breakage.alpha = " << g(c.alpha) << "\n";
    if (c.p > 0.0) out << "breakage.p = " << g(c.p) << "\n";
    out << "grid.e1 = " << g(c.e1) << "\n";
    out << "grid.n = " << g(c.n) << "\n";
    out << "grid.cells = " << c.cells << "\n";
    switch (c.init) {
        case SimConfig::Init::Exponential:
            out << "initial.family = exponential\n";
            out << "initial.amplitude = " << g(c.init_amplitude) << "\n";
            out << "initial.x0 = " << g(c.init_x0) << "\n";
            break;
        case SimConfig::Init::Pulse:
            out << "initial.family = pulse\n";
            out << "initial.a = " << g(c.init_a) << "\n";
            out << "initial.b = " << g(c.init_b) << "\n";
            out << "initial.height = " << g(c.init_height) << "\n";
            break;
        case SimConfig::Init::Tabulated:
            out << "initial.family = tabulated\n";
            out << "initial.file = " << c.init_file << "\n";
            break;
    }
    out << "run.T = " << g(c.horizon) << "\n";
    out << "run.output_points = " << c.output_points << "\n";
    if (!c.moment_orders.empty()) {
        out << "run.moments = ";
        for (std::size_t i = 0; i < c.moment_orders.size(); ++i)
            out << (i ? ", " : "") << g(c.moment_orders[i]);
        out << "\n";
    }
    out << "run.dt_initial = " << g(c.dt_initial) << "\n";
    out << "run.dt_max = " << g(c.dt_max) << "\n";
    out << "run.rel_tol = " << g(c.rel_tol) << "\n";
    out << "run.safety = " << g(c.safety) << "\n";
    out << "run.positivity_floor = " << g(c.positivity_floor) << "\n";
    out << "run.loss_dt_cap = " << g(c.loss_dt_cap) << "\n";
    if (c.fixed_dt > 0.0) out << "run.fixed_dt = " << g(c.fixed_dt) << "\n";
    out << "run.threads = " << c.threads << "\n";
    out << "run.probe_blowup = " << (c.probe_blowup ? "true" : "false") << "\n";
    out << "run.blowup_factor = " << g(c.blowup_factor) << "\n";
    out << "run.snapshots = " << (c.snapshots ? "true" : "false") << "\n";
    if (c.wall_budget > 0.0) out << "run.wall_budget = " << g(c.wall_budget) << "\n";
    if (!c.checks.empty()) {
        out << "validate.checks = ";
        for (std::size_t i = 0; i < c.checks.size(); ++i)
            out << (i ? ", " : "") << c.checks[i];
        out << "\n";
    }
    out << "validate.m = " << g(c.check_m) << "\n";
    out << "validate.self_test = " << (c.self_test ? "true" : "false") << "\n";
    for (const auto& [name, tol] : c.tolerance_overrides)
        out << "validate.tol." << name << " = " << g(tol) << "\n";
    return out.str();
}

CollisionKernel make_collision_kernel(const SimConfig& c) {
    return CollisionKernel::checked(c.kappa, c.sigma1, c.sigma2);
}

BreakageKernel make_breakage_kernel(const SimConfig& c) {
    return c.breakage == SimConfig::Breakage::PowerLaw
               ? BreakageKernel::power_law(c.nu, c.alpha_or_default())
               : BreakageKernel::no_transfer(c.nu, c.alpha_or_default());
}

Grid make_grid(const SimConfig& c) { return Grid::geometric(c.e1, c.n, c.cells); }

InitialCondition make_initial_condition(const SimConfig& c) {
    switch (c.init) {
        case SimConfig::Init::Exponential:
            return InitialCondition::exponential(c.init_amplitude, c.init_x0);
        case SimConfig::Init::Pulse:
            return InitialCondition::pulse(c.init_a, c.init_b, c.init_height);
        case SimConfig::Init::Tabulated: {
            std::ifstream in(c.init_file);
            if (!in) throw std::runtime_error("cannot read initial.file " + c.init_file);
            std::vector<std::pair<double, double>> samples;
            std::string line;
            while (std::getline(in, line)) {
                const auto hash = line.find('#');
                if (hash != std::string::npos) line.erase(hash);
                line = trim(line);
                if (line.empty()) continue;
                std::replace(line.begin(), line.end(), ',', ' ');
                std::istringstream row(line);
                double x, u;
                if (!(row >> x >> u))
                    throw std::runtime_error("bad row in " + c.init_file + ": " + line);
                samples.emplace_back(x, u);
            }
            return InitialCondition::tabulated(std::move(samples));
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace nfrag
