// Line-oriented `section.key = value` run configuration.

#ifndef NFRAG_CONFIG_HPP_
#define NFRAG_CONFIG_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfrag/grid.hpp"
#include "nfrag/kernels.hpp"
#include "nfrag/state.hpp"

namespace nfrag {

/// All parse and constraint violations found in a configuration, together.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

  private:
    static std::string join(const std::vector<std::string>& issues);
    std::vector<std::string> issues_;
};

struct SimConfig {
    // kernel
    double kappa = 1.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;

    // breakage
    enum class Breakage { PowerLaw, NoTransfer };
    Breakage breakage = Breakage::PowerLaw;
    double nu = 0.0;
    double alpha = -1.0;  // <= 0: use the default (nu+1)/2
    double p = -1.0;      // <= 0: use the default 2/(nu+1)

    // grid
    double e1 = 1e-12;
    double n = 30.0;
    int cells = 200;

    // initial
    enum class Init { Exponential, Pulse, Tabulated };
    Init init = Init::Exponential;
    double init_amplitude = 1.0;
    double init_x0 = 1.0;
    double init_a = 1.0;
    double init_b = 2.0;
    double init_height = 1.0;
    std::string init_file;

    // run
    double horizon = 1.0;  // end time T
    int output_points = 101;
    std::vector<double> moment_orders = {0.0, 1.0, 2.0};
    double dt_initial = 1e-4;
    double dt_max = 1e-2;
    double rel_tol = 1e-8;
    double safety = 0.9;
    double positivity_floor = 0.0;
    double loss_dt_cap = 0.5;
    double fixed_dt = 0.0;  // > 0 disables adaptivity and uses this step
    int threads = 1;
    bool probe_blowup = false;
    double blowup_factor = 100.0;
    bool snapshots = false;
    double wall_budget = 0.0;  // seconds; 0 = unlimited

    // validate
    std::vector<std::string> checks;  // empty = default suite
    double check_m = 2.0;             // order for the superlinear checks
    bool self_test = false;
    std::map<std::string, double> tolerance_overrides;

    double alpha_or_default() const { return alpha > 0.0 ? alpha : 0.5 * (nu + 1.0); }
    double p_or_default() const { return p > 0.0 ? p : 2.0 / (nu + 1.0); }
};

/// Parses and fully validates a configuration; reports every problem at once.
SimConfig parse_config(const std::string& text);

/// Canonical text form; parse(emit_config(c)) reproduces c.
std::string emit_config(const SimConfig& config);

// construction of the simulation objects described by a validated config
CollisionKernel make_collision_kernel(const SimConfig& config);
BreakageKernel make_breakage_kernel(const SimConfig& config);
Grid make_grid(const SimConfig& config);
InitialCondition make_initial_condition(const SimConfig& config);

}  // namespace nfrag

#endif  // NFRAG_CONFIG_HPP_
