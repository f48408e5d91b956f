// Runs a configuration and evaluates every enabled bound check against it.

#ifndef NFRAG_VALIDATION_HPP_
#define NFRAG_VALIDATION_HPP_

#include <string>
#include <vector>

#include "nfrag/config.hpp"
#include "nfrag/moments.hpp"
#include "nfrag/solver.hpp"

namespace nfrag {

struct ValidationReport {
    std::vector<BoundReport> checks;
    bool all_passed = false;
    double t_star_value = 0.0;
    std::string horizon_classification;
    RunResult run;
};

/// The checks enabled by `validate.checks = default` for this configuration.
std::vector<std::string> default_checks(const SimConfig& config);

/// Moment orders the given checks require, merged with the configured ones.
std::vector<double> required_moment_orders(const SimConfig& config,
                                           const std::vector<std::string>& checks);

ValidationReport run_validation(const SimConfig& config);

/// Evaluates the named checks on an existing run (no re-integration).
ValidationReport evaluate_checks(const SimConfig& config, const RunResult& run,
                                 const std::vector<std::string>& checks);

}  // namespace nfrag

#endif  // NFRAG_VALIDATION_HPP_
