// Serialization of run outputs: moments CSV, state snapshots, manifest,
// validation report and the constants table.

#ifndef NFRAG_ARTIFACTS_HPP_
#define NFRAG_ARTIFACTS_HPP_

#include <string>
#include <vector>

#include "nfrag/kernels.hpp"
#include "nfrag/solver.hpp"
#include "nfrag/validation.hpp"

namespace nfrag {

std::string moments_csv(const RunResult& result);
std::string states_csv(const RunResult& result);

/// Run manifest: config echo, content hashes of the written files, status,
/// wall time and step counts.
std::string manifest_json(const RunResult& result, const std::string& config_text,
                          const std::vector<std::pair<std::string, std::string>>&
                              file_hashes);

std::string report_json(const ValidationReport& report, const std::string& config_text);

/// name,value,definition rows for every populated constant; the per-order
/// rows are labeled with their m (kappa_2, C_2, varsigma_2, ...).
std::string constants_table(double nu, const std::vector<double>& m_list,
                            double sigma1, double alpha, double p);

/// Writes moments.csv (and states.csv when configured) plus manifest.json
/// into outdir; returns the written file names.
std::vector<std::string> write_run_artifacts(const RunResult& result,
                                             const SimConfig& config,
                                             const std::string& outdir);

}  // namespace nfrag

#endif  // NFRAG_ARTIFACTS_HPP_
