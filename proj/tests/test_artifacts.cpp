#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nfrag/artifacts.hpp"
#include "nfrag/io.hpp"
#include "nfrag/solver.hpp"

using namespace nfrag;

namespace {

SimConfig tiny_config() {
    SimConfig cfg;
    cfg.nu = -0.3;
    cfg.sigma1 = 0.1;
    cfg.sigma2 = 0.6;
    cfg.cells = 32;
    cfg.e1 = 1e-8;
    cfg.n = 16.0;
    cfg.horizon = 0.2;
    cfg.output_points = 5;
    cfg.moment_orders = {0.0, 0.5, 1.0, 2.0};
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("artifacts");

TEST_CASE("moments file layout and determinism across reruns") {
    const SimConfig cfg = tiny_config();
    const std::string a = moments_csv(integrate(cfg));
    const std::string b = moments_csv(integrate(cfg));
    CHECK(a == b);

    std::istringstream lines(a);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,mu_0,mu_0.5,mu_1,mu_2");
    int rows = 0;
    std::string row;
    while (std::getline(lines, row)) ++rows;
    CHECK(rows == cfg.output_points);
}

TEST_CASE("states file layout") {
    SimConfig cfg = tiny_config();
    cfg.snapshots = true;
    const auto run = integrate(cfg);
    const std::string csv = states_csv(run);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,cell,edge_lo,edge_hi,pivot,density");
    int rows = 0;
    std::string row;
    while (std::getline(lines, row)) ++rows;
    CHECK(rows == cfg.output_points * run.grid.size());
}

TEST_CASE("run artifacts land atomically with hashes in the manifest") {
    namespace fs = std::filesystem;
    SimConfig cfg = tiny_config();
    cfg.snapshots = true;
    const auto dir = (fs::temp_directory_path() / "nfrag_artifacts_test").string();
    const auto run = integrate(cfg);
    const auto files = write_run_artifacts(run, cfg, dir);
    REQUIRE(files.size() == 3);

    const auto manifest = nlohmann::json::parse(read_file(dir + "/manifest.json"));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["files"]["moments.csv"] ==
          git_blob_hash(read_file(dir + "/moments.csv")));
    CHECK(manifest["files"]["states.csv"] ==
          git_blob_hash(read_file(dir + "/states.csv")));
    CHECK(manifest.contains("t_star"));
    CHECK(manifest["mu0_initial"].get<double>() > 0.0);

    // the config echo reparses to the same canonical form
    const SimConfig echoed = parse_config(manifest["config"].get<std::string>());
    CHECK(emit_config(echoed) == emit_config(cfg));
}

TEST_CASE("validation report serializes every check with a verdict") {
    SimConfig cfg = tiny_config();
    cfg.checks = {"mass_conservation", "positivity", "t_star"};
    const auto rep = run_validation(cfg);
    const auto j = nlohmann::json::parse(report_json(rep, emit_config(cfg)));
    CHECK(j["all_passed"] == true);
    CHECK(j["horizon_classification"] == "finite");  // gamma > 2, sigma < 1
    REQUIRE(j["checks"].size() == 3);
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("name"));
        CHECK(c.contains("identity"));
        CHECK(c.contains("tolerance"));
        CHECK(c.contains("max_violation"));
        CHECK((c["verdict"] == "pass" || c["verdict"] == "fail"));
    }
}

TEST_SUITE_END();
