#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

/// Runs the bundled executable, returns its exit code; output is discarded
/// so test logs stay readable.
int run_cli(const std::string& args) {
    const std::string cmd = std::string(TVPF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

/// Fresh scratch directory per test section.
fs::path scratch(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("tvpf_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

int count_lines(const std::string& text) {
    int n = 0;
    for (char ch : text) n += ch == '\n';
    return n;
}

}  // namespace

TEST_CASE("solve writes a parseable solution and reports convergence") {
    const fs::path out = scratch("solve");
    const int rc = run_cli("solve --case " + q(oracles::data_path("case5.m")) + " --out " + q(out));
    CHECK(rc == 0);
    REQUIRE(fs::exists(out / "solution.json"));
    const nlohmann::json j = nlohmann::json::parse(oracles::read_file((out / "solution.json").string()));
    CHECK(j["converged"] == true);
    CHECK(j["iterations"].get<int>() >= 1);
    CHECK(j["final_mismatch"].get<double>() <= 1e-10);
    CHECK(j["buses"].size() == 5);
}

TEST_CASE("solve accepts the literal flat start") {
    const fs::path out = scratch("flat");
    const int rc = run_cli("solve --case " + q(oracles::data_path("case5.m")) +
                           " --flat-start-literal --out " + q(out));
    CHECK(rc == 0);
}

TEST_CASE("malformed input and missing arguments exit with code 1") {
    CHECK(run_cli("solve --case " + q(oracles::data_path("bad_syntax.m"))) == 1);
    CHECK(run_cli("solve") == 1);                 // --case is required
    CHECK(run_cli("definitely-not-a-command") == 1);
    CHECK(run_cli("--help") == 0);
    const fs::path out = scratch("badinterval");
    CHECK(run_cli("norms --case " + q(oracles::data_path("case5.m")) + " --schedule " +
                  q(oracles::data_path("scenario5_1h.csv")) + " --interval 99 --out " + q(out)) == 1);
}

TEST_CASE("numerical failure modes exit with code 2") {
    // A load far beyond the transfer limit of its only line.
    const fs::path dir = scratch("hopeless");
    const fs::path case_path = dir / "hopeless.m";
    {
        std::ofstream f(case_path);
        f << "function mpc = hopeless\n"
             "mpc.baseMVA = 100;\n"
             "mpc.bus = [\n"
             " 1 1 5000 2000 0 0 1 1.0 0 345 1 1.1 0.9;\n"
             " 2 3 0 0 0 0 1 1.0 0 345 1 1.1 0.9;\n"
             "];\n"
             "mpc.gen = [\n"
             " 2 0 0 999 -999 1.0 100 1 999 0;\n"
             "];\n"
             "mpc.branch = [\n"
             " 2 1 0.01 0.1 0 0 0 0 0 0 1 -360 360;\n"
             "];\n";
    }
    CHECK(run_cli("solve --case " + q(case_path) + " --out " + q(dir)) == 2);

    // A variation target no schedule over this grid can satisfy.
    CHECK(run_cli("scenario --case " + q(oracles::data_path("case5.m")) +
                  " --seed 1 --variation 400 --out " + q(dir)) == 2);
}

TEST_CASE("trajectory over the bundled ramp validates below the accuracy target") {
    const fs::path out = scratch("traj5");
    const int rc = run_cli("trajectory --case " + q(oracles::data_path("case5.m")) +
                           " --schedule " + q(oracles::data_path("scenario5_1h.csv")) +
                           " --validate --out " + q(out));
    CHECK(rc == 0);
    for (const char* name : {"samples.csv", "branch_flows.csv", "errors.csv", "errors.json",
                             "run_manifest.json"})
        CHECK(fs::exists(out / name));

    const std::string samples = oracles::read_file((out / "samples.csv").string());
    CHECK(count_lines(samples) == 1 + 55);  // header + 11 instants x 5 buses

    const nlohmann::json errors =
        nlohmann::json::parse(oracles::read_file((out / "errors.json").string()));
    CHECK(errors["global_max"].get<double>() < 1e-4);
    CHECK(errors["total_comparisons"] == 55);
    CHECK(errors["excluded_samples"] == 0);

    const nlohmann::json manifest =
        nlohmann::json::parse(oracles::read_file((out / "run_manifest.json").string()));
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["total_newton_iterations"].get<int>() >= 2);
    CHECK(manifest["global_max_error"].get<double>() == errors["global_max"].get<double>());
    CHECK(manifest["files"].size() == 4);  // everything except the manifest itself
}

TEST_CASE("seeded runs are byte-reproducible and seeds matter") {
    const std::string common = "trajectory --case " + q(oracles::data_path("case5.m")) +
                               " --seed 5 --variation 0.8 --samples 5 --out ";
    const fs::path a = scratch("seed_a"), b = scratch("seed_b"), c = scratch("seed_c");
    CHECK(run_cli(common + q(a)) == 0);
    CHECK(run_cli(common + q(b)) == 0);
    for (const char* name : {"schedule.csv", "manifest.json", "samples.csv"})
        CHECK(oracles::read_file((a / name).string()) == oracles::read_file((b / name).string()));

    CHECK(run_cli("trajectory --case " + q(oracles::data_path("case5.m")) +
                  " --seed 6 --variation 0.8 --samples 5 --out " + q(c)) == 0);
    CHECK(oracles::read_file((a / "schedule.csv").string()) !=
          oracles::read_file((c / "schedule.csv").string()));
}

TEST_CASE("scenario regenerates the bundled day byte for byte") {
    const fs::path out = scratch("scen118");
    const int rc = run_cli("scenario --case " + q(oracles::data_path("case118.m")) +
                           " --seed 3 --variation 1.2 --out " + q(out));
    CHECK(rc == 0);
    CHECK(oracles::read_file((out / "schedule.csv").string()) ==
          oracles::read_file(oracles::data_path("scenario118_24h.csv")));
    const nlohmann::json manifest =
        nlohmann::json::parse(oracles::read_file((out / "manifest.json").string()));
    CHECK(manifest["seed"] == 3);
    CHECK(manifest["variation_fraction"].get<double>() == 1.2);
}

TEST_CASE("norm study emits the documented table in both formats") {
    const std::string common = "norms --case " + q(oracles::data_path("case5.m")) +
                               " --schedule " + q(oracles::data_path("scenario5_1h.csv")) +
                               " --max-order 6";
    const fs::path out_csv = scratch("norms_csv"), out_json = scratch("norms_json");

    CHECK(run_cli(common + " --out " + q(out_csv)) == 0);
    const std::string csv = oracles::read_file((out_csv / "norms.csv").string());
    CHECK(csv.rfind("order,measured_norm,prop2_bound,eq49_approx,gamma\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 6);  // header + one row per order

    CHECK(run_cli(common + " --format json --out " + q(out_json)) == 0);
    const nlohmann::json j =
        nlohmann::json::parse(oracles::read_file((out_json / "norms.json").string()));
    CHECK(j["norm"] == "2");
    CHECK(j["derivative_norms"].size() == 6);
    CHECK(j["rho"].get<double>() > 1.0);
}
