// Command-line front end: static solves, time-varying trajectory runs,
// derivative-norm studies, and synthetic schedule generation. Data goes to
// files under --out (or stdout with --stdout); diagnostics go to stderr.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvpf/case_model.hpp"
#include "tvpf/derivatives.hpp"
#include "tvpf/errors.hpp"
#include "tvpf/interval.hpp"
#include "tvpf/norms.hpp"
#include "tvpf/powerflow.hpp"
#include "tvpf/trajectory.hpp"

namespace {

struct RunConfig {
    std::string case_path;
    std::string schedule_path;
    std::uint64_t seed = 42;
    bool seed_given = false;
    double variation = 1.0;
    int samples = 11;
    std::string norm = "2";
    int max_order = 8;
    double tolerance = 1e-10;
    bool validate = false;
    std::string out_dir = ".";
    std::string format = "csv";
    bool flat_start_literal = false;
    bool to_stdout = false;
    int interval_index = 1;  // 1-based, matching the error-report convention
};

void write_artifact(const RunConfig& cfg, const std::string& filename, const std::string& content,
                    std::vector<std::string>& written) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / filename;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tvpf::Error("cannot write " + path.string());
    out << content;
    written.push_back(path.string());
}

tvpf::Case load_case(const RunConfig& cfg) {
    if (cfg.case_path.empty()) throw tvpf::Error("--case is required");
    tvpf::Case c = tvpf::load_case_file(cfg.case_path);
    for (const std::string& w : tvpf::validate_case(c)) std::cerr << "warning: " << w << "\n";
    return c;
}

/// Schedule from --schedule, or generated from --seed/--variation.
tvpf::InjectionSchedule load_or_generate_schedule(const RunConfig& cfg, const tvpf::Case& c,
                                                  tvpf::ScenarioManifest* manifest_out) {
    if (!cfg.schedule_path.empty()) {
        std::vector<std::string> warnings;
        tvpf::InjectionSchedule s = tvpf::load_schedule_file(c, cfg.schedule_path, &warnings);
        for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
        return s;
    }
    if (!cfg.seed_given)
        throw tvpf::Error("either --schedule or --seed (scenario generation) is required");
    tvpf::GeneratedScenario gen = tvpf::generate_scenario(c, cfg.seed, cfg.variation);
    if (manifest_out != nullptr) *manifest_out = gen.manifest;
    return gen.schedule;
}

tvpf::NewtonOptions newton_options(const RunConfig& cfg) {
    tvpf::NewtonOptions opts;
    opts.tolerance = cfg.tolerance;
    opts.flat_start_literal = cfg.flat_start_literal;
    return opts;
}

int cmd_solve(const RunConfig& cfg) {
    const tvpf::Case c = load_case(cfg);
    const tvpf::AdmittanceMatrix y = tvpf::build_ybus(c);
    const tvpf::PowerFlowSolution sol = tvpf::solve_powerflow(c, newton_options(cfg));
    const std::string json = tvpf::solution_to_json(c, y, sol);
    std::cerr << "converged in " << sol.iterations << " iterations, mismatch "
              << sol.final_mismatch << "\n";
    if (cfg.to_stdout) {
        std::cout << json << "\n";
    } else {
        std::vector<std::string> written;
        write_artifact(cfg, "solution.json", json, written);
        for (const std::string& p : written) std::cerr << "wrote " << p << "\n";
    }
    return 0;
}

int cmd_trajectory(const RunConfig& cfg) {
    const tvpf::Case c = load_case(cfg);
    tvpf::ScenarioManifest manifest;
    const tvpf::InjectionSchedule schedule = load_or_generate_schedule(cfg, c, &manifest);

    std::vector<std::string> written;
    nlohmann::json run;
    run["status"] = "incomplete";

    try {
        const tvpf::Trajectory traj =
            tvpf::run_time_varying(c, schedule, cfg.samples, newton_options(cfg));

        std::vector<std::pair<std::string, const tvpf::VoltageState*>> rows;
        for (std::size_t l = 0; l < traj.samples.size(); ++l)
            for (std::size_t s = (l == 0 ? 0 : 1); s < traj.samples[l].size(); ++s)
                rows.emplace_back("combined", &traj.samples[l][s]);

        std::string flows_csv;
        {
            std::vector<tvpf::BranchFlow> all;
            for (const tvpf::PowerFlowSolution& sol : traj.breakpoint_solutions) {
                const std::vector<tvpf::BranchFlow> f = tvpf::branch_flows(c, sol.state);
                all.insert(all.end(), f.begin(), f.end());
            }
            flows_csv = tvpf::branch_flows_to_csv(c, all);
        }

        tvpf::ErrorReport report;
        std::vector<tvpf::VoltageState> newton_rows;
        if (cfg.validate) {
            report = tvpf::validate(c, traj, newton_options(cfg));
            for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
            std::cerr << "validation: global max error " << report.global_max << " over "
                      << report.total_comparisons << " comparisons\n";
        }

        const std::string samples_csv = tvpf::samples_to_csv(c, rows);
        if (cfg.to_stdout) {
            std::cout << samples_csv;
        } else {
            write_artifact(cfg, "samples.csv", samples_csv, written);
            write_artifact(cfg, "branch_flows.csv", flows_csv, written);
            if (cfg.validate) {
                write_artifact(cfg, "errors.csv", tvpf::error_report_to_csv(report), written);
                write_artifact(cfg, "errors.json", tvpf::error_report_to_json(report), written);
            }
            if (cfg.schedule_path.empty()) {
                write_artifact(cfg, "schedule.csv", tvpf::schedule_to_csv(c, schedule), written);
                write_artifact(cfg, "manifest.json", tvpf::manifest_to_json(manifest), written);
            }
        }
        run["status"] = "complete";
        run["total_newton_iterations"] = traj.total_newton_iterations;
        if (cfg.validate) run["global_max_error"] = report.global_max;
    } catch (...) {
        if (!cfg.to_stdout) {
            run["files"] = written;
            std::vector<std::string> ignore;
            write_artifact(cfg, "run_manifest.json", run.dump(2), ignore);
        }
        throw;
    }
    if (!cfg.to_stdout) {
        run["files"] = written;
        std::vector<std::string> ignore;
        write_artifact(cfg, "run_manifest.json", run.dump(2), ignore);
        for (const std::string& p : written) std::cerr << "wrote " << p << "\n";
    }
    return 0;
}

int cmd_norms(const RunConfig& cfg) {
    const tvpf::Case c = load_case(cfg);
    const tvpf::InjectionSchedule schedule = load_or_generate_schedule(cfg, c, nullptr);
    const std::vector<tvpf::LinearTimeInterval> intervals = tvpf::partition(schedule);
    if (cfg.interval_index < 1 || cfg.interval_index > static_cast<int>(intervals.size()))
        throw tvpf::Error("--interval must be in 1.." + std::to_string(intervals.size()));

    const tvpf::AdmittanceMatrix y = tvpf::build_ybus(c);
    const tvpf::BusSets sets = tvpf::BusSets::from_case(c);
    const std::vector<tvpf::PowerFlowSolution> points =
        tvpf::solve_discrete_points(c, intervals, newton_options(cfg));

    const std::size_t l = static_cast<std::size_t>(cfg.interval_index - 1);
    const tvpf::NormReport report =
        tvpf::build_norm_report(y, sets, points[l].state, intervals[l].slope, cfg.max_order,
                                tvpf::norm_kind_from_string(cfg.norm));

    const std::string content = cfg.format == "json" ? tvpf::norm_report_to_json(report)
                                                     : tvpf::norm_report_to_csv(report);
    if (cfg.to_stdout) {
        std::cout << content;
    } else {
        std::vector<std::string> written;
        write_artifact(cfg, cfg.format == "json" ? "norms.json" : "norms.csv", content, written);
        for (const std::string& p : written) std::cerr << "wrote " << p << "\n";
    }
    return 0;
}

int cmd_scenario(const RunConfig& cfg) {
    const tvpf::Case c = load_case(cfg);
    const tvpf::GeneratedScenario gen = tvpf::generate_scenario(c, cfg.seed, cfg.variation);
    const std::string csv = tvpf::schedule_to_csv(c, gen.schedule);
    if (cfg.to_stdout) {
        std::cout << csv;
    } else {
        std::vector<std::string> written;
        write_artifact(cfg, "schedule.csv", csv, written);
        write_artifact(cfg, "manifest.json", tvpf::manifest_to_json(gen.manifest), written);
        for (const std::string& p : written) std::cerr << "wrote " << p << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-varying AC power-flow toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--case", cfg.case_path, "network case file (MATPOWER subset or JSON)")
            ->required();
        sub->add_option("--tol", cfg.tolerance, "Newton residual tolerance (infinity norm)");
        sub->add_flag("--flat-start-literal", cfg.flat_start_literal,
                      "start every non-slack bus at exactly 1+0j");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_flag("--stdout", cfg.to_stdout, "primary artifact to standard output");
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };
    auto add_schedule = [&](CLI::App* sub) {
        sub->add_option("--schedule", cfg.schedule_path, "schedule CSV (time_hours,bus,p_pu,q_pu)");
        sub->add_option("--seed", cfg.seed, "scenario seed (generates a schedule)")
            ->each([&](const std::string&) { cfg.seed_given = true; });
        sub->add_option("--variation", cfg.variation,
                        "total |dP| over the horizon as a fraction of base demand");
    };

    CLI::App* solve = app.add_subcommand("solve", "single static power-flow solve");
    add_common(solve);

    CLI::App* traj = app.add_subcommand("trajectory", "time-varying run over a schedule");
    add_common(traj);
    add_schedule(traj);
    traj->add_option("--samples", cfg.samples, "sample points per interval, endpoints included")
        ->check(CLI::Range(2, 1000000));
    traj->add_flag("--validate", cfg.validate, "compare against exact solves at every sample");

    CLI::App* norms = app.add_subcommand("norms", "derivative norm study at an interval start");
    add_common(norms);
    add_schedule(norms);
    norms->add_option("--norm", cfg.norm, "vector/matrix norm")
        ->check(CLI::IsMember({"1", "2", "inf"}));
    norms->add_option("--max-order", cfg.max_order, "highest derivative order")
        ->check(CLI::Range(1, 16));
    norms->add_option("--interval", cfg.interval_index, "1-based interval index");

    CLI::App* scen = app.add_subcommand("scenario", "generate a synthetic day schedule");
    add_common(scen);
    scen->add_option("--seed", cfg.seed, "deterministic seed")
        ->each([&](const std::string&) { cfg.seed_given = true; });
    scen->add_option("--variation", cfg.variation,
                     "total |dP| over the horizon as a fraction of base demand");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's assorted parse-error codes onto the documented
        // input-error code; --help and --version stay 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (traj->parsed()) return cmd_trajectory(cfg);
        if (norms->parsed()) return cmd_norms(cfg);
        if (scen->parsed()) return cmd_scenario(cfg);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const tvpf::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tvpf::SingularJacobian& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tvpf::InfeasibleScenario& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const tvpf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
