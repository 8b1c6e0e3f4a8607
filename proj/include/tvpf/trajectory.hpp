#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tvpf/case_model.hpp"
#include "tvpf/interval.hpp"
#include "tvpf/powerflow.hpp"

namespace tvpf {

/// Piecewise-linear injection schedule: breakpoint times (strictly
/// increasing, hours) and the full injection target at each breakpoint.
struct InjectionSchedule {
    std::vector<double> times;
    std::vector<InjectionTarget> targets;

    int breakpoint_count() const { return static_cast<int>(times.size()); }
};

/// Splits the schedule into its linear segments. Throws NonMonotonicTimes
/// or LayoutMismatch.
std::vector<LinearTimeInterval> partition(const InjectionSchedule& schedule);

/// Newton solutions at every breakpoint. The first solve starts flat; each
/// subsequent one is warm-started by first-order extrapolation from the
/// previous breakpoint (or flat again when warm_start is false, for
/// comparison runs). NonConvergence is rethrown with the breakpoint index.
/// total_iterations, when non-null, accumulates Newton iteration counts.
std::vector<PowerFlowSolution> solve_discrete_points(const Case& c,
                                                     const std::vector<LinearTimeInterval>& intervals,
                                                     const NewtonOptions& options = {},
                                                     bool warm_start = true,
                                                     int* total_iterations = nullptr);

/// The full per-interval evaluation result.
struct Trajectory {
    std::vector<IntervalSolution> interval_solutions;
    std::vector<PowerFlowSolution> breakpoint_solutions;
    int points_per_interval = 11;
    /// samples[l][s]: blended evaluation at sample s of interval l; the grid
    /// is equidistant and includes both endpoints, so samples[l].back() and
    /// samples[l+1].front() describe the same instant.
    std::vector<std::vector<VoltageState>> samples;
    int total_newton_iterations = 0;
};

/// Equidistant sample times for one interval, endpoints exact.
std::vector<double> sample_times(const LinearTimeInterval& interval, int points_per_interval);

/// Runs the whole pipeline: breakpoint solves (warm-start chain), one
/// first-derivative pair per breakpoint (left and right slopes share the
/// breakpoint's Jacobian factorization), per-interval blended evaluation on
/// the sample grid.
Trajectory run_time_varying(const Case& c, const InjectionSchedule& schedule,
                            int points_per_interval = 11, const NewtonOptions& options = {});

/// Branch-level quantities recovered from a voltage state.
struct BranchFlow {
    int branch_index = 0;
    std::complex<double> i_from;  // p.u., into the branch at the from side
    std::complex<double> i_to;
    std::complex<double> s_from;  // p.u., v_from * conj(i_from)
    std::complex<double> s_to;
    double time_hours = 0.0;
};

std::vector<BranchFlow> branch_flows(const Case& c, const VoltageState& state);

/// Per-interval worst-case deviation between blended samples and exact
/// Newton solves at the same instants.
struct IntervalError {
    int interval = 0;          // 1-based interval index
    double max_err_real = 0.0;
    double max_err_imag = 0.0;
    int argmax_bus = 0;        // external bus id of the worst deviation
    double argmax_time = 0.0;  // hours
    int comparisons = 0;       // compared values: included samples x bus count
    int excluded_samples = 0;  // reference solves that failed to converge
};

struct ErrorReport {
    std::vector<IntervalError> intervals;
    double global_max = 0.0;
    int total_comparisons = 0;  // converged unique samples x bus count
    int excluded_samples = 0;
    std::vector<std::string> warnings;
};

/// Reference validation: exact Newton at every unique grid instant
/// (warm-started from the trajectory's own sample), compared against the
/// blended samples. A non-converging reference solve excludes that sample
/// and is flagged in warnings rather than failing the run.
ErrorReport validate(const Case& c, const Trajectory& trajectory,
                     const NewtonOptions& options = {});

// ---------------------------------------------------------------------------
// Scenario generation
// ---------------------------------------------------------------------------

struct VreOptions {
    int wind_units = 20;
    int solar_units = 10;
    double vre_share = 0.30;      // nameplate VRE capacity / total base demand
    double wind_fraction = 0.60;  // wind share of the VRE capacity
    int breakpoints = 25;
    double horizon_hours = 24.0;
};

struct VreUnit {
    std::string kind;  // "wind" or "solar"
    int bus = 0;       // external bus id
    double capacity = 0.0;  // p.u.
};

struct ScenarioManifest {
    std::uint64_t seed = 0;
    double variation_fraction = 0.0;
    double vre_share = 0.0;
    double wind_fraction = 0.0;
    double total_base_demand = 0.0;  // p.u., sum of positive net demands
    double applied_scale = 0.0;      // deviation scale chosen to hit the variation
    double total_p_variation = 0.0;  // sum over intervals and buses of |dP|
    std::vector<VreUnit> units;
};

struct GeneratedScenario {
    InjectionSchedule schedule;
    ScenarioManifest manifest;
};

/// Deterministic synthetic day: smooth per-bus load shapes with opposed P/Q
/// trends plus wind/solar injections on seeded PQ buses, all deviations
/// scaled so that the summed |dP| across the horizon exceeds
/// variation_fraction x total base demand. Every breakpoint is checked to be
/// solvable; a diverging one raises InfeasibleScenario.
GeneratedScenario generate_scenario(const Case& c, std::uint64_t seed, double variation_fraction,
                                    const VreOptions& options = {});

std::string manifest_to_json(const ScenarioManifest& manifest);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Schedule CSV: header time_hours,bus,p_pu,q_pu; one row per breakpoint and
/// bus, injections positive, bus order matching the case.
std::string schedule_to_csv(const Case& c, const InjectionSchedule& schedule);

/// Inverse of schedule_to_csv. Reactive values on PV buses are ignored with
/// a warning (their magnitude targets come from the case). Throws
/// MalformedSchedule, NonMonotonicTimes, or LayoutMismatch.
InjectionSchedule schedule_from_csv(const Case& c, const std::string& text,
                                    std::vector<std::string>* warnings = nullptr);

InjectionSchedule load_schedule_file(const Case& c, const std::string& path,
                                     std::vector<std::string>* warnings = nullptr);

/// Sample CSV: header time_hours,bus,v_real,v_imag,v_mag,method. One row per
/// (sample, bus); method tags which evaluator produced the row.
std::string samples_to_csv(const Case& c,
                           const std::vector<std::pair<std::string, const VoltageState*>>& rows);

std::string branch_flows_to_csv(const Case& c, const std::vector<BranchFlow>& flows);

std::string error_report_to_csv(const ErrorReport& report);
std::string error_report_to_json(const ErrorReport& report);

}  // namespace tvpf
