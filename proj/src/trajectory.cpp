#include "tvpf/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "tvpf/derivatives.hpp"
#include "tvpf/errors.hpp"
#include "tvpf/kernels.hpp"

namespace tvpf {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<LinearTimeInterval> partition(const InjectionSchedule& schedule) {
    const int m = schedule.breakpoint_count();
    if (m < 2) throw EmptyInput();
    if (static_cast<int>(schedule.targets.size()) != m)
        throw LayoutMismatch("schedule times and targets differ in length");
    std::vector<LinearTimeInterval> intervals;
    intervals.reserve(static_cast<std::size_t>(m - 1));
    for (int l = 0; l + 1 < m; ++l) {
        if (!(schedule.times[l + 1] > schedule.times[l]))
            throw NonMonotonicTimes("breakpoint times must be strictly increasing at index " +
                                    std::to_string(l + 1));
        intervals.push_back(make_interval(schedule.times[l], schedule.times[l + 1],
                                          schedule.targets[l], schedule.targets[l + 1]));
    }
    return intervals;
}

std::vector<PowerFlowSolution> solve_discrete_points(const Case& c,
                                                     const std::vector<LinearTimeInterval>& intervals,
                                                     const NewtonOptions& options, bool warm_start,
                                                     int* total_iterations) {
    if (intervals.empty()) throw EmptyInput();
    const AdmittanceMatrix y = build_ybus(c);
    const BusSets sets = BusSets::from_case(c);
    const VoltageState flat = flat_start(c, sets, options.flat_start_literal);

    std::vector<PowerFlowSolution> solutions;
    solutions.reserve(intervals.size() + 1);
    int iters = 0;

    auto solve_at = [&](const InjectionTarget& target, const VoltageState& start, double t,
                        std::size_t breakpoint) {
        try {
            PowerFlowSolution sol = solve_powerflow(y, sets, target, start, options);
            sol.state.time_hours = t;
            iters += sol.iterations;
            solutions.push_back(std::move(sol));
        } catch (const NonConvergence& e) {
            throw NonConvergence(e.iterations, e.final_mismatch,
                                 "breakpoint " + std::to_string(breakpoint) +
                                     " (t=" + std::to_string(t) + " h)");
        }
    };

    solve_at(intervals.front().y_start, flat, intervals.front().t_start, 0);
    for (std::size_t l = 0; l < intervals.size(); ++l) {
        const VoltageState& prev = solutions.back().state;
        VoltageState guess = flat;
        if (warm_start) {
            const Vec d1 = first_derivative(y, sets, prev, intervals[l].slope);
            guess = evaluate_linear(prev, d1, intervals[l].t_end);
        }
        solve_at(intervals[l].y_end, guess, intervals[l].t_end, l + 1);
    }
    if (total_iterations != nullptr) *total_iterations = iters;
    return solutions;
}

std::vector<double> sample_times(const LinearTimeInterval& interval, int points_per_interval) {
    if (points_per_interval < 2) throw OutOfRange("need at least 2 sample points per interval");
    std::vector<double> ts(static_cast<std::size_t>(points_per_interval));
    const double step = interval.length() / static_cast<double>(points_per_interval - 1);
    for (int s = 0; s < points_per_interval; ++s)
        ts[static_cast<std::size_t>(s)] = interval.t_start + step * static_cast<double>(s);
    ts.back() = interval.t_end;  // endpoint exact regardless of rounding
    return ts;
}

Trajectory run_time_varying(const Case& c, const InjectionSchedule& schedule,
                            int points_per_interval, const NewtonOptions& options) {
    const std::vector<LinearTimeInterval> intervals = partition(schedule);
    const AdmittanceMatrix y = build_ybus(c);
    const BusSets sets = BusSets::from_case(c);
    const std::size_t m = intervals.size();

    Trajectory traj;
    traj.points_per_interval = points_per_interval;
    traj.breakpoint_solutions.reserve(m + 1);

    // Warm-start chain over breakpoints. Each breakpoint's Jacobian is
    // factored once and serves both adjacent intervals' first derivatives
    // (their slopes differ, the matrix does not).
    std::vector<Vec> d1_right(m);     // derivative at breakpoint l under interval l's slope
    std::vector<Vec> d1_left(m + 1);  // derivative at breakpoint l under interval l-1's slope

    const VoltageState flat = flat_start(c, sets, options.flat_start_literal);
    auto solve_at = [&](const InjectionTarget& target, const VoltageState& start, double t,
                        std::size_t breakpoint) {
        try {
            PowerFlowSolution sol = solve_powerflow(y, sets, target, start, options);
            sol.state.time_hours = t;
            traj.total_newton_iterations += sol.iterations;
            traj.breakpoint_solutions.push_back(std::move(sol));
        } catch (const NonConvergence& e) {
            throw NonConvergence(e.iterations, e.final_mismatch,
                                 "breakpoint " + std::to_string(breakpoint) +
                                     " (t=" + std::to_string(t) + " h)");
        }
    };

    solve_at(intervals[0].y_start, flat, intervals[0].t_start, 0);
    for (std::size_t l = 0; l <= m; ++l) {
        const VoltageState& here = traj.breakpoint_solutions[l].state;
        const Matrix jac = assemble_jacobian(y, sets, here);
        const LuFactor lu(jac);
        if (l > 0)
            d1_left[l] = embed_stacked(sets, lu.solve_refined(jac, intervals[l - 1].slope.rhs(sets)));
        if (l < m) {
            d1_right[l] = embed_stacked(sets, lu.solve_refined(jac, intervals[l].slope.rhs(sets)));
            const VoltageState guess = evaluate_linear(here, d1_right[l], intervals[l].t_end);
            solve_at(intervals[l].y_end, guess, intervals[l].t_end, l + 1);
        }
    }

    traj.interval_solutions.reserve(m);
    traj.samples.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
        traj.interval_solutions.push_back(interval_solution_from_endpoints(
            intervals[l], traj.breakpoint_solutions[l].state,
            traj.breakpoint_solutions[l + 1].state, d1_right[l], d1_left[l + 1]));
        const std::vector<double> ts = sample_times(intervals[l], points_per_interval);
        traj.samples[l].reserve(ts.size());
        for (double t : ts) traj.samples[l].push_back(evaluate_combined(traj.interval_solutions[l], t));
    }
    return traj;
}

std::vector<BranchFlow> branch_flows(const Case& c, const VoltageState& state) {
    std::vector<BranchFlow> flows;
    flows.reserve(c.branches.size());
    for (std::size_t idx = 0; idx < c.branches.size(); ++idx) {
        const Branch& br = c.branches[idx];
        BranchFlow flow;
        flow.branch_index = static_cast<int>(idx);
        flow.time_hours = state.time_hours;
        if (br.status) {
            const int f = c.bus_index(br.from_bus);
            const int t = c.bus_index(br.to_bus);
            const std::complex<double> vf(state.v_real[f], state.v_imag[f]);
            const std::complex<double> vt(state.v_real[t], state.v_imag[t]);
            const std::complex<double> ys =
                1.0 / std::complex<double>(br.series_resistance, br.series_reactance);
            const std::complex<double> ysh(0.0, br.total_charging_susceptance / 2.0);
            const std::complex<double> tap = std::polar(br.tap_ratio, br.phase_shift);
            // Same pi-model as the admittance assembly.
            flow.i_from = (ys + ysh) / (br.tap_ratio * br.tap_ratio) * vf - ys / std::conj(tap) * vt;
            flow.i_to = -ys / tap * vf + (ys + ysh) * vt;
            flow.s_from = vf * std::conj(flow.i_from);
            flow.s_to = vt * std::conj(flow.i_to);
        }
        flows.push_back(flow);
    }
    return flows;
}

ErrorReport validate(const Case& c, const Trajectory& trajectory, const NewtonOptions& options) {
    const AdmittanceMatrix y = build_ybus(c);
    const BusSets sets = BusSets::from_case(c);
    const int n = c.bus_count();
    const int s_count = trajectory.points_per_interval;
    const std::size_t m = trajectory.interval_solutions.size();

    ErrorReport report;

    // Exact Newton at each unique instant; interior breakpoints are shared
    // between neighbors and solved once. Index (l, s) maps to l*(S-1)+s.
    std::vector<std::optional<VoltageState>> refs(m * static_cast<std::size_t>(s_count - 1) + 1);
    for (std::size_t l = 0; l < m; ++l) {
        const LinearTimeInterval& iv = trajectory.interval_solutions[l].interval;
        const std::vector<double> ts = sample_times(iv, s_count);
        for (int s = (l == 0 ? 0 : 1); s < s_count; ++s) {
            const std::size_t u = l * static_cast<std::size_t>(s_count - 1) + static_cast<std::size_t>(s);
            const InjectionTarget target = injections_at(iv, ts[static_cast<std::size_t>(s)]);
            try {
                PowerFlowSolution sol = solve_powerflow(
                    y, sets, target, trajectory.samples[l][static_cast<std::size_t>(s)], options);
                sol.state.time_hours = ts[static_cast<std::size_t>(s)];
                refs[u] = std::move(sol.state);
                report.total_comparisons += n;
            } catch (const NonConvergence&) {
                ++report.excluded_samples;
                report.warnings.push_back("reference solve failed at t=" +
                                          fmt(ts[static_cast<std::size_t>(s)]) +
                                          " h; sample excluded");
            }
        }
    }

    for (std::size_t l = 0; l < m; ++l) {
        const LinearTimeInterval& iv = trajectory.interval_solutions[l].interval;
        const std::vector<double> ts = sample_times(iv, s_count);
        IntervalError ie;
        ie.interval = static_cast<int>(l) + 1;
        double worst = -1.0;
        for (int s = 0; s < s_count; ++s) {
            const std::size_t u = l * static_cast<std::size_t>(s_count - 1) + static_cast<std::size_t>(s);
            if (!refs[u].has_value()) {
                ++ie.excluded_samples;
                continue;
            }
            ie.comparisons += n;
            const VoltageState& ref = *refs[u];
            const VoltageState& got = trajectory.samples[l][static_cast<std::size_t>(s)];
            for (int i = 0; i < n; ++i) {
                const double er = std::fabs(got.v_real[i] - ref.v_real[i]);
                const double ei = std::fabs(got.v_imag[i] - ref.v_imag[i]);
                ie.max_err_real = std::max(ie.max_err_real, er);
                ie.max_err_imag = std::max(ie.max_err_imag, ei);
                if (std::max(er, ei) > worst) {
                    worst = std::max(er, ei);
                    ie.argmax_bus = c.buses[i].id;
                    ie.argmax_time = ts[static_cast<std::size_t>(s)];
                }
            }
        }
        report.global_max = std::max(report.global_max, std::max(ie.max_err_real, ie.max_err_imag));
        report.intervals.push_back(ie);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Scenario generation
// ---------------------------------------------------------------------------

namespace {

// Deterministic uniform in [0, 1): fixed mapping so schedules reproduce
// bit-for-bit across platforms and standard-library versions.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

GeneratedScenario generate_scenario(const Case& c, std::uint64_t seed, double variation_fraction,
                                    const VreOptions& options) {
    if (variation_fraction < 0.0) throw OutOfRange("variation fraction must be >= 0");
    if (options.breakpoints < 2) throw OutOfRange("scenario needs at least 2 breakpoints");

    const BusSets sets = BusSets::from_case(c);
    const InjectionTarget base = base_injections(c);
    const int n = c.bus_count();
    const double horizon = options.horizon_hours;

    double total_demand = 0.0;
    for (int i = 0; i < n; ++i) total_demand += std::max(c.buses[i].p_demand, 0.0);

    std::mt19937_64 rng(seed);

    // --- VRE placement over PQ buses ------------------------------------
    const int wind_units = std::min<int>(options.wind_units, static_cast<int>(sets.pq.size()));
    const int solar_units = std::min<int>(options.solar_units, static_cast<int>(sets.pq.size()));
    auto draw_buses = [&](int count) {
        std::vector<int> pool = sets.pq;
        std::vector<int> picked;
        for (int u = 0; u < count; ++u) {
            const std::size_t j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pool.size()));
            picked.push_back(pool[std::min(j, pool.size() - 1)]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(std::min(j, pool.size() - 1)));
        }
        return picked;
    };
    const std::vector<int> wind_buses = draw_buses(wind_units);
    const std::vector<int> solar_buses = draw_buses(solar_units);

    // Nameplate capacities: randomized weights normalized so wind and solar
    // sum to their exact shares of vre_share * total demand.
    auto capacities = [&](int count, double group_total) {
        std::vector<double> caps(static_cast<std::size_t>(count));
        double sum = 0.0;
        for (double& w : caps) {
            w = 0.75 + 0.5 * uniform01(rng);
            sum += w;
        }
        for (double& w : caps) w *= (sum > 0.0 ? group_total / sum : 0.0);
        return caps;
    };
    const double vre_total = options.vre_share * total_demand;
    const std::vector<double> wind_caps = capacities(wind_units, vre_total * options.wind_fraction);
    const std::vector<double> solar_caps =
        capacities(solar_units, vre_total * (1.0 - options.wind_fraction));

    // --- Per-bus load shapes (opposed P/Q trends by construction) -------
    std::vector<double> phase1(static_cast<std::size_t>(n)), phase2(static_cast<std::size_t>(n)),
        amp1(static_cast<std::size_t>(n)), amp2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        phase1[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * uniform01(rng);
        phase2[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * uniform01(rng);
        amp1[static_cast<std::size_t>(i)] = 0.6 + 0.4 * uniform01(rng);
        amp2[static_cast<std::size_t>(i)] = 0.25 + 0.25 * uniform01(rng);
    }
    auto shape = [&](int i, double t) {
        const double w = 2.0 * std::numbers::pi * t / horizon;
        return amp1[static_cast<std::size_t>(i)] * std::sin(w + phase1[static_cast<std::size_t>(i)]) +
               amp2[static_cast<std::size_t>(i)] * std::sin(2.0 * w + phase2[static_cast<std::size_t>(i)]);
    };

    std::vector<double> wind_phase1(static_cast<std::size_t>(wind_units)),
        wind_phase2(static_cast<std::size_t>(wind_units));
    for (int u = 0; u < wind_units; ++u) {
        wind_phase1[static_cast<std::size_t>(u)] = 2.0 * std::numbers::pi * uniform01(rng);
        wind_phase2[static_cast<std::size_t>(u)] = 2.0 * std::numbers::pi * uniform01(rng);
    }
    auto wind_profile = [&](int u, double t) {
        const double w = 2.0 * std::numbers::pi * t / horizon;
        const double v = 0.45 + 0.35 * std::sin(w + wind_phase1[static_cast<std::size_t>(u)]) +
                         0.20 * std::sin(2.0 * w + wind_phase2[static_cast<std::size_t>(u)]);
        return std::clamp(v, 0.0, 1.0);
    };
    std::vector<double> solar_jitter(static_cast<std::size_t>(solar_units));
    for (int u = 0; u < solar_units; ++u)
        solar_jitter[static_cast<std::size_t>(u)] = 0.8 + 0.2 * uniform01(rng);
    auto solar_profile = [&](int u, double t) {
        // Daylight bell over the middle half of the horizon.
        const double x = (t - 0.25 * horizon) / (0.5 * horizon);
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::pow(std::sin(std::numbers::pi * x), 1.5) * solar_jitter[static_cast<std::size_t>(u)];
    };

    // --- Raw deviations at each breakpoint -------------------------------
    const int bp = options.breakpoints;
    std::vector<double> times(static_cast<std::size_t>(bp));
    for (int l = 0; l < bp; ++l)
        times[static_cast<std::size_t>(l)] = horizon * static_cast<double>(l) / static_cast<double>(bp - 1);
    times.back() = horizon;

    Matrix dev_p(static_cast<std::size_t>(bp), static_cast<std::size_t>(n));
    Matrix dev_q(static_cast<std::size_t>(bp), static_cast<std::size_t>(n));
    for (int l = 0; l < bp; ++l) {
        const double t = times[static_cast<std::size_t>(l)];
        for (int i = 0; i < n; ++i) {
            if (i == sets.slack) continue;
            const double s = shape(i, t);
            dev_p(static_cast<std::size_t>(l), static_cast<std::size_t>(i)) =
                std::fabs(base.p[i]) * s;
            if (c.buses[i].bus_type == BusType::PQ)
                dev_q(static_cast<std::size_t>(l), static_cast<std::size_t>(i)) =
                    -std::fabs(base.q[i]) * s;
        }
        for (int u = 0; u < wind_units; ++u)
            dev_p(static_cast<std::size_t>(l), static_cast<std::size_t>(wind_buses[static_cast<std::size_t>(u)])) +=
                wind_caps[static_cast<std::size_t>(u)] * wind_profile(u, t);
        for (int u = 0; u < solar_units; ++u)
            dev_p(static_cast<std::size_t>(l), static_cast<std::size_t>(solar_buses[static_cast<std::size_t>(u)])) +=
                solar_caps[static_cast<std::size_t>(u)] * solar_profile(u, t);
    }

    double raw_variation = 0.0;
    for (int l = 0; l + 1 < bp; ++l)
        for (int i = 0; i < n; ++i)
            raw_variation += std::fabs(dev_p(static_cast<std::size_t>(l + 1), static_cast<std::size_t>(i)) -
                                       dev_p(static_cast<std::size_t>(l), static_cast<std::size_t>(i)));

    const double wanted = variation_fraction * total_demand;
    const double scale =
        (variation_fraction == 0.0 || raw_variation == 0.0) ? 0.0 : 1.05 * wanted / raw_variation;

    GeneratedScenario out;
    out.schedule.times = times;
    out.schedule.targets.reserve(static_cast<std::size_t>(bp));
    for (int l = 0; l < bp; ++l) {
        InjectionTarget t = base;
        for (int i = 0; i < n; ++i) {
            t.p[i] += scale * dev_p(static_cast<std::size_t>(l), static_cast<std::size_t>(i));
            t.q[i] += scale * dev_q(static_cast<std::size_t>(l), static_cast<std::size_t>(i));
        }
        out.schedule.targets.push_back(std::move(t));
    }

    out.manifest.seed = seed;
    out.manifest.variation_fraction = variation_fraction;
    out.manifest.vre_share = options.vre_share;
    out.manifest.wind_fraction = options.wind_fraction;
    out.manifest.total_base_demand = total_demand;
    out.manifest.applied_scale = scale;
    out.manifest.total_p_variation = scale * raw_variation;
    for (int u = 0; u < wind_units; ++u)
        out.manifest.units.push_back({"wind", c.buses[static_cast<std::size_t>(wind_buses[static_cast<std::size_t>(u)])].id,
                                      wind_caps[static_cast<std::size_t>(u)]});
    for (int u = 0; u < solar_units; ++u)
        out.manifest.units.push_back({"solar", c.buses[static_cast<std::size_t>(solar_buses[static_cast<std::size_t>(u)])].id,
                                      solar_caps[static_cast<std::size_t>(u)]});

    // Every breakpoint must be solvable, or the scenario is useless.
    try {
        solve_discrete_points(c, partition(out.schedule));
    } catch (const NonConvergence& e) {
        throw InfeasibleScenario("variation " + std::to_string(variation_fraction) +
                                 " makes a breakpoint unsolvable: " + e.what());
    }
    return out;
}

std::string manifest_to_json(const ScenarioManifest& manifest) {
    nlohmann::json j;
    j["seed"] = manifest.seed;
    j["variation_fraction"] = manifest.variation_fraction;
    j["vre_share"] = manifest.vre_share;
    j["wind_fraction"] = manifest.wind_fraction;
    j["total_base_demand"] = manifest.total_base_demand;
    j["applied_scale"] = manifest.applied_scale;
    j["total_p_variation"] = manifest.total_p_variation;
    j["units"] = nlohmann::json::array();
    for (const VreUnit& u : manifest.units)
        j["units"].push_back({{"kind", u.kind}, {"bus", u.bus}, {"capacity", u.capacity}});
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string schedule_to_csv(const Case& c, const InjectionSchedule& schedule) {
    const int n = c.bus_count();
    std::string out = "time_hours,bus,p_pu,q_pu\n";
    for (int l = 0; l < schedule.breakpoint_count(); ++l) {
        const InjectionTarget& t = schedule.targets[static_cast<std::size_t>(l)];
        for (int i = 0; i < n; ++i) {
            // Reactive targets only exist for PQ buses; other rows carry 0.
            const double q = c.buses[i].bus_type == BusType::PQ ? t.q[i] : 0.0;
            out += fmt(schedule.times[static_cast<std::size_t>(l)]);
            out += ',';
            out += std::to_string(c.buses[i].id);
            out += ',';
            out += fmt(t.p[i]);
            out += ',';
            out += fmt(q);
            out += '\n';
        }
    }
    return out;
}

InjectionSchedule schedule_from_csv(const Case& c, const std::string& text,
                                    std::vector<std::string>* warnings) {
    const int n = c.bus_count();
    const InjectionTarget base = base_injections(c);
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw MalformedSchedule("empty file", 1);
    ++line_no;
    if (line.ends_with("\r")) line.pop_back();
    if (line != "time_hours,bus,p_pu,q_pu")
        throw MalformedSchedule("expected header time_hours,bus,p_pu,q_pu", line_no);

    InjectionSchedule schedule;
    std::vector<int> filled;  // per breakpoint, how many bus rows seen
    std::vector<std::vector<bool>> seen;
    int ignored_pv_q = 0;
    const int slack = BusSets::from_case(c).slack;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        double t, p, q;
        int bus_id;
        double bus_raw;
        char extra;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf %c", &t, &bus_raw, &p, &q, &extra) != 4)
            throw MalformedSchedule("expected time_hours,bus,p_pu,q_pu", line_no);
        bus_id = static_cast<int>(bus_raw);
        const int i = c.bus_index(bus_id);
        if (i < 0)
            throw MalformedSchedule("unknown bus " + std::to_string(bus_id), line_no);

        // Locate or open the breakpoint for this exact time value.
        int l = -1;
        if (!schedule.times.empty() && schedule.times.back() == t)
            l = schedule.breakpoint_count() - 1;
        else {
            for (int k = 0; k < schedule.breakpoint_count(); ++k)
                if (schedule.times[static_cast<std::size_t>(k)] == t) l = k;
            if (l < 0) {
                if (!schedule.times.empty() && !(t > schedule.times.back()))
                    throw NonMonotonicTimes("breakpoint times must increase; got " + fmt(t) +
                                            " after " + fmt(schedule.times.back()));
                schedule.times.push_back(t);
                schedule.targets.push_back(base);
                filled.push_back(0);
                seen.emplace_back(static_cast<std::size_t>(n), false);
                l = schedule.breakpoint_count() - 1;
            }
        }
        if (seen[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)])
            throw MalformedSchedule("duplicate row for bus " + std::to_string(bus_id) +
                                        " at t=" + fmt(t),
                                    line_no);
        seen[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = true;
        ++filled[static_cast<std::size_t>(l)];

        InjectionTarget& target = schedule.targets[static_cast<std::size_t>(l)];
        if (i != slack) target.p[i] = p;
        if (c.buses[i].bus_type == BusType::PQ) {
            target.q[i] = q;
        } else if (q != 0.0) {
            ++ignored_pv_q;  // magnitude-controlled and slack buses take no q target
        }
    }

    for (int l = 0; l < schedule.breakpoint_count(); ++l)
        if (filled[static_cast<std::size_t>(l)] != n)
            throw LayoutMismatch("breakpoint t=" + fmt(schedule.times[static_cast<std::size_t>(l)]) +
                                 " covers " + std::to_string(filled[static_cast<std::size_t>(l)]) +
                                 " of " + std::to_string(n) + " buses");
    if (schedule.breakpoint_count() < 2)
        throw MalformedSchedule("schedule needs at least 2 breakpoints", line_no);
    if (ignored_pv_q > 0 && warnings != nullptr)
        warnings->push_back("ignored " + std::to_string(ignored_pv_q) +
                            " reactive values on non-PQ buses");
    return schedule;
}

InjectionSchedule load_schedule_file(const Case& c, const std::string& path,
                                     std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open schedule file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return schedule_from_csv(c, buf.str(), warnings);
}

std::string samples_to_csv(const Case& c,
                           const std::vector<std::pair<std::string, const VoltageState*>>& rows) {
    const int n = c.bus_count();
    std::string out = "time_hours,bus,v_real,v_imag,v_mag,method\n";
    for (const auto& [method, state] : rows) {
        for (int i = 0; i < n; ++i) {
            const double e = state->v_real[i];
            const double f = state->v_imag[i];
            out += fmt(state->time_hours);
            out += ',';
            out += std::to_string(c.buses[i].id);
            out += ',';
            out += fmt(e);
            out += ',';
            out += fmt(f);
            out += ',';
            out += fmt(std::hypot(e, f));
            out += ',';
            out += method;
            out += '\n';
        }
    }
    return out;
}

std::string branch_flows_to_csv(const Case& c, const std::vector<BranchFlow>& flows) {
    std::string out =
        "time_hours,branch,from_bus,to_bus,p_from,q_from,p_to,q_to,i_from_mag,i_to_mag\n";
    for (const BranchFlow& flow : flows) {
        const Branch& br = c.branches[static_cast<std::size_t>(flow.branch_index)];
        out += fmt(flow.time_hours);
        out += ',' + std::to_string(flow.branch_index);
        out += ',' + std::to_string(br.from_bus);
        out += ',' + std::to_string(br.to_bus);
        out += ',' + fmt(flow.s_from.real());
        out += ',' + fmt(flow.s_from.imag());
        out += ',' + fmt(flow.s_to.real());
        out += ',' + fmt(flow.s_to.imag());
        out += ',' + fmt(std::abs(flow.i_from));
        out += ',' + fmt(std::abs(flow.i_to));
        out += '\n';
    }
    return out;
}

std::string error_report_to_csv(const ErrorReport& report) {
    std::string out = "interval,max_err_real,max_err_imag,argmax_bus,argmax_time\n";
    for (const IntervalError& ie : report.intervals) {
        out += std::to_string(ie.interval);
        out += ',' + fmt(ie.max_err_real);
        out += ',' + fmt(ie.max_err_imag);
        out += ',' + std::to_string(ie.argmax_bus);
        out += ',' + fmt(ie.argmax_time);
        out += '\n';
    }
    return out;
}

std::string error_report_to_json(const ErrorReport& report) {
    nlohmann::json j;
    j["global_max"] = report.global_max;
    j["total_comparisons"] = report.total_comparisons;
    j["excluded_samples"] = report.excluded_samples;
    j["warnings"] = report.warnings;
    j["intervals"] = nlohmann::json::array();
    for (const IntervalError& ie : report.intervals)
        j["intervals"].push_back({{"interval", ie.interval},
                                  {"max_err_real", ie.max_err_real},
                                  {"max_err_imag", ie.max_err_imag},
                                  {"argmax_bus", ie.argmax_bus},
                                  {"argmax_time", ie.argmax_time},
                                  {"excluded_samples", ie.excluded_samples}});
    return j.dump(2);
}

}  // namespace tvpf
