#include "tvpf/interval.hpp"

#include <cmath>
#include <utility>

#include "tvpf/errors.hpp"
#include "tvpf/kernels.hpp"

namespace tvpf {

namespace {

// Slop for endpoint comparisons: sample grids land on t_start/t_end exactly,
// but arithmetic noise from callers should not reject a boundary point.
double time_slop(const LinearTimeInterval& iv) {
    return 1e-12 * std::max({1.0, std::fabs(iv.t_start), std::fabs(iv.t_end)});
}

double clamp_to_interval(const LinearTimeInterval& iv, double t) {
    if (t < iv.t_start - time_slop(iv) || t > iv.t_end + time_slop(iv))
        throw TimeOutOfInterval(t, iv.t_start, iv.t_end);
    return std::min(std::max(t, iv.t_start), iv.t_end);
}

}  // namespace

LinearTimeInterval make_interval(double t_start, double t_end, InjectionTarget y_start,
                                 InjectionTarget y_end) {
    if (!(t_end > t_start))
        throw NonMonotonicTimes("interval end " + std::to_string(t_end) +
                                " must exceed start " + std::to_string(t_start));
    if (y_start.p.size() != y_end.p.size() || y_start.q.size() != y_end.q.size() ||
        y_start.pv_vsq.size() != y_end.pv_vsq.size())
        throw LayoutMismatch("interval endpoint targets have different layouts");

    LinearTimeInterval iv;
    iv.t_start = t_start;
    iv.t_end = t_end;
    iv.slope = slope_between(y_start, y_end, t_end - t_start);
    iv.y_start = std::move(y_start);
    iv.y_end = std::move(y_end);
    return iv;
}

InjectionTarget injections_at(const LinearTimeInterval& interval, double t) {
    const double tc = clamp_to_interval(interval, t);
    // Exact endpoints return the stored targets bit-for-bit.
    if (tc == interval.t_start) return interval.y_start;
    if (tc == interval.t_end) return interval.y_end;
    const double dt = tc - interval.t_start;
    InjectionTarget y = interval.y_start;
    kernels::axpy(dt, interval.slope.k_p.data(), y.p.data(), y.p.size());
    kernels::axpy(dt, interval.slope.k_q.data(), y.q.data(), y.q.size());
    return y;
}

VoltageState evaluate_linear(const VoltageState& x0, const Vec& d1, double t) {
    const std::size_t n = x0.v_real.size();
    if (d1.size() != 2 * n) throw DimensionMismatch("evaluate_linear: derivative length");
    const double dt = t - x0.time_hours;
    VoltageState out;
    out.time_hours = t;
    out.v_real.resize(n);
    out.v_imag.resize(n);
    kernels::axpby(1.0, x0.v_real.data(), dt, d1.data(), out.v_real.data(), n);
    kernels::axpby(1.0, x0.v_imag.data(), dt, d1.data() + n, out.v_imag.data(), n);
    return out;
}

IntervalSolution build_interval_solution(const AdmittanceMatrix& y, const BusSets& sets,
                                         const LinearTimeInterval& interval,
                                         const VoltageState& warm_start,
                                         const NewtonOptions& options) {
    PowerFlowSolution start_sol;
    try {
        start_sol = solve_powerflow(y, sets, interval.y_start, warm_start, options);
    } catch (const NonConvergence& e) {
        throw NonConvergence(e.iterations, e.final_mismatch,
                             "interval start t=" + std::to_string(interval.t_start));
    }
    start_sol.state.time_hours = interval.t_start;

    const Vec d1_start = first_derivative(y, sets, start_sol.state, interval.slope);

    const VoltageState end_guess =
        evaluate_linear(start_sol.state, d1_start, interval.t_end);
    PowerFlowSolution end_sol;
    try {
        end_sol = solve_powerflow(y, sets, interval.y_end, end_guess, options);
    } catch (const NonConvergence& e) {
        throw NonConvergence(e.iterations, e.final_mismatch,
                             "interval end t=" + std::to_string(interval.t_end));
    }
    end_sol.state.time_hours = interval.t_end;

    Vec d1_end = first_derivative(y, sets, end_sol.state, interval.slope);

    return interval_solution_from_endpoints(interval, std::move(start_sol.state),
                                            std::move(end_sol.state), d1_start,
                                            std::move(d1_end));
}

IntervalSolution interval_solution_from_endpoints(const LinearTimeInterval& interval,
                                                  VoltageState x_start, VoltageState x_end,
                                                  Vec d1_start, Vec d1_end) {
    if (d1_start.size() != d1_end.size() || d1_start.size() != 2 * x_start.v_real.size())
        throw DimensionMismatch("interval endpoints: derivative layouts differ");
    IntervalSolution sol;
    sol.interval = interval;
    sol.x_start = std::move(x_start);
    sol.x_end = std::move(x_end);
    sol.d2_bar.resize(d1_start.size());
    kernels::axpby(1.0 / interval.length(), d1_end.data(), -1.0 / interval.length(),
                   d1_start.data(), sol.d2_bar.data(), sol.d2_bar.size());
    sol.d1_start = std::move(d1_start);
    sol.d1_end = std::move(d1_end);
    return sol;
}

VoltageState evaluate_combined(const IntervalSolution& sol, double t) {
    const double tc = clamp_to_interval(sol.interval, t);
    const std::size_t n = sol.x_start.v_real.size();
    const double dt0 = tc - sol.interval.t_start;
    const double dte = tc - sol.interval.t_end;  // <= 0 inside the interval
    const double a = dt0 / sol.interval.length();

    // Second-order expansion from each endpoint, then the a-weighted blend.
    Vec from_start(2 * n), from_end(2 * n);
    kernels::taylor2(sol.x_start.v_real.data(), dt0, sol.d1_start.data(), 0.5 * dt0 * dt0,
                     sol.d2_bar.data(), from_start.data(), n);
    kernels::taylor2(sol.x_start.v_imag.data(), dt0, sol.d1_start.data() + n, 0.5 * dt0 * dt0,
                     sol.d2_bar.data() + n, from_start.data() + n, n);
    kernels::taylor2(sol.x_end.v_real.data(), dte, sol.d1_end.data(), 0.5 * dte * dte,
                     sol.d2_bar.data(), from_end.data(), n);
    kernels::taylor2(sol.x_end.v_imag.data(), dte, sol.d1_end.data() + n, 0.5 * dte * dte,
                     sol.d2_bar.data() + n, from_end.data() + n, n);

    VoltageState out;
    out.time_hours = tc;
    out.v_real.resize(n);
    out.v_imag.resize(n);
    kernels::lerp(from_start.data(), from_end.data(), a, out.v_real.data(), n);
    kernels::lerp(from_start.data() + n, from_end.data() + n, a, out.v_imag.data(), n);
    return out;
}

}  // namespace tvpf
