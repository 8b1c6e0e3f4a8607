#pragma once

#include "tvpf/case_model.hpp"
#include "tvpf/derivatives.hpp"
#include "tvpf/powerflow.hpp"

namespace tvpf {

/// One segment of a piecewise-linear injection schedule: targets at both
/// ends plus the per-hour slope that carries one into the other.
struct LinearTimeInterval {
    double t_start = 0.0;  // hours
    double t_end = 0.0;    // hours
    InjectionTarget y_start;
    InjectionTarget y_end;
    SlopeVector slope;

    double length() const { return t_end - t_start; }
};

/// Builds the interval and its slope. Throws NonMonotonicTimes when
/// t_end <= t_start and LayoutMismatch when the targets disagree in layout.
LinearTimeInterval make_interval(double t_start, double t_end, InjectionTarget y_start,
                                 InjectionTarget y_end);

/// y(t) = y_start + (t - t_start) * slope on the P and Q rows; squared
/// magnitude targets are constant. Throws TimeOutOfInterval.
InjectionTarget injections_at(const LinearTimeInterval& interval, double t);

/// First-order extrapolation x(t) = x0 + (t - x0.time) * d1, with d1 in full
/// bus-stacked layout. No range check: callers use this for warm starts
/// slightly beyond the sampled interval too.
VoltageState evaluate_linear(const VoltageState& x0, const Vec& d1, double t);

/// Everything needed to evaluate voltages anywhere inside one interval:
/// converged endpoint states, endpoint first derivatives, and the shared
/// finite-difference second derivative d2_bar = (d1_end - d1_start)/length.
struct IntervalSolution {
    LinearTimeInterval interval;
    VoltageState x_start;
    VoltageState x_end;
    Vec d1_start;  // full bus-stacked, p.u./hour
    Vec d1_end;
    Vec d2_bar;    // full bus-stacked, p.u./hour^2
};

/// Solves both endpoints (the far end warm-started by evaluate_linear from
/// the near end) and forms the derivative data. Throws NonConvergence from
/// either endpoint solve.
IntervalSolution build_interval_solution(const AdmittanceMatrix& y, const BusSets& sets,
                                         const LinearTimeInterval& interval,
                                         const VoltageState& warm_start,
                                         const NewtonOptions& options = {});

/// Assembles an IntervalSolution from endpoint data computed elsewhere
/// (the trajectory driver shares breakpoint solves between neighboring
/// intervals). d2_bar is derived here so the finite-difference definition
/// lives in exactly one place.
IntervalSolution interval_solution_from_endpoints(const LinearTimeInterval& interval,
                                                  VoltageState x_start, VoltageState x_end,
                                                  Vec d1_start, Vec d1_end);

/// Blend of the two second-order expansions anchored at each endpoint,
/// weighted by the relative position a = (t - t_start)/length:
///   x(t) = (1-a) * [x_s + dt0*d1_s + dt0^2/2 * d2_bar]
///        +   a   * [x_e + dte*d1_e + dte^2/2 * d2_bar]
/// with dt0 = t - t_start >= 0 and dte = t - t_end <= 0 (the second
/// expansion extrapolates backwards). Throws TimeOutOfInterval.
VoltageState evaluate_combined(const IntervalSolution& sol, double t);

}  // namespace tvpf
