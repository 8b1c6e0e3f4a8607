#pragma once

#include <string>
#include <vector>

#include "tvpf/case_model.hpp"
#include "tvpf/linalg.hpp"

namespace tvpf {

/// Index bookkeeping for the rectangular-coordinate formulation.
///
/// The unknown vector holds [e at non-slack buses; f at non-slack buses] and
/// the residual rows are [active power at non-slack; reactive power at PQ;
/// squared voltage magnitude at PV], so both have length 2*(n_bus - 1).
struct BusSets {
    int n_bus = 0;
    int slack = -1;                // bus index of the slack bus
    std::vector<int> non_slack;    // bus indices, case order
    std::vector<int> pq;
    std::vector<int> pv;
    std::vector<int> unknown_pos;  // bus index -> position among non-slack, -1 for slack

    static BusSets from_case(const Case& c);

    int unknown_count() const { return 2 * (n_bus - 1); }
};

/// Bus voltages in rectangular coordinates at a moment in time.
struct VoltageState {
    Vec v_real;
    Vec v_imag;
    double time_hours = 0.0;

    /// Full bus-stacked vector [e_1..e_n, f_1..f_n], slack included.
    Vec stacked() const;

    bool operator==(const VoltageState&) const = default;
};

/// Per-bus specified quantities the solver must match. Powers are injections
/// (generation positive), per unit; pv_vsq holds squared magnitude setpoints.
struct InjectionTarget {
    Vec p;
    Vec q;
    Vec pv_vsq;

    bool operator==(const InjectionTarget&) const = default;
};

struct NewtonOptions {
    double tolerance = 1e-10;      // infinity norm of the residual
    int max_iterations = 30;
    bool flat_start_literal = false;
};

struct PowerFlowSolution {
    VoltageState state;
    int iterations = 0;
    double final_mismatch = 0.0;
    bool converged = false;
};

/// Starting point for Newton: slack pinned to its setpoint; PV buses at their
/// magnitude setpoint (angle zero); PQ buses at 1+0j. With literal=true every
/// non-slack bus starts at exactly 1+0j instead.
VoltageState flat_start(const Case& c, const BusSets& sets, bool literal = false);

/// Injection targets implied by the case data alone (negated net demand).
InjectionTarget base_injections(const Case& c);

/// Complex nodal power P_i + jQ_i = V_i * conj((Y V)_i) at every bus.
void bus_power(const AdmittanceMatrix& y, const VoltageState& state, Vec& p_out, Vec& q_out);

/// Residual vector F(x): realized minus specified quantities, laid out per
/// BusSets row ordering.
Vec power_mismatch(const AdmittanceMatrix& y, const BusSets& sets, const VoltageState& state,
                   const InjectionTarget& target);

/// The system Jacobian evaluated as a linear map of an arbitrary bus-stacked
/// vector v = [e; f] of length 2*n_bus. Passing the current state's stacked
/// vector yields the Newton Jacobian; the map satisfies J(a*u + b*w) =
/// a*J(u) + b*J(w), which the higher-derivative recursion relies on.
Matrix jacobian_at_vector(const AdmittanceMatrix& y, const BusSets& sets, const Vec& v);

/// Newton Jacobian dF/dx at the given state.
Matrix assemble_jacobian(const AdmittanceMatrix& y, const BusSets& sets,
                         const VoltageState& state);

/// Copy the non-slack entries of a state into unknown-vector layout.
Vec gather_unknowns(const BusSets& sets, const VoltageState& state);

/// Write an unknown vector back into a state, leaving the slack untouched.
void scatter_unknowns(const BusSets& sets, const Vec& x, VoltageState& state);

/// Full Newton solve from the supplied start state. Throws SingularJacobian
/// if the very first iteration cannot factor, and NonConvergence if the
/// iteration budget runs out, the residual blows up, or the Jacobian
/// degenerates mid-run.
PowerFlowSolution solve_powerflow(const AdmittanceMatrix& y, const BusSets& sets,
                                  const InjectionTarget& target, const VoltageState& start,
                                  const NewtonOptions& options = {});

/// Convenience overload: builds the admittance matrix and targets from the case.
PowerFlowSolution solve_powerflow(const Case& c, const NewtonOptions& options = {});

/// JSON report with per-bus voltages and realized injections.
std::string solution_to_json(const Case& c, const AdmittanceMatrix& y,
                             const PowerFlowSolution& solution);

}  // namespace tvpf
