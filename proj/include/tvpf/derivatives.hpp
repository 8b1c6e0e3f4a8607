#pragma once

#include <string>
#include <vector>

#include "tvpf/case_model.hpp"
#include "tvpf/linalg.hpp"
#include "tvpf/powerflow.hpp"

namespace tvpf {

/// Time rate of change of the injection targets over a linear segment,
/// per hour. Both vectors are indexed over all buses; slack entries and
/// (for k_q) PV entries are ignored when the residual rows are formed.
struct SlopeVector {
    Vec k_p;
    Vec k_q;

    /// Residual-row layout: [k_p at non-slack; k_q at PQ; zeros at PV].
    /// The magnitude targets are constant in time, hence the zero rows.
    Vec rhs(const BusSets& sets) const;

    bool operator==(const SlopeVector&) const = default;
};

/// Slope that carries target a at time 0 to target b at time dt_hours.
SlopeVector slope_between(const InjectionTarget& a, const InjectionTarget& b, double dt_hours);

/// Rescale to another time unit: a per-minute slope times 60 is the
/// per-hour slope, a per-second slope times 3600.
SlopeVector scale_slope(const SlopeVector& s, double factor);

/// Voltage derivatives x^(d) at one time point, d = 1..order_max, each in
/// full bus-stacked layout (length 2n) with slack rows exactly zero.
/// Units are p.u. per hour^d.
class DerivativeSeries {
public:
    DerivativeSeries() = default;

    int order_max() const { return static_cast<int>(vectors_.size()); }

    /// x^(d), 1 <= d <= order_max.
    const Vec& order(int d) const;

    void push(Vec v) { vectors_.push_back(std::move(v)); }

private:
    std::vector<Vec> vectors_;
};

/// Copy the non-slack entries of a bus-stacked vector (length 2n) into
/// unknown layout (length 2(n-1)).
Vec gather_stacked(const BusSets& sets, const Vec& full);

/// Inverse of gather_stacked; slack rows are set to zero.
Vec embed_stacked(const BusSets& sets, const Vec& unknowns);

/// x^(1) at the given converged state: solves J(state) x1 = k. Returned in
/// full bus-stacked layout.
Vec first_derivative(const AdmittanceMatrix& y, const BusSets& sets, const VoltageState& state,
                     const SlopeVector& slope);

/// Right-hand side b_d for order d >= 2:
///   b_d = -sum_{k=1..d-1} C(d-1, k) * J(x^(k)) * x^(d-k)
/// where J(.) is the Jacobian assembly applied to a derivative vector
/// (legitimate because every Jacobian entry is linear in its state argument).
Vec derivative_rhs(const AdmittanceMatrix& y, const BusSets& sets, int d,
                   const DerivativeSeries& series);

/// All orders 1..order_max at one time point. A single LU factorization of
/// J(state) is shared across every order.
DerivativeSeries derivative_series(const AdmittanceMatrix& y, const BusSets& sets,
                                   const VoltageState& state, const SlopeVector& slope,
                                   int order_max);

/// CSV with columns order,bus,v_real_deriv,v_imag_deriv.
std::string derivative_series_to_csv(const Case& c, const DerivativeSeries& series);

}  // namespace tvpf
