#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tvpf/derivatives.hpp"
#include "tvpf/linalg.hpp"
#include "tvpf/powerflow.hpp"

namespace tvpf {

enum class NormKind { One, Two, Inf };

/// Accepts "1", "2", "inf" (case-insensitive); throws OutOfRange otherwise.
NormKind norm_kind_from_string(const std::string& s);
std::string norm_kind_name(NormKind p);

/// Standard vector p-norm. Throws EmptyInput on an empty vector.
double vector_norm(const Vec& v, NormKind p);

/// Induced matrix norm: max column abs-sum (1), max row abs-sum (inf), or
/// largest singular value (2) via power iteration on the Gram matrix
/// (200 iterations or relative change < 1e-10).
double matrix_norm(const Matrix& m, NormKind p);

/// ||J|| * ||J^-1|| with an explicit inverse. Throws SingularJacobian.
double condition_number(const Matrix& j, NormKind p);

/// One row per derivative order: how the norm of the Jacobian assembled from
/// x^(k) compares against ||J(state)|| * ||x^(k)||. Reported, not asserted;
/// the inequality's derivation involves an approximation, so callers decide
/// how much slack to allow.
struct JacobianNormCheck {
    int order;
    double lhs;    // ||J(x^(k))||
    double rhs;    // ||J(state)|| * ||x^(k)||
    double ratio;  // lhs / rhs (0 when rhs is 0)
};
std::vector<JacobianNormCheck> jacobian_norm_envelope(const AdmittanceMatrix& y, const BusSets& sets,
                                                  const VoltageState& state,
                                                  const DerivativeSeries& series, NormKind p);

/// Closed-form growth bound on ||x^(d)||: (2d-3)!! * rho^(d-1) * x1_norm^d.
/// Throws InvalidOrder for d < 2.
double proposition2_bound(int d, double rho, double x1_norm);

/// Correction coefficient alpha_t = ||x^(2)|| / (rho * ||x^(1)||^2), clamped
/// to (1e-6, 1 - 1e-6). Makes the corrected estimate exact at order 2.
/// Throws ZeroFirstDerivative when ||x^(1)|| = 0.
double fit_alpha(const DerivativeSeries& series, double rho, NormKind p);

/// gamma_d = (2d-3) * rho_corrected * x1_norm for d = 2..order_max, and the
/// critical order: the largest d with gamma_d <= 1 (the bottom of the
/// norm-vs-order U curve), or none when gamma_2 > 1 already.
struct GammaResult {
    std::vector<double> gamma;  // index d-2 holds gamma_d
    std::optional<int> critical_order;
};
GammaResult gamma_and_critical(double rho_corrected, double x1_norm, int order_max);

/// Everything the norm study needs at one time point.
struct NormReport {
    NormKind p = NormKind::Two;
    std::vector<double> derivative_norms;  // index d-1 holds ||x^(d)||, d = 1..D
    double rho = 0.0;                      // condition number of J(state)
    double alpha_t = 0.0;
    double rho_corrected = 0.0;            // alpha_t * rho
    std::vector<double> bounds;            // index d-2: growth bound with rho
    std::vector<double> approx;            // index d-2: growth bound with rho_corrected
    std::vector<double> gamma;             // index d-2
    std::optional<int> critical_order;
};

NormReport build_norm_report(const AdmittanceMatrix& y, const BusSets& sets,
                             const VoltageState& state, const SlopeVector& slope, int order_max,
                             NormKind p);

/// CSV with header order,measured_norm,prop2_bound,eq49_approx,gamma; the
/// order-1 row leaves the last three columns empty (defined from order 2 up).
std::string norm_report_to_csv(const NormReport& report);
std::string norm_report_to_json(const NormReport& report);

}  // namespace tvpf
