#include "tvpf/norms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "tvpf/combinatorics.hpp"
#include "tvpf/errors.hpp"
#include "tvpf/kernels.hpp"

namespace tvpf {

NormKind norm_kind_from_string(const std::string& s) {
    std::string t;
    for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "1" || t == "one") return NormKind::One;
    if (t == "2" || t == "two") return NormKind::Two;
    if (t == "inf" || t == "infinity") return NormKind::Inf;
    throw OutOfRange("unknown norm '" + s + "' (expected 1, 2, or inf)");
}

std::string norm_kind_name(NormKind p) {
    switch (p) {
        case NormKind::One: return "1";
        case NormKind::Two: return "2";
        default: return "inf";
    }
}

double vector_norm(const Vec& v, NormKind p) {
    if (v.empty()) throw EmptyInput();
    switch (p) {
        case NormKind::One: return kernels::sum_abs(v.data(), v.size());
        case NormKind::Two: return std::sqrt(kernels::sum_sq(v.data(), v.size()));
        default: return kernels::max_abs(v.data(), v.size());
    }
}

namespace {

// Largest singular value via power iteration on G = M^T M: the iterate
// converges to the dominant eigenvector of G, whose Rayleigh quotient is
// sigma_max^2. Deterministic seeded start to dodge unlucky orthogonality.
double spectral_norm(const Matrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::mt19937_64 rng(0x5eed);
    Vec v(cols);
    for (double& x : v) x = 1.0 + 1e-3 * static_cast<double>(rng() % 1000);
    double nv = std::sqrt(kernels::sum_sq(v.data(), v.size()));
    for (double& x : v) x /= nv;

    Vec mv(rows), gv(cols);
    double lambda = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        kernels::matvec(m.data(), rows, cols, v.data(), mv.data());
        // g v = M^T (M v), column-wise accumulation over M's rows.
        std::fill(gv.begin(), gv.end(), 0.0);
        for (std::size_t i = 0; i < rows; ++i)
            kernels::axpy(mv[i], m.row(i), gv.data(), cols);
        const double next = kernels::dot(v.data(), gv.data(), cols);
        const double ng = std::sqrt(kernels::sum_sq(gv.data(), gv.size()));
        if (ng == 0.0) return 0.0;
        for (std::size_t j = 0; j < cols; ++j) v[j] = gv[j] / ng;
        if (iter > 0 && std::fabs(next - lambda) <= 1e-10 * std::max(1.0, std::fabs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace

double matrix_norm(const Matrix& m, NormKind p) {
    if (m.rows() == 0 || m.cols() == 0) throw EmptyInput();
    switch (p) {
        case NormKind::One: {
            double best = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < m.rows(); ++i) s += std::fabs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        case NormKind::Inf: {
            double best = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i)
                best = std::max(best, kernels::sum_abs(m.row(i), m.cols()));
            return best;
        }
        default:
            return spectral_norm(m);
    }
}

double condition_number(const Matrix& j, NormKind p) {
    const Matrix inv = invert(j);
    return matrix_norm(j, p) * matrix_norm(inv, p);
}

std::vector<JacobianNormCheck> jacobian_norm_envelope(const AdmittanceMatrix& y, const BusSets& sets,
                                                  const VoltageState& state,
                                                  const DerivativeSeries& series, NormKind p) {
    const double j_norm = matrix_norm(assemble_jacobian(y, sets, state), p);
    std::vector<JacobianNormCheck> rows;
    rows.reserve(static_cast<std::size_t>(series.order_max()));
    for (int k = 1; k <= series.order_max(); ++k) {
        const Vec& xk = series.order(k);
        JacobianNormCheck row;
        row.order = k;
        row.lhs = matrix_norm(jacobian_at_vector(y, sets, xk), p);
        row.rhs = j_norm * vector_norm(xk, p);
        row.ratio = row.rhs == 0.0 ? 0.0 : row.lhs / row.rhs;
        rows.push_back(row);
    }
    return rows;
}

double proposition2_bound(int d, double rho, double x1_norm) {
    if (d < 2) throw InvalidOrder(d);
    const double dd = static_cast<double>(double_factorial(2 * static_cast<std::int64_t>(d) - 3));
    return dd * std::pow(rho, d - 1) * std::pow(x1_norm, d);
}

double fit_alpha(const DerivativeSeries& series, double rho, NormKind p) {
    const double x1 = vector_norm(series.order(1), p);
    if (x1 == 0.0) throw ZeroFirstDerivative();
    const double x2 = vector_norm(series.order(2), p);
    const double alpha = x2 / (rho * x1 * x1);
    return std::clamp(alpha, 1e-6, 1.0 - 1e-6);
}

GammaResult gamma_and_critical(double rho_corrected, double x1_norm, int order_max) {
    if (order_max < 2) throw InvalidOrder(order_max);
    GammaResult r;
    for (int d = 2; d <= order_max; ++d)
        r.gamma.push_back(static_cast<double>(2 * d - 3) * rho_corrected * x1_norm);
    // gamma is increasing in d, so the critical order is the last one <= 1.
    for (int d = 2; d <= order_max; ++d)
        if (r.gamma[static_cast<std::size_t>(d - 2)] <= 1.0) r.critical_order = d;
    return r;
}

NormReport build_norm_report(const AdmittanceMatrix& y, const BusSets& sets,
                             const VoltageState& state, const SlopeVector& slope, int order_max,
                             NormKind p) {
    NormReport rep;
    rep.p = p;
    const DerivativeSeries series = derivative_series(y, sets, state, slope, order_max);
    for (int d = 1; d <= order_max; ++d) rep.derivative_norms.push_back(vector_norm(series.order(d), p));

    rep.rho = condition_number(assemble_jacobian(y, sets, state), p);
    const double x1_norm = rep.derivative_norms[0];
    if (x1_norm > 0.0 && order_max >= 2) {
        rep.alpha_t = fit_alpha(series, rep.rho, p);
        rep.rho_corrected = rep.alpha_t * rep.rho;
        for (int d = 2; d <= order_max; ++d) {
            rep.bounds.push_back(proposition2_bound(d, rep.rho, x1_norm));
            rep.approx.push_back(proposition2_bound(d, rep.rho_corrected, x1_norm));
        }
        const GammaResult g = gamma_and_critical(rep.rho_corrected, x1_norm, order_max);
        rep.gamma = g.gamma;
        rep.critical_order = g.critical_order;
    }
    return rep;
}

std::string norm_report_to_csv(const NormReport& report) {
    std::string out = "order,measured_norm,prop2_bound,eq49_approx,gamma\n";
    char buf[192];
    for (std::size_t i = 0; i < report.derivative_norms.size(); ++i) {
        const int d = static_cast<int>(i) + 1;
        if (d == 1 || report.bounds.size() < i) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,,,\n", d, report.derivative_norms[i]);
        } else {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", d,
                          report.derivative_norms[i], report.bounds[i - 1], report.approx[i - 1],
                          report.gamma[i - 1]);
        }
        out += buf;
    }
    return out;
}

std::string norm_report_to_json(const NormReport& report) {
    nlohmann::json j;
    j["norm"] = norm_kind_name(report.p);
    j["derivative_norms"] = report.derivative_norms;
    j["rho"] = report.rho;
    j["alpha_t"] = report.alpha_t;
    j["rho_corrected"] = report.rho_corrected;
    j["bounds"] = report.bounds;
    j["approx"] = report.approx;
    j["gamma"] = report.gamma;
    if (report.critical_order.has_value())
        j["critical_order"] = *report.critical_order;
    else
        j["critical_order"] = nullptr;
    return j.dump(2);
}

}  // namespace tvpf
