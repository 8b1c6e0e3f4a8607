#include "tvpf/derivatives.hpp"

#include <cstdio>
#include <utility>

#include "tvpf/combinatorics.hpp"
#include "tvpf/errors.hpp"
#include "tvpf/kernels.hpp"

namespace tvpf {

Vec SlopeVector::rhs(const BusSets& sets) const {
    if (static_cast<int>(k_p.size()) != sets.n_bus ||
        static_cast<int>(k_q.size()) != sets.n_bus)
        throw DimensionMismatch("slope vectors must cover every bus");
    Vec r(sets.unknown_count(), 0.0);
    std::size_t row = 0;
    for (int i : sets.non_slack) r[row++] = k_p[i];
    for (int i : sets.pq) r[row++] = k_q[i];
    // PV magnitude rows stay zero: the squared-setpoint targets do not move.
    return r;
}

SlopeVector slope_between(const InjectionTarget& a, const InjectionTarget& b, double dt_hours) {
    if (a.p.size() != b.p.size() || a.q.size() != b.q.size())
        throw DimensionMismatch("slope_between: target layouts differ");
    if (dt_hours <= 0.0) throw NonMonotonicTimes("slope_between: dt must be positive");
    SlopeVector s;
    const std::size_t n = a.p.size();
    s.k_p.resize(n);
    s.k_q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.k_p[i] = (b.p[i] - a.p[i]) / dt_hours;
        s.k_q[i] = (b.q[i] - a.q[i]) / dt_hours;
    }
    return s;
}

SlopeVector scale_slope(const SlopeVector& s, double factor) {
    SlopeVector out = s;
    for (double& v : out.k_p) v *= factor;
    for (double& v : out.k_q) v *= factor;
    return out;
}

const Vec& DerivativeSeries::order(int d) const {
    if (d < 1 || d > order_max()) throw MissingLowerOrder(d, order_max());
    return vectors_[static_cast<std::size_t>(d - 1)];
}

Vec gather_stacked(const BusSets& sets, const Vec& full) {
    if (static_cast<int>(full.size()) != 2 * sets.n_bus)
        throw DimensionMismatch("gather_stacked: expected full bus-stacked length");
    const int n = sets.n_bus;
    const int nu = n - 1;
    Vec x(2 * nu);
    for (int pos = 0; pos < nu; ++pos) {
        const int i = sets.non_slack[pos];
        x[pos] = full[i];
        x[nu + pos] = full[n + i];
    }
    return x;
}

Vec embed_stacked(const BusSets& sets, const Vec& unknowns) {
    const int n = sets.n_bus;
    const int nu = n - 1;
    if (static_cast<int>(unknowns.size()) != 2 * nu)
        throw DimensionMismatch("embed_stacked: expected unknown-vector length");
    Vec full(2 * n, 0.0);
    for (int pos = 0; pos < nu; ++pos) {
        const int i = sets.non_slack[pos];
        full[i] = unknowns[pos];
        full[n + i] = unknowns[nu + pos];
    }
    return full;
}

Vec first_derivative(const AdmittanceMatrix& y, const BusSets& sets, const VoltageState& state,
                     const SlopeVector& slope) {
    const Matrix jac = assemble_jacobian(y, sets, state);
    const Vec x1 = solve_dense(jac, slope.rhs(sets));
    return embed_stacked(sets, x1);
}

Vec derivative_rhs(const AdmittanceMatrix& y, const BusSets& sets, int d,
                   const DerivativeSeries& series) {
    if (d < 2) throw InvalidOrder(d);
    if (series.order_max() < d - 1) throw MissingLowerOrder(d, series.order_max());
    Vec b(sets.unknown_count(), 0.0);
    for (int k = 1; k <= d - 1; ++k) {
        const Matrix jk = jacobian_at_vector(y, sets, series.order(k));
        const Vec term = matvec(jk, gather_stacked(sets, series.order(d - k)));
        const double coeff = -static_cast<double>(binomial(d - 1, k));
        kernels::axpy(coeff, term.data(), b.data(), b.size());
    }
    return b;
}

DerivativeSeries derivative_series(const AdmittanceMatrix& y, const BusSets& sets,
                                   const VoltageState& state, const SlopeVector& slope,
                                   int order_max) {
    if (order_max < 1) throw InvalidOrder(order_max);
    const Matrix jac = assemble_jacobian(y, sets, state);
    const LuFactor lu(jac);

    DerivativeSeries series;
    series.push(embed_stacked(sets, lu.solve_refined(jac, slope.rhs(sets))));

    // J(x^(k)), cached as orders accumulate; entry k-1 holds order k.
    std::vector<Matrix> j_of;
    for (int d = 2; d <= order_max; ++d) {
        j_of.push_back(jacobian_at_vector(y, sets, series.order(d - 1)));
        Vec b(sets.unknown_count(), 0.0);
        for (int k = 1; k <= d - 1; ++k) {
            const Vec term = matvec(j_of[k - 1], gather_stacked(sets, series.order(d - k)));
            const double coeff = -static_cast<double>(binomial(d - 1, k));
            kernels::axpy(coeff, term.data(), b.data(), b.size());
        }
        series.push(embed_stacked(sets, lu.solve_refined(jac, b)));
    }
    return series;
}

std::string derivative_series_to_csv(const Case& c, const DerivativeSeries& series) {
    const int n = c.bus_count();
    std::string out = "order,bus,v_real_deriv,v_imag_deriv\n";
    char buf[128];
    for (int d = 1; d <= series.order_max(); ++d) {
        const Vec& x = series.order(d);
        for (int i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", d, c.buses[i].id, x[i],
                          x[n + i]);
            out += buf;
        }
    }
    return out;
}

}  // namespace tvpf
