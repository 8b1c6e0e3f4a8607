#include "tvpf/powerflow.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tvpf/errors.hpp"
#include "tvpf/kernels.hpp"

namespace tvpf {

namespace {

constexpr double kDivergedMismatch = 1e6;

// Real and imaginary parts of the injected current Y*V for a bus-stacked
// vector v = [e; f]. Both are linear in v:
//   a_i = sum_j G_ij e_j - B_ij f_j
//   c_i = sum_j G_ij f_j + B_ij e_j
void current_parts(const AdmittanceMatrix& y, const Vec& v, Vec& a, Vec& c) {
    const int n = y.dimension;
    a.assign(n, 0.0);
    c.assign(n, 0.0);
    const double* e = v.data();
    const double* f = v.data() + n;
    for (int i = 0; i < n; ++i) {
        const double* g_row = y.g.row(i);
        const double* b_row = y.b.row(i);
        const double ge = kernels::dot(g_row, e, n);
        const double bf = kernels::dot(b_row, f, n);
        const double gf = kernels::dot(g_row, f, n);
        const double be = kernels::dot(b_row, e, n);
        a[i] = ge - bf;
        c[i] = gf + be;
    }
}

}  // namespace

BusSets BusSets::from_case(const Case& c) {
    BusSets s;
    s.n_bus = c.bus_count();
    s.unknown_pos.assign(s.n_bus, -1);
    for (int i = 0; i < s.n_bus; ++i) {
        switch (c.buses[i].bus_type) {
            case BusType::Slack:
                if (s.slack >= 0) throw MalformedCase("more than one slack bus", 0);
                s.slack = i;
                break;
            case BusType::PQ:
                s.pq.push_back(i);
                break;
            case BusType::PV:
                s.pv.push_back(i);
                break;
        }
    }
    if (s.slack < 0) throw MissingSlack();
    for (int i = 0; i < s.n_bus; ++i) {
        if (i == s.slack) continue;
        s.unknown_pos[i] = static_cast<int>(s.non_slack.size());
        s.non_slack.push_back(i);
    }
    return s;
}

Vec VoltageState::stacked() const {
    const std::size_t n = v_real.size();
    Vec out(2 * n);
    std::copy(v_real.begin(), v_real.end(), out.begin());
    std::copy(v_imag.begin(), v_imag.end(), out.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

VoltageState flat_start(const Case& c, const BusSets& sets, bool literal) {
    const int n = sets.n_bus;
    VoltageState st;
    st.v_real.assign(n, 1.0);
    st.v_imag.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const Bus& bus = c.buses[i];
        if (i == sets.slack) {
            st.v_real[i] = bus.v_setpoint * std::cos(bus.v_angle_setpoint);
            st.v_imag[i] = bus.v_setpoint * std::sin(bus.v_angle_setpoint);
        } else if (!literal && bus.bus_type == BusType::PV) {
            st.v_real[i] = bus.v_setpoint;
        }
    }
    return st;
}

InjectionTarget base_injections(const Case& c) {
    const int n = c.bus_count();
    InjectionTarget t;
    t.p.assign(n, 0.0);
    t.q.assign(n, 0.0);
    t.pv_vsq.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        t.p[i] = -c.buses[i].p_demand;
        t.q[i] = -c.buses[i].q_demand;
        if (c.buses[i].bus_type == BusType::PV)
            t.pv_vsq[i] = c.buses[i].v_setpoint * c.buses[i].v_setpoint;
    }
    return t;
}

void bus_power(const AdmittanceMatrix& y, const VoltageState& state, Vec& p_out, Vec& q_out) {
    const int n = y.dimension;
    Vec a, c;
    current_parts(y, state.stacked(), a, c);
    p_out.assign(n, 0.0);
    q_out.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double e = state.v_real[i];
        const double f = state.v_imag[i];
        p_out[i] = e * a[i] + f * c[i];
        q_out[i] = f * a[i] - e * c[i];
    }
}

Vec power_mismatch(const AdmittanceMatrix& y, const BusSets& sets, const VoltageState& state,
                   const InjectionTarget& target) {
    const int n = sets.n_bus;
    if (static_cast<int>(state.v_real.size()) != n ||
        static_cast<int>(target.p.size()) != n)
        throw DimensionMismatch("state/target size does not match bus count");

    Vec a, c;
    current_parts(y, state.stacked(), a, c);

    Vec r(sets.unknown_count(), 0.0);
    std::size_t row = 0;
    for (int i : sets.non_slack) {
        const double e = state.v_real[i];
        const double f = state.v_imag[i];
        r[row++] = e * a[i] + f * c[i] - target.p[i];
    }
    for (int i : sets.pq) {
        const double e = state.v_real[i];
        const double f = state.v_imag[i];
        r[row++] = f * a[i] - e * c[i] - target.q[i];
    }
    for (int i : sets.pv) {
        const double e = state.v_real[i];
        const double f = state.v_imag[i];
        r[row++] = e * e + f * f - target.pv_vsq[i];
    }
    return r;
}

Matrix jacobian_at_vector(const AdmittanceMatrix& y, const BusSets& sets, const Vec& v) {
    const int n = sets.n_bus;
    if (static_cast<int>(v.size()) != 2 * n)
        throw DimensionMismatch("jacobian input vector must stack all bus coordinates");
    const int m = sets.unknown_count();
    const int nu = n - 1;  // columns per coordinate block

    Vec a, c;
    current_parts(y, v, a, c);
    const double* e = v.data();
    const double* f = v.data() + n;

    Matrix jac(m, m);
    int row = 0;
    // Active-power rows: dP_i/de_k = e_i G_ik + f_i B_ik + [i==k] a_i
    //                    dP_i/df_k = f_i G_ik - e_i B_ik + [i==k] c_i
    for (int i : sets.non_slack) {
        double* out = jac.row(row);
        for (int pos = 0; pos < nu; ++pos) {
            const int k = sets.non_slack[pos];
            out[pos] = e[i] * y.g(i, k) + f[i] * y.b(i, k);
            out[nu + pos] = f[i] * y.g(i, k) - e[i] * y.b(i, k);
        }
        const int p = sets.unknown_pos[i];
        out[p] += a[i];
        out[nu + p] += c[i];
        ++row;
    }
    // Reactive-power rows: dQ_i/de_k = f_i G_ik - e_i B_ik - [i==k] c_i
    //                      dQ_i/df_k = -e_i G_ik - f_i B_ik + [i==k] a_i
    for (int i : sets.pq) {
        double* out = jac.row(row);
        for (int pos = 0; pos < nu; ++pos) {
            const int k = sets.non_slack[pos];
            out[pos] = f[i] * y.g(i, k) - e[i] * y.b(i, k);
            out[nu + pos] = -e[i] * y.g(i, k) - f[i] * y.b(i, k);
        }
        const int p = sets.unknown_pos[i];
        out[p] -= c[i];
        out[nu + p] += a[i];
        ++row;
    }
    // Magnitude rows: dU_i/de_k = 2 e_i [i==k], dU_i/df_k = 2 f_i [i==k]
    for (int i : sets.pv) {
        double* out = jac.row(row);
        const int p = sets.unknown_pos[i];
        out[p] = 2.0 * e[i];
        out[nu + p] = 2.0 * f[i];
        ++row;
    }
    return jac;
}

Matrix assemble_jacobian(const AdmittanceMatrix& y, const BusSets& sets,
                         const VoltageState& state) {
    return jacobian_at_vector(y, sets, state.stacked());
}

Vec gather_unknowns(const BusSets& sets, const VoltageState& state) {
    const int nu = sets.n_bus - 1;
    Vec x(2 * nu);
    for (int pos = 0; pos < nu; ++pos) {
        const int i = sets.non_slack[pos];
        x[pos] = state.v_real[i];
        x[nu + pos] = state.v_imag[i];
    }
    return x;
}

void scatter_unknowns(const BusSets& sets, const Vec& x, VoltageState& state) {
    const int nu = sets.n_bus - 1;
    if (static_cast<int>(x.size()) != 2 * nu)
        throw DimensionMismatch("unknown vector size does not match non-slack count");
    for (int pos = 0; pos < nu; ++pos) {
        const int i = sets.non_slack[pos];
        state.v_real[i] = x[pos];
        state.v_imag[i] = x[nu + pos];
    }
}

PowerFlowSolution solve_powerflow(const AdmittanceMatrix& y, const BusSets& sets,
                                  const InjectionTarget& target, const VoltageState& start,
                                  const NewtonOptions& options) {
    PowerFlowSolution sol;
    sol.state = start;

    for (int iter = 0; iter <= options.max_iterations; ++iter) {
        Vec r = power_mismatch(y, sets, sol.state, target);
        sol.final_mismatch = kernels::max_abs(r.data(), r.size());
        sol.iterations = iter;
        if (sol.final_mismatch <= options.tolerance) {
            sol.converged = true;
            return sol;
        }
        if (!std::isfinite(sol.final_mismatch) || sol.final_mismatch > kDivergedMismatch)
            throw NonConvergence(iter, sol.final_mismatch, "residual diverged");
        if (iter == options.max_iterations) break;

        Matrix jac = assemble_jacobian(y, sets, sol.state);
        Vec dx;
        try {
            dx = solve_dense(jac, r);
        } catch (const SingularJacobian&) {
            if (iter == 0) throw;
            throw NonConvergence(iter, sol.final_mismatch, "jacobian became singular");
        }
        Vec x = gather_unknowns(sets, sol.state);
        kernels::axpy(-1.0, dx.data(), x.data(), x.size());
        scatter_unknowns(sets, x, sol.state);
    }
    throw NonConvergence(options.max_iterations, sol.final_mismatch, "iteration budget exhausted");
}

PowerFlowSolution solve_powerflow(const Case& c, const NewtonOptions& options) {
    const AdmittanceMatrix y = build_ybus(c);
    const BusSets sets = BusSets::from_case(c);
    const InjectionTarget target = base_injections(c);
    const VoltageState start = flat_start(c, sets, options.flat_start_literal);
    return solve_powerflow(y, sets, target, start, options);
}

std::string solution_to_json(const Case& c, const AdmittanceMatrix& y,
                             const PowerFlowSolution& solution) {
    Vec p, q;
    bus_power(y, solution.state, p, q);
    nlohmann::json j;
    j["converged"] = solution.converged;
    j["iterations"] = solution.iterations;
    j["final_mismatch"] = solution.final_mismatch;
    j["time_hours"] = solution.state.time_hours;
    j["buses"] = nlohmann::json::array();
    for (int i = 0; i < c.bus_count(); ++i) {
        const double e = solution.state.v_real[i];
        const double f = solution.state.v_imag[i];
        j["buses"].push_back(
            {{"id", c.buses[i].id},
             {"v_real", e},
             {"v_imag", f},
             {"v_mag", std::hypot(e, f)},
             {"v_angle_deg", std::atan2(f, e) * 180.0 / std::numbers::pi},
             {"p_injection", p[i]},
             {"q_injection", q[i]}});
    }
    return j.dump(2);
}

}  // namespace tvpf
