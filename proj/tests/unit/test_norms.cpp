#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>
#include <tvpf/case_model.hpp>
#include <tvpf/derivatives.hpp>
#include <tvpf/errors.hpp>
#include <tvpf/norms.hpp>
#include <tvpf/powerflow.hpp>
#include <tvpf/trajectory.hpp>

#include "support/oracles.hpp"

using oracles::data_path;
using tvpf::Matrix;
using tvpf::NormKind;
using tvpf::Vec;

TEST_CASE("norm names parse case-insensitively") {
    CHECK(tvpf::norm_kind_from_string("1") == NormKind::One);
    CHECK(tvpf::norm_kind_from_string("one") == NormKind::One);
    CHECK(tvpf::norm_kind_from_string("2") == NormKind::Two);
    CHECK(tvpf::norm_kind_from_string("TWO") == NormKind::Two);
    CHECK(tvpf::norm_kind_from_string("inf") == NormKind::Inf);
    CHECK(tvpf::norm_kind_from_string("Infinity") == NormKind::Inf);
    CHECK_THROWS_AS((void)tvpf::norm_kind_from_string("fro"), tvpf::OutOfRange);
    CHECK(tvpf::norm_kind_name(NormKind::Inf) == "inf");
}

TEST_CASE("vector norms agree with their definitions") {
    const Vec v = {3.0, -4.0, 0.0, 1.5};
    CHECK(tvpf::vector_norm(v, NormKind::One) == doctest::Approx(8.5));
    CHECK(tvpf::vector_norm(v, NormKind::Two) == doctest::Approx(std::sqrt(27.25)));
    CHECK(tvpf::vector_norm(v, NormKind::Inf) == 4.0);
    CHECK_THROWS_AS((void)tvpf::vector_norm(Vec{}, NormKind::Two), tvpf::EmptyInput);
}

TEST_CASE("induced 1- and inf-norms are the column and row sums") {
    Matrix m(2, 3);
    m(0, 0) = 1.0;  m(0, 1) = -2.0; m(0, 2) = 0.5;
    m(1, 0) = -3.0; m(1, 1) = 0.0;  m(1, 2) = 4.0;
    CHECK(tvpf::matrix_norm(m, NormKind::One) == doctest::Approx(4.5));  // worst column: |0.5|+|4|
    CHECK(tvpf::matrix_norm(m, NormKind::Inf) == doctest::Approx(7.0));  // worst row: |-3|+|4|
}

TEST_CASE("the spectral norm matches known matrices and standard bounds") {
    Matrix d(3, 3);
    d(0, 0) = -7.0; d(1, 1) = 2.0; d(2, 2) = 0.5;
    CHECK(tvpf::matrix_norm(d, NormKind::Two) == doctest::Approx(7.0).epsilon(1e-8));

    // 2x2 with analytically known largest singular value.
    Matrix a(2, 2);
    a(0, 0) = 1.0; a(0, 1) = 2.0;
    a(1, 0) = 0.0; a(1, 1) = 1.0;
    // Gram eigenvalues of [[1,2],[0,1]]: 3 +- 2*sqrt(2).
    CHECK(tvpf::matrix_norm(a, NormKind::Two) ==
          doctest::Approx(std::sqrt(3.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-8));

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix r(20, 20);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j) r(i, j) = dist(rng);
    const double two = tvpf::matrix_norm(r, NormKind::Two);
    double frob = 0.0;
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j) frob += r(i, j) * r(i, j);
    frob = std::sqrt(frob);
    const double one = tvpf::matrix_norm(r, NormKind::One);
    const double inf = tvpf::matrix_norm(r, NormKind::Inf);
    CHECK(two <= frob * (1.0 + 1e-9));
    CHECK(frob <= std::sqrt(20.0) * two * (1.0 + 1e-9));
    CHECK(two <= std::sqrt(one * inf) * (1.0 + 1e-9));
}

TEST_CASE("condition number uses the library inverse and matches the oracle") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix a(12, 12);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) a(i, j) = dist(rng);
        a(i, i) += 12.0;
    }
    for (NormKind p : {NormKind::One, NormKind::Two, NormKind::Inf}) {
        const double lib = tvpf::condition_number(a, p);
        const Matrix inv = oracles::oracle_invert_full_pivot(a);
        const double expect = tvpf::matrix_norm(a, p) * tvpf::matrix_norm(inv, p);
        CHECK(lib == doctest::Approx(expect).epsilon(1e-8));
        CHECK(lib >= 1.0 - 1e-12);  // condition numbers never drop below one
    }
}

TEST_CASE("growth bound formula and guards") {
    // (2d-3)!! rho^(d-1) x1^d with hand-computed values.
    CHECK(tvpf::proposition2_bound(2, 10.0, 0.5) == doctest::Approx(1.0 * 10.0 * 0.25));
    CHECK(tvpf::proposition2_bound(3, 10.0, 0.5) == doctest::Approx(3.0 * 100.0 * 0.125));
    CHECK(tvpf::proposition2_bound(4, 2.0, 1.0) == doctest::Approx(15.0 * 8.0));
    CHECK_THROWS_AS((void)tvpf::proposition2_bound(1, 10.0, 0.5), tvpf::InvalidOrder);
}

TEST_CASE("the correction coefficient is the order-2 fit, clamped") {
    tvpf::DerivativeSeries s;
    s.push(Vec{2.0, 0.0});         // ||x1|| = 2
    s.push(Vec{0.0, 2.4});         // ||x2|| = 2.4
    // alpha = ||x2|| / (rho ||x1||^2) = 2.4 / (3 * 4) = 0.2
    CHECK(tvpf::fit_alpha(s, 3.0, NormKind::Two) == doctest::Approx(0.2));

    tvpf::DerivativeSeries big;
    big.push(Vec{1.0});
    big.push(Vec{100.0});
    CHECK(tvpf::fit_alpha(big, 0.01, NormKind::Two) == doctest::Approx(1.0 - 1e-6));

    tvpf::DerivativeSeries zero;
    zero.push(Vec{0.0});
    zero.push(Vec{1.0});
    CHECK_THROWS_AS((void)tvpf::fit_alpha(zero, 3.0, NormKind::Two), tvpf::ZeroFirstDerivative);
}

TEST_CASE("gamma sequence and critical order") {
    // gamma_d = (2d-3) * rho_c * x1: with rho_c * x1 = 0.2 the sequence is
    // 0.2, 0.6, 1.0, 1.4, ... so the largest order with gamma <= 1 is 4.
    const tvpf::GammaResult g = tvpf::gamma_and_critical(0.4, 0.5, 6);
    REQUIRE(g.gamma.size() == 5);
    CHECK(g.gamma[0] == doctest::Approx(0.2));
    CHECK(g.gamma[2] == doctest::Approx(1.0));
    REQUIRE(g.critical_order.has_value());
    CHECK(*g.critical_order == 4);

    // gamma_2 already above one: no critical order exists.
    const tvpf::GammaResult none = tvpf::gamma_and_critical(2.0, 1.0, 4);
    CHECK_FALSE(none.critical_order.has_value());

    CHECK_THROWS_AS((void)tvpf::gamma_and_critical(0.4, 0.5, 1), tvpf::InvalidOrder);
}

namespace {

tvpf::NormReport bundled_report(const char* case_name, const char* sched_name, int order_max,
                                NormKind p) {
    const tvpf::Case c = tvpf::load_case_file(data_path(case_name));
    const tvpf::AdmittanceMatrix y = tvpf::build_ybus(c);
    const tvpf::BusSets sets = tvpf::BusSets::from_case(c);
    const auto intervals = tvpf::partition(tvpf::load_schedule_file(c, data_path(sched_name)));
    tvpf::VoltageState x0 =
        tvpf::solve_powerflow(y, sets, intervals[0].y_start, tvpf::flat_start(c, sets)).state;
    return tvpf::build_norm_report(y, sets, x0, intervals[0].slope, order_max, p);
}

}  // namespace

TEST_CASE("the bundled 5-bus report ties its own pieces together") {
    const tvpf::NormReport r = bundled_report("case5.m", "scenario5_1h.csv", 8, NormKind::Two);
    REQUIRE(r.derivative_norms.size() == 8);
    REQUIRE(r.bounds.size() == 7);
    REQUIRE(r.gamma.size() == 7);
    CHECK(r.rho > 1.0);
    CHECK(r.rho_corrected == doctest::Approx(r.alpha_t * r.rho));

    // The closed-form bound dominates the measured norms (orders 2..6).
    for (int d = 2; d <= 6; ++d)
        CHECK(r.derivative_norms[d - 1] <=
              tvpf::proposition2_bound(d, r.rho, r.derivative_norms[0]) * (1.0 + 1e-6));

    // The corrected estimate is exact at order 2 by construction.
    CHECK(r.approx[0] == doctest::Approx(r.derivative_norms[1]).epsilon(1e-9));

    // gamma grows linearly in d.
    for (std::size_t i = 1; i < r.gamma.size(); ++i) CHECK(r.gamma[i] > r.gamma[i - 1]);

    REQUIRE(r.critical_order.has_value());
    CHECK(*r.critical_order >= 3);
}

TEST_CASE("jacobian norm growth stays within the tracked envelope") {
    const tvpf::Case c = tvpf::load_case_file(data_path("case5.m"));
    const tvpf::AdmittanceMatrix y = tvpf::build_ybus(c);
    const tvpf::BusSets sets = tvpf::BusSets::from_case(c);
    const auto intervals =
        tvpf::partition(tvpf::load_schedule_file(c, data_path("scenario5_1h.csv")));
    tvpf::VoltageState x0 =
        tvpf::solve_powerflow(y, sets, intervals[0].y_start, tvpf::flat_start(c, sets)).state;
    const tvpf::DerivativeSeries ser =
        tvpf::derivative_series(y, sets, x0, intervals[0].slope, 6);

    const auto checks = tvpf::jacobian_norm_envelope(y, sets, x0, ser, NormKind::Inf);
    REQUIRE(checks.size() == 6);
    for (const auto& ck : checks) {
        CHECK(ck.lhs > 0.0);
        CHECK(ck.ratio == doctest::Approx(ck.lhs / ck.rhs));
        CHECK(ck.ratio <= 1.05);
    }
}

TEST_CASE("the corrected estimate tracks measured norms at heavy load") {
    // The correction coefficient is fitted at order 2; how well the higher
    // orders follow depends on the operating point. Close to the loadability
    // edge the growth is close to its worst case and the estimate stays
    // within a small factor of the measured norms.
    const tvpf::Case c = tvpf::load_case_file(data_path("case5.m"));
    const tvpf::AdmittanceMatrix y = tvpf::build_ybus(c);
    const tvpf::BusSets sets = tvpf::BusSets::from_case(c);
    const tvpf::InjectionTarget base = tvpf::base_injections(c);

    auto scaled = [&](double m) {
        tvpf::InjectionTarget t = base;
        for (int i = 0; i < c.bus_count(); ++i)
            if (c.buses[i].bus_type == tvpf::BusType::PQ) {
                t.p[i] *= m;
                t.q[i] *= m;
            }
        return t;
    };
    const tvpf::InjectionTarget heavy = scaled(3.5);
    const tvpf::VoltageState x0 =
        tvpf::solve_powerflow(y, sets, heavy, tvpf::flat_start(c, sets)).state;
    const tvpf::SlopeVector slope = tvpf::slope_between(heavy, scaled(4.0), 1.0);

    const tvpf::NormReport r = tvpf::build_norm_report(y, sets, x0, slope, 6, NormKind::Two);
    for (int d = 3; d <= 6; ++d) {
        const double measured = r.derivative_norms[static_cast<std::size_t>(d - 1)];
        const double estimate = r.approx[static_cast<std::size_t>(d - 2)];
        CAPTURE(d);
        CHECK(estimate <= 3.0 * measured);
        CHECK(measured <= 3.0 * estimate);
    }
}

TEST_CASE("gamma predicts the measured order-to-order decay within a factor of 3") {
    const tvpf::NormReport r = bundled_report("case5.m", "scenario5_1h.csv", 6, NormKind::Two);
    for (int d = 2; d <= 6; ++d) {
        const double measured_ratio = r.derivative_norms[static_cast<std::size_t>(d - 1)] /
                                      r.derivative_norms[static_cast<std::size_t>(d - 2)];
        const double predicted = r.gamma[static_cast<std::size_t>(d - 2)];
        CAPTURE(d);
        CHECK(predicted <= 3.0 * measured_ratio);
        CHECK(measured_ratio <= 3.0 * predicted);
    }
}

TEST_CASE("norm report CSV keeps its pinned schema") {
    const tvpf::NormReport r = bundled_report("case5.m", "scenario5_1h.csv", 4, NormKind::Two);
    const std::string csv = tvpf::norm_report_to_csv(r);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "order,measured_norm,prop2_bound,eq49_approx,gamma");

    std::getline(in, line);  // order 1: trailing columns empty
    CHECK(line.substr(line.size() - 3) == ",,,");
    CHECK(line.rfind("1,", 0) == 0);

    int rows = 1;
    while (std::getline(in, line)) {
        ++rows;
        int order = 0;
        double m = 0.0, bound = 0.0, approx = 0.0, gamma = 0.0;
        REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &order, &m, &bound, &approx,
                            &gamma) == 5);
        CHECK(order == rows);
        CHECK(m == doctest::Approx(r.derivative_norms[rows - 1]));
        CHECK(bound == doctest::Approx(r.bounds[rows - 2]));
    }
    CHECK(rows == 4);
}

TEST_CASE("norm report JSON carries the same content") {
    const tvpf::NormReport r = bundled_report("case5.m", "scenario5_1h.csv", 4, NormKind::Two);
    const auto j = nlohmann::json::parse(tvpf::norm_report_to_json(r));
    CHECK(j["norm"].get<std::string>() == "2");
    CHECK(j["derivative_norms"].size() == 4);
    CHECK(j["rho"].get<double>() == doctest::Approx(r.rho));
    if (r.critical_order.has_value())
        CHECK(j["critical_order"].get<int>() == *r.critical_order);
    else
        CHECK(j["critical_order"].is_null());
}
