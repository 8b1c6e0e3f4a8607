#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include <tvpf/case_model.hpp>
#include <tvpf/errors.hpp>

#include "support/oracles.hpp"

using oracles::data_path;
using tvpf::BusType;
using tvpf::Case;

TEST_CASE("the 5-bus file parses with per-unit conversion and generator netting") {
    const Case c = tvpf::load_case_file(data_path("case5.m"));
    REQUIRE(c.bus_count() == 5);
    REQUIRE(c.branches.size() == 7);
    CHECK(c.base_mva == 100.0);

    const tvpf::Bus& b1 = c.buses[0];
    CHECK(b1.id == 1);
    CHECK(b1.bus_type == BusType::PV);
    // 20 MW load minus 40 MW generation, on a 100 MVA base.
    CHECK(b1.p_demand == doctest::Approx(-0.20).epsilon(1e-14));
    CHECK(b1.q_demand == doctest::Approx(0.10).epsilon(1e-14));
    CHECK(b1.v_setpoint == doctest::Approx(1.05));

    const tvpf::Bus& b5 = c.buses[4];
    CHECK(b5.bus_type == BusType::Slack);
    CHECK(b5.v_setpoint == doctest::Approx(1.06));
    CHECK(b5.v_angle_setpoint == 0.0);

    CHECK(c.buses[1].bus_type == BusType::PQ);
    CHECK(c.buses[1].p_demand == doctest::Approx(0.45));
    CHECK(c.buses[1].q_demand == doctest::Approx(0.15));

    const tvpf::Branch& br = c.branches[0];
    CHECK(br.from_bus == 5);
    CHECK(br.to_bus == 1);
    CHECK(br.series_resistance == doctest::Approx(0.02));
    CHECK(br.series_reactance == doctest::Approx(0.06));
    CHECK(br.total_charging_susceptance == doctest::Approx(0.06));
    CHECK(br.tap_ratio == 1.0);  // zero in the file means "no transformer"
    CHECK(br.status);

    CHECK(c.bus_index(1) == 0);
    CHECK(c.bus_index(5) == 4);
    CHECK(c.bus_index(99) == -1);

    CHECK(tvpf::validate_case(c).empty());
}

TEST_CASE("the 118-bus file parses with transformers and stays fully connected") {
    const Case c = tvpf::load_case_file(data_path("case118.m"));
    REQUIRE(c.bus_count() == 118);
    REQUIRE(c.branches.size() == 186);

    int slack = 0, pv = 0, pq = 0;
    for (const auto& b : c.buses) {
        if (b.bus_type == BusType::Slack) ++slack;
        else if (b.bus_type == BusType::PV) ++pv;
        else ++pq;
    }
    CHECK(slack == 1);
    CHECK(pv == 53);
    CHECK(pq == 64);
    CHECK(c.buses[c.bus_index(69)].bus_type == BusType::Slack);

    // The 8-5 tie is a transformer with an off-nominal turns ratio.
    bool found = false;
    for (const auto& br : c.branches)
        if (br.from_bus == 8 && br.to_bus == 5) {
            found = true;
            CHECK(br.tap_ratio == doctest::Approx(0.985));
            CHECK(br.series_resistance == 0.0);
        }
    CHECK(found);

    // Shunt compensation shows up scaled to per unit.
    CHECK(c.buses[c.bus_index(5)].shunt_susceptance == doctest::Approx(-0.40));
    CHECK(c.buses[c.bus_index(34)].shunt_susceptance == doctest::Approx(0.14));

    CHECK(tvpf::validate_case(c).empty());
}

TEST_CASE("serialize/parse round-trips are field-identical") {
    for (const char* name : {"case5.m", "case118.m"}) {
        const Case a = tvpf::load_case_file(data_path(name));
        Case b = tvpf::parse_case(tvpf::serialize_case(a));
        b.name = a.name;  // the JSON body carries the case name; file stem wins otherwise
        CHECK(a == b);
    }
}

TEST_CASE("JSON input is auto-detected") {
    const Case a = tvpf::load_case_file(data_path("case5.m"));
    const std::string json = tvpf::serialize_case(a);
    std::istringstream stream(json);
    const Case b = tvpf::parse_case(stream);
    CHECK(b.bus_count() == 5);
    CHECK(b.buses[0].p_demand == a.buses[0].p_demand);
}

TEST_CASE("malformed files raise their designated errors") {
    CHECK_THROWS_AS((void)tvpf::load_case_file(data_path("bad_syntax.m")), tvpf::MalformedCase);
    CHECK_THROWS_AS((void)tvpf::load_case_file(data_path("bad_noslack.m")), tvpf::MissingSlack);
    CHECK_THROWS_AS((void)tvpf::load_case_file(data_path("bad_dupbus.m")), tvpf::DuplicateBusId);
    CHECK_THROWS_AS((void)tvpf::load_case_file(data_path("bad_base.m")), tvpf::NonPositiveBase);

    try {
        (void)tvpf::load_case_file(data_path("bad_syntax.m"));
        FAIL("expected MalformedCase");
    } catch (const tvpf::MalformedCase& e) {
        CHECK(e.line == 6);  // the offending token's line in the file
        CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }

    CHECK_THROWS_AS((void)tvpf::load_case_file(data_path("no_such_file.m")), tvpf::Error);
}

TEST_CASE("two slack buses are rejected") {
    const char* text =
        "mpc.baseMVA = 100;\n"
        "mpc.bus = [\n"
        " 1 3 0 0 0 0 1 1.0 0 138 1 1.1 0.9;\n"
        " 2 3 0 0 0 0 1 1.0 0 138 1 1.1 0.9;\n"
        "];\n"
        "mpc.gen = [ 1 0 0 10 -10 1.0 100 1 100 0; ];\n"
        "mpc.branch = [ 1 2 0.01 0.05 0 0 0 0 0 0 1 -360 360; ];\n";
    CHECK_THROWS_AS((void)tvpf::parse_case(text), tvpf::MalformedCase);
}

TEST_CASE("islanded buses are reported by validation") {
    Case c = tvpf::load_case_file(data_path("case5.m"));
    // Cut bus 4 off (branches 1-4 and 3-4).
    for (auto& br : c.branches)
        if (br.to_bus == 4) br.status = false;
    const auto warnings = tvpf::validate_case(c);
    REQUIRE(!warnings.empty());
    CHECK(warnings[0].find("islanded") != std::string::npos);
}

TEST_CASE("admittance matrix matches the branch-stamping oracle") {
    for (const char* name : {"case5.m", "case118.m"}) {
        const Case c = tvpf::load_case_file(data_path(name));
        const tvpf::AdmittanceMatrix y = tvpf::build_ybus(c);
        const auto oracle = oracles::oracle_ybus(c);
        REQUIRE(y.dimension == c.bus_count());
        for (int i = 0; i < y.dimension; ++i)
            for (int j = 0; j < y.dimension; ++j) {
                const std::complex<double> lib = y.at(i, j);
                CHECK(std::abs(lib - oracle[i][j]) <= 1e-12 * (1.0 + std::abs(oracle[i][j])));
            }
    }
}

TEST_CASE("a zero-impedance branch cannot be stamped") {
    Case c = tvpf::load_case_file(data_path("case5.m"));
    c.branches[2].series_resistance = 0.0;
    c.branches[2].series_reactance = 0.0;
    CHECK_THROWS_AS((void)tvpf::build_ybus(c), tvpf::ZeroImpedanceBranch);
}

TEST_CASE("scanner details: comments, blank lines, scientific notation") {
    const char* text =
        "% leading comment\n"
        "function mpc = tiny\n"
        "\n"
        "mpc.baseMVA = 1e2;  % inline comment\n"
        "mpc.bus = [\n"
        " 1 3 0 0 0 0 1 1.0 0 138 1 1.1 0.9\n"   // newline as row separator
        " 2 1 5.0e1 -1e1 0 0 1 1.0 0 138 1 1.1 0.9;\n"
        "];\n"
        "mpc.gen = [ 1 0 0 10 -10 1.02 100 1 100 0; ];\n"
        "mpc.branch = [ 1 2 0.01 0.05 0.002 0 0 0 0 0 1 -360 360; ];\n";
    const Case c = tvpf::parse_case(text);
    REQUIRE(c.bus_count() == 2);
    CHECK(c.base_mva == 100.0);
    CHECK(c.buses[1].p_demand == doctest::Approx(0.5));
    CHECK(c.buses[1].q_demand == doctest::Approx(-0.1));
    CHECK(c.buses[0].v_setpoint == doctest::Approx(1.02));  // generator voltage wins
}

TEST_CASE("out-of-service generators and branches are ignored") {
    const char* text =
        "mpc.baseMVA = 100;\n"
        "mpc.bus = [\n"
        " 1 3 0 0 0 0 1 1.0 0 138 1 1.1 0.9;\n"
        " 2 1 50 10 0 0 1 1.0 0 138 1 1.1 0.9;\n"
        "];\n"
        "mpc.gen = [\n"
        " 1 0 0 10 -10 1.0 100 1 100 0;\n"
        " 2 30 0 10 -10 1.0 100 0 100 0;\n"  // status 0: no netting
        "];\n"
        "mpc.branch = [\n"
        " 1 2 0.01 0.05 0 0 0 0 0 0 1 -360 360;\n"
        " 1 2 0.99 0.99 0 0 0 0 0 0 0 -360 360;\n"  // status 0: not stamped
        "];\n";
    const Case c = tvpf::parse_case(text);
    CHECK(c.buses[1].p_demand == doctest::Approx(0.5));  // unchanged by the dead unit
    CHECK_FALSE(c.branches[1].status);
    const tvpf::AdmittanceMatrix y = tvpf::build_ybus(c);
    const auto oracle = oracles::oracle_ybus(c);
    CHECK(std::abs(y.at(0, 1) - oracle[0][1]) <= 1e-15);
}
