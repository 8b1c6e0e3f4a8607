#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "tvpf/linalg.hpp"

namespace tvpf {

enum class BusType { PQ, PV, Slack };

struct Bus {
    int id = 0;                      // external bus number, positive
    BusType bus_type = BusType::PQ;
    double p_demand = 0.0;           // net demand (load minus generation), p.u.
    double q_demand = 0.0;           // net demand, p.u.; unused for PV setpoint tracking
    double shunt_conductance = 0.0;  // p.u.
    double shunt_susceptance = 0.0;  // p.u.
    double v_setpoint = 1.0;         // p.u., meaningful for PV and Slack
    double v_angle_setpoint = 0.0;   // radians, meaningful for Slack

    bool operator==(const Bus&) const = default;
};

struct Branch {
    int from_bus = 0;  // external id
    int to_bus = 0;
    double series_resistance = 0.0;          // p.u.
    double series_reactance = 0.0;           // p.u.
    double total_charging_susceptance = 0.0; // p.u.
    double tap_ratio = 1.0;                  // 1.0 = no transformer
    double phase_shift = 0.0;                // radians
    bool status = true;

    bool operator==(const Branch&) const = default;
};

struct Case {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::string name;

    int bus_count() const { return static_cast<int>(buses.size()); }
    /// Position of a bus id within `buses`, or -1.
    int bus_index(int id) const;

    bool operator==(const Case&) const = default;
};

/// Dense complex nodal admittance matrix, stored as real and imaginary parts.
struct AdmittanceMatrix {
    int dimension = 0;
    Matrix g;  // real part
    Matrix b;  // imaginary part

    std::complex<double> at(int i, int j) const { return {g(i, j), b(i, j)}; }
};

/// Parse a MATPOWER-style case (numeric-matrix subset) or the canonical JSON
/// serialization, auto-detected from the content.
Case parse_case(std::istream& source);
Case parse_case(const std::string& text);
Case load_case_file(const std::string& path);

/// Canonical JSON serialization; parse_case accepts it back.
std::string serialize_case(const Case& c);

/// Topology and sanity warnings (islands, PV buses without setpoints, ...).
/// Parsing succeeds even when these fire.
std::vector<std::string> validate_case(const Case& c);

AdmittanceMatrix build_ybus(const Case& c);

}  // namespace tvpf
