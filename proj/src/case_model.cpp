#include "tvpf/case_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tvpf/errors.hpp"

namespace tvpf {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct MatrixRow {
    std::vector<double> values;
    int line = 0;
};

struct RawTable {
    std::vector<MatrixRow> rows;
};

// Numeric-matrix subset of the MATPOWER case grammar: "mpc.<name> = <scalar>;"
// and "mpc.<name> = [ rows ];" with % comments. Anything else named mpc.* is
// skipped with a warning.
class MatpowerScanner {
public:
    MatpowerScanner(const std::string& text, std::vector<std::string>* warnings)
        : warnings_(warnings) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const auto pct = line.find('%');
            if (pct != std::string::npos) line.erase(pct);
            lines_.push_back(line);
        }
    }

    void scan() {
        for (line_no_ = 1; line_no_ <= static_cast<int>(lines_.size()); ++line_no_) {
            std::string line = lines_[line_no_ - 1];
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.rfind("function", 0) == 0) continue;
            const auto eq = trimmed.find('=');
            if (trimmed.rfind("mpc.", 0) != 0 || eq == std::string::npos)
                throw MalformedCase("unrecognized statement: " + trimmed, line_no_);
            const std::string name = trim(trimmed.substr(4, eq - 4));
            std::string rest = trim(trimmed.substr(eq + 1));
            if (!rest.empty() && rest.front() == '[') {
                RawTable table = read_matrix(rest.substr(1));
                if (name == "bus" || name == "gen" || name == "branch") {
                    tables_[name] = std::move(table);
                } else {
                    warn("ignoring table mpc." + name);
                }
            } else {
                if (name == "baseMVA") {
                    base_mva_ = parse_number(strip_semicolon(rest), line_no_);
                } else if (name == "version") {
                    // accepted and ignored
                } else {
                    warn("ignoring field mpc." + name);
                }
            }
        }
    }

    std::optional<double> base_mva() const { return base_mva_; }

    const RawTable* table(const std::string& name) const {
        const auto it = tables_.find(name);
        return it == tables_.end() ? nullptr : &it->second;
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::string strip_semicolon(std::string s) {
        while (!s.empty() && (s.back() == ';' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
        return s;
    }

    static double parse_number(const std::string& tok, int line) {
        std::size_t consumed = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &consumed);
        } catch (const std::exception&) {
            throw MalformedCase("expected a number, got '" + tok + "'", line);
        }
        if (consumed != tok.size())
            throw MalformedCase("trailing characters after number: '" + tok + "'", line);
        return v;
    }

    // Reads matrix rows starting with the remainder of the current line and
    // continuing on subsequent lines until the closing bracket.
    RawTable read_matrix(std::string first_chunk) {
        RawTable table;
        MatrixRow row;
        row.line = line_no_;
        std::string chunk = first_chunk;
        while (true) {
            std::size_t i = 0;
            while (i < chunk.size()) {
                const char c = chunk[i];
                if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
                    ++i;
                } else if (c == ';') {
                    if (!row.values.empty()) table.rows.push_back(std::move(row));
                    row = MatrixRow{{}, line_no_};
                    ++i;
                } else if (c == ']') {
                    if (!row.values.empty()) table.rows.push_back(std::move(row));
                    return table;
                } else {
                    std::size_t j = i;
                    while (j < chunk.size() && chunk[j] != ' ' && chunk[j] != '\t' &&
                           chunk[j] != ',' && chunk[j] != ';' && chunk[j] != ']' && chunk[j] != '\r')
                        ++j;
                    row.values.push_back(parse_number(chunk.substr(i, j - i), line_no_));
                    i = j;
                }
            }
            // Row continues on the next line; newline also terminates a row.
            if (!row.values.empty()) {
                table.rows.push_back(std::move(row));
                row = MatrixRow{{}, line_no_};
            }
            if (line_no_ >= static_cast<int>(lines_.size()))
                throw MalformedCase("unterminated matrix", line_no_);
            ++line_no_;
            chunk = lines_[line_no_ - 1];
            row.line = line_no_;
        }
    }

    void warn(const std::string& msg) {
        if (warnings_ != nullptr) warnings_->push_back(msg);
    }

    std::vector<std::string> lines_;
    std::vector<std::string>* warnings_;
    int line_no_ = 0;
    std::optional<double> base_mva_;
    std::unordered_map<std::string, RawTable> tables_;
};

BusType bus_type_from_code(int code, int line) {
    switch (code) {
        case 1: return BusType::PQ;
        case 2: return BusType::PV;
        case 3: return BusType::Slack;
        default: throw MalformedCase("unsupported bus type code " + std::to_string(code), line);
    }
}

Case case_from_tables(const MatpowerScanner& scanner) {
    if (!scanner.base_mva().has_value()) throw MalformedCase("missing mpc.baseMVA", 1);
    const double base = *scanner.base_mva();
    if (base <= 0.0) throw NonPositiveBase(base);

    const RawTable* bus_table = scanner.table("bus");
    if (bus_table == nullptr || bus_table->rows.empty())
        throw MalformedCase("missing mpc.bus table", 1);

    Case c;
    c.base_mva = base;

    std::unordered_map<int, int> index_of_id;
    int slack_count = 0;
    for (const MatrixRow& row : bus_table->rows) {
        if (row.values.size() < 9)
            throw MalformedCase("bus row needs at least 9 columns", row.line);
        Bus bus;
        bus.id = static_cast<int>(row.values[0]);
        if (bus.id <= 0) throw MalformedCase("bus id must be positive", row.line);
        if (index_of_id.count(bus.id) != 0) throw DuplicateBusId(bus.id);
        bus.bus_type = bus_type_from_code(static_cast<int>(row.values[1]), row.line);
        bus.p_demand = row.values[2] / base;
        bus.q_demand = row.values[3] / base;
        bus.shunt_conductance = row.values[4] / base;
        bus.shunt_susceptance = row.values[5] / base;
        bus.v_setpoint = row.values[7];
        bus.v_angle_setpoint = row.values[8] * kDegToRad;
        if (bus.bus_type == BusType::Slack) ++slack_count;
        if (slack_count > 1) throw MalformedCase("more than one slack bus", row.line);
        index_of_id.emplace(bus.id, c.bus_count());
        c.buses.push_back(bus);
    }
    if (slack_count == 0) throw MissingSlack();

    if (const RawTable* gen_table = scanner.table("gen"); gen_table != nullptr) {
        std::unordered_set<int> setpoint_seen;
        for (const MatrixRow& row : gen_table->rows) {
            if (row.values.size() < 8)
                throw MalformedCase("gen row needs at least 8 columns", row.line);
            const int bus_id = static_cast<int>(row.values[0]);
            const auto it = index_of_id.find(bus_id);
            if (it == index_of_id.end())
                throw MalformedCase("gen references unknown bus " + std::to_string(bus_id),
                                    row.line);
            if (row.values[7] <= 0.0) continue;  // out of service
            Bus& bus = c.buses[it->second];
            // Generator injections net into the bus demand.
            bus.p_demand -= row.values[1] / base;
            bus.q_demand -= row.values[2] / base;
            if (bus.bus_type != BusType::PQ && setpoint_seen.insert(bus_id).second)
                bus.v_setpoint = row.values[5];
        }
    }

    for (const Bus& bus : c.buses) {
        if (bus.bus_type != BusType::PQ && bus.v_setpoint <= 0.0)
            throw MalformedCase("bus " + std::to_string(bus.id) +
                                    " needs a positive voltage setpoint",
                                1);
    }

    if (const RawTable* branch_table = scanner.table("branch"); branch_table != nullptr) {
        for (const MatrixRow& row : branch_table->rows) {
            if (row.values.size() < 11)
                throw MalformedCase("branch row needs at least 11 columns", row.line);
            Branch br;
            br.from_bus = static_cast<int>(row.values[0]);
            br.to_bus = static_cast<int>(row.values[1]);
            if (index_of_id.count(br.from_bus) == 0 || index_of_id.count(br.to_bus) == 0)
                throw MalformedCase("branch references unknown bus", row.line);
            if (br.from_bus == br.to_bus)
                throw MalformedCase("branch endpoints must differ", row.line);
            br.series_resistance = row.values[2];
            br.series_reactance = row.values[3];
            br.total_charging_susceptance = row.values[4];
            br.tap_ratio = row.values[8] == 0.0 ? 1.0 : row.values[8];
            br.phase_shift = row.values[9] * kDegToRad;
            br.status = row.values[10] != 0.0;
            if (br.status && br.tap_ratio <= 0.0)
                throw MalformedCase("in-service branch needs a positive tap ratio", row.line);
            c.branches.push_back(br);
        }
    }
    return c;
}

const char* bus_type_name(BusType t) {
    switch (t) {
        case BusType::PQ: return "PQ";
        case BusType::PV: return "PV";
        default: return "Slack";
    }
}

BusType bus_type_from_name(const std::string& s) {
    if (s == "PQ") return BusType::PQ;
    if (s == "PV") return BusType::PV;
    if (s == "Slack") return BusType::Slack;
    throw MalformedCase("unknown bus type '" + s + "'", 0);
}

Case case_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedCase(e.what(), 0);
    }
    try {
        Case c;
        c.name = j.value("name", "");
        c.base_mva = j.at("base_mva").get<double>();
        if (c.base_mva <= 0.0) throw NonPositiveBase(c.base_mva);
        std::unordered_set<int> ids;
        int slack_count = 0;
        for (const auto& jb : j.at("buses")) {
            Bus bus;
            bus.id = jb.at("id").get<int>();
            if (!ids.insert(bus.id).second) throw DuplicateBusId(bus.id);
            bus.bus_type = bus_type_from_name(jb.at("type").get<std::string>());
            if (bus.bus_type == BusType::Slack) ++slack_count;
            bus.p_demand = jb.at("p_demand").get<double>();
            bus.q_demand = jb.at("q_demand").get<double>();
            bus.shunt_conductance = jb.at("shunt_conductance").get<double>();
            bus.shunt_susceptance = jb.at("shunt_susceptance").get<double>();
            bus.v_setpoint = jb.at("v_setpoint").get<double>();
            bus.v_angle_setpoint = jb.at("v_angle_setpoint").get<double>();
            c.buses.push_back(bus);
        }
        if (slack_count == 0) throw MissingSlack();
        if (slack_count > 1) throw MalformedCase("more than one slack bus", 0);
        for (const auto& jb : j.at("branches")) {
            Branch br;
            br.from_bus = jb.at("from_bus").get<int>();
            br.to_bus = jb.at("to_bus").get<int>();
            br.series_resistance = jb.at("series_resistance").get<double>();
            br.series_reactance = jb.at("series_reactance").get<double>();
            br.total_charging_susceptance = jb.at("total_charging_susceptance").get<double>();
            br.tap_ratio = jb.at("tap_ratio").get<double>();
            br.phase_shift = jb.at("phase_shift").get<double>();
            br.status = jb.at("status").get<bool>();
            c.branches.push_back(br);
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedCase(e.what(), 0);
    }
}

}  // namespace

int Case::bus_index(int id) const {
    for (int i = 0; i < bus_count(); ++i)
        if (buses[i].id == id) return i;
    return -1;
}

Case parse_case(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return case_from_json(text);
    std::vector<std::string> warnings;
    MatpowerScanner scanner(text, &warnings);
    scanner.scan();
    return case_from_tables(scanner);
}

Case parse_case(std::istream& source) {
    std::ostringstream buf;
    buf << source.rdbuf();
    return parse_case(buf.str());
}

Case load_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open case file: " + path);
    Case c = parse_case(in);
    if (c.name.empty()) {
        auto slash = path.find_last_of('/');
        c.name = slash == std::string::npos ? path : path.substr(slash + 1);
    }
    return c;
}

std::string serialize_case(const Case& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["base_mva"] = c.base_mva;
    j["buses"] = nlohmann::json::array();
    for (const Bus& bus : c.buses) {
        j["buses"].push_back({{"id", bus.id},
                              {"type", bus_type_name(bus.bus_type)},
                              {"p_demand", bus.p_demand},
                              {"q_demand", bus.q_demand},
                              {"shunt_conductance", bus.shunt_conductance},
                              {"shunt_susceptance", bus.shunt_susceptance},
                              {"v_setpoint", bus.v_setpoint},
                              {"v_angle_setpoint", bus.v_angle_setpoint}});
    }
    j["branches"] = nlohmann::json::array();
    for (const Branch& br : c.branches) {
        j["branches"].push_back({{"from_bus", br.from_bus},
                                 {"to_bus", br.to_bus},
                                 {"series_resistance", br.series_resistance},
                                 {"series_reactance", br.series_reactance},
                                 {"total_charging_susceptance", br.total_charging_susceptance},
                                 {"tap_ratio", br.tap_ratio},
                                 {"phase_shift", br.phase_shift},
                                 {"status", br.status}});
    }
    return j.dump(2);
}

std::vector<std::string> validate_case(const Case& c) {
    std::vector<std::string> warnings;
    const int n = c.bus_count();
    if (n == 0) {
        warnings.push_back("case has no buses");
        return warnings;
    }
    // Island detection over in-service branches, flood fill from the slack.
    std::vector<std::vector<int>> adj(n);
    for (const Branch& br : c.branches) {
        if (!br.status) continue;
        const int f = c.bus_index(br.from_bus);
        const int t = c.bus_index(br.to_bus);
        adj[f].push_back(t);
        adj[t].push_back(f);
    }
    int start = 0;
    for (int i = 0; i < n; ++i)
        if (c.buses[i].bus_type == BusType::Slack) start = i;
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
    }
    for (int i = 0; i < n; ++i)
        if (!seen[i])
            warnings.push_back("bus " + std::to_string(c.buses[i].id) +
                               " is islanded from the slack");
    return warnings;
}

AdmittanceMatrix build_ybus(const Case& c) {
    const int n = c.bus_count();
    AdmittanceMatrix y;
    y.dimension = n;
    y.g = Matrix(n, n);
    y.b = Matrix(n, n);

    for (const Branch& br : c.branches) {
        if (!br.status) continue;
        const std::complex<double> z(br.series_resistance, br.series_reactance);
        if (std::abs(z) == 0.0) throw ZeroImpedanceBranch(br.from_bus, br.to_bus);
        const std::complex<double> ys = 1.0 / z;
        const std::complex<double> ysh(0.0, br.total_charging_susceptance / 2.0);
        const std::complex<double> tap = std::polar(br.tap_ratio, br.phase_shift);

        const int f = c.bus_index(br.from_bus);
        const int t = c.bus_index(br.to_bus);
        const std::complex<double> yff = (ys + ysh) / (br.tap_ratio * br.tap_ratio);
        const std::complex<double> ytt = ys + ysh;
        const std::complex<double> yft = -ys / std::conj(tap);
        const std::complex<double> ytf = -ys / tap;

        y.g(f, f) += yff.real();
        y.b(f, f) += yff.imag();
        y.g(t, t) += ytt.real();
        y.b(t, t) += ytt.imag();
        y.g(f, t) += yft.real();
        y.b(f, t) += yft.imag();
        y.g(t, f) += ytf.real();
        y.b(t, f) += ytf.imag();
    }
    for (int i = 0; i < n; ++i) {
        y.g(i, i) += c.buses[i].shunt_conductance;
        y.b(i, i) += c.buses[i].shunt_susceptance;
    }
    return y;
}

}  // namespace tvpf
