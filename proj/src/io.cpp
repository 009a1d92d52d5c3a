#include "chokeflow/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "chokeflow/errors.hpp"
#include "chokeflow/units.hpp"

namespace chokeflow::io {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(const std::string& s, std::size_t row, const std::string& column) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw InputError("row " + std::to_string(row + 1) + ", column '" + column + "': '" + s +
                         "' is not a finite number");
    }
    return v;
}

struct Columns {
    const CsvTable& table;
    double get(std::size_t row, const std::string& name) const {
        return to_double(table.rows[row].at(table.column(name)), row, name);
    }
    std::vector<double> vector(std::size_t row, const std::string& prefix, const FluidSystem& fluid) const {
        std::vector<double> v;
        for (const auto& name : fluid.names()) v.push_back(get(row, prefix + name));
        return v;
    }
};

void put(std::ostream& out, double v) { out << format_number(v); }

void put_opt(std::ostream& out, const std::optional<double>& v) {
    if (v) put(out, *v);
}

void put_prefixed(std::ostream& out, const FluidSystem& fluid, const std::string& prefix) {
    for (const auto& name : fluid.names()) out << ',' << prefix << name;
}

void put_values(std::ostream& out, const Composition& z) {
    for (double v : z) {
        out << ',';
        put(out, v);
    }
}

}  // namespace

std::string format_number(double v) {
    if (v == 0.0) return "0";  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw InputError("missing column '" + name + "'");
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (trim(line).empty() || line[0] == '#') continue;
        auto fields = split(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw InputError(source + ": row " + std::to_string(t.rows.size() + 1) + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (!have_header) {
        throw InputError(source + ": empty file");
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    return parse_csv(in, path.string());
}

std::vector<ProfileStep> parse_profile(const CsvTable& table, const FluidSystem& fluid) {
    const Columns c{table};
    std::vector<ProfileStep> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ProfileStep s;
        s.day = c.get(r, "day");
        s.p_in = units::bar_to_pa(c.get(r, "p_in_bara"));
        s.t_in = units::celsius_to_kelvin(c.get(r, "t_in_c"));
        s.p_out = units::bar_to_pa(c.get(r, "p_out_bara"));
        s.z = normalize(c.vector(r, "z_", fluid));
        out.push_back(std::move(s));
    }
    return out;
}

void write_profile(std::ostream& out, const FluidSystem& fluid, const std::vector<ProfileStep>& profile) {
    out << "day,p_in_bara,t_in_c,p_out_bara";
    put_prefixed(out, fluid, "z_");
    out << '\n';
    for (const auto& s : profile) {
        put(out, s.day);
        out << ',';
        put(out, units::pa_to_bar(s.p_in));
        out << ',';
        put(out, units::kelvin_to_celsius(s.t_in));
        out << ',';
        put(out, units::pa_to_bar(s.p_out));
        put_values(out, s.z);
        out << '\n';
    }
}

std::vector<ChokeMeasurement> parse_measurements(const CsvTable& table) {
    const Columns c{table};
    std::vector<ChokeMeasurement> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out.push_back({c.get(r, "day"), units::bar_to_pa(c.get(r, "p_in_bara")),
                       units::celsius_to_kelvin(c.get(r, "t_in_c")), units::bar_to_pa(c.get(r, "p_out_bara")),
                       units::celsius_to_kelvin(c.get(r, "t_out_c"))});
    }
    return out;
}

void write_measurements(std::ostream& out, const std::vector<ChokeMeasurement>& measurements) {
    out << "day,p_in_bara,t_in_c,p_out_bara,t_out_c\n";
    for (const auto& m : measurements) {
        put(out, m.day);
        out << ',';
        put(out, units::pa_to_bar(m.p_in));
        out << ',';
        put(out, units::kelvin_to_celsius(m.t_in));
        out << ',';
        put(out, units::pa_to_bar(m.p_out));
        out << ',';
        put(out, units::kelvin_to_celsius(m.t_out_meas));
        out << '\n';
    }
}

std::vector<TruthRow> parse_truth(const CsvTable& table, const FluidSystem& fluid) {
    const Columns c{table};
    std::vector<TruthRow> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        TruthRow t;
        t.day = c.get(r, "day");
        t.f_g = c.get(r, "f_g");
        t.gor = c.get(r, "gor_sm3_sm3");
        t.oil = normalize(c.vector(r, "x_", fluid));
        t.gas = normalize(c.vector(r, "y_", fluid));
        t.z = normalize(c.vector(r, "z_", fluid));
        out.push_back(std::move(t));
    }
    return out;
}

void write_truth(std::ostream& out, const FluidSystem& fluid, const std::vector<TruthRow>& truth) {
    out << "day,f_g,gor_sm3_sm3";
    put_prefixed(out, fluid, "x_");
    put_prefixed(out, fluid, "y_");
    put_prefixed(out, fluid, "z_");
    out << '\n';
    for (const auto& t : truth) {
        put(out, t.day);
        out << ',';
        put(out, t.f_g);
        out << ',';
        put(out, t.gor);
        put_values(out, t.oil);
        put_values(out, t.gas);
        put_values(out, t.z);
        out << '\n';
    }
}

std::vector<ChokeMeasurement> measurements_of(const std::vector<ForwardStep>& steps) {
    std::vector<ChokeMeasurement> out;
    for (const auto& s : steps) {
        if (s.ok()) out.push_back(s.measurement);
    }
    return out;
}

std::vector<TruthRow> truth_of(const std::vector<ForwardStep>& steps) {
    std::vector<TruthRow> out;
    for (const auto& s : steps) {
        if (s.ok()) out.push_back({s.measurement.day, s.truth.f_g, s.truth.gor, s.truth.oil, s.truth.gas, s.z});
    }
    return out;
}

SeedPair parse_seeds(const CsvTable& table, const FluidSystem& fluid, const std::string& provenance) {
    const auto name_col = table.column("component");
    const auto oil_col = table.column("oil");
    const auto gas_col = table.column("gas");
    std::vector<double> oil(fluid.size(), 0.0), gas(fluid.size(), 0.0);
    std::vector<bool> seen(fluid.size(), false);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& name = table.rows[r][name_col];
        const auto idx = fluid.index_of(name);
        if (!idx) throw InputError("seed file: unknown component '" + name + "'");
        if (seen[*idx]) throw InputError("seed file: component '" + name + "' listed twice");
        seen[*idx] = true;
        oil[*idx] = to_double(table.rows[r][oil_col], r, "oil");
        gas[*idx] = to_double(table.rows[r][gas_col], r, "gas");
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) throw InputError("seed file: missing component '" + fluid.component(i).name + "'");
    }
    return {normalize(oil), normalize(gas), provenance};
}

void write_estimates(std::ostream& out, const FluidSystem& fluid, const std::vector<ScoredEstimate>& rows,
                     bool with_truth, const std::string& key_column) {
    if (!key_column.empty()) out << key_column << ',';
    out << "day,f_g_est,gor_est,t_out_calc_c,residual_c,status,iterations";
    put_prefixed(out, fluid, "z_");
    out << ",candidate_f_g";
    if (with_truth) out << ",gor_true_sm3_sm3,delta_gor_signed_pct,mpe_abs_pct";
    out << '\n';
    for (const auto& row : rows) {
        const auto& r = row.result;
        if (!key_column.empty()) {
            put(out, row.key);
            out << ',';
        }
        put(out, row.day);
        out << ',';
        if (r.has_estimate()) {
            put(out, r.f_g_est);
            out << ',';
            put(out, r.gor_est);
            out << ',';
            put(out, units::kelvin_to_celsius(r.t_out_calc));
            out << ',';
            put(out, r.residual);
        } else {
            out << ",,,";
        }
        out << ',' << to_string(r.status) << ',' << r.iterations;
        if (r.has_estimate()) {
            put_values(out, r.z_est);
        } else {
            for (std::size_t i = 0; i < fluid.size(); ++i) out << ',';
        }
        out << ',';
        for (std::size_t i = 0; i < r.candidates.size(); ++i) {
            if (i) out << ';';
            put(out, r.candidates[i].f_g);
        }
        if (with_truth) {
            out << ',';
            put_opt(out, row.gor_true);
            out << ',';
            put_opt(out, row.delta_gor);
            out << ',';
            put_opt(out, row.mpe);
        }
        out << '\n';
    }
}

}  // namespace chokeflow::io
