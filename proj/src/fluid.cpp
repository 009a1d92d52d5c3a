#include "chokeflow/fluid.hpp"

#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chokeflow/errors.hpp"
#include "chokeflow/units.hpp"

namespace chokeflow {

using nlohmann::json;

double IdealGasCp::cp(double t) const {
    return coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3]));
}

double IdealGasCp::enthalpy(double t, double t_ref) const {
    auto antiderivative = [this](double x) {
        return x * (coeffs[0] + x * (coeffs[1] / 2.0 + x * (coeffs[2] / 3.0 + x * coeffs[3] / 4.0)));
    };
    return antiderivative(t) - antiderivative(t_ref);
}

FluidSystem::FluidSystem(std::vector<ComponentProps> components, std::vector<std::vector<double>> bip)
    : components_(std::move(components)) {
    const std::size_t n = components_.size();
    if (n == 0) {
        throw InputError("fluid system has no components");
    }
    std::set<std::string> seen;
    for (const auto& c : components_) {
        auto fail = [&c](const std::string& field, const std::string& why) {
            throw InputError("component '" + c.name + "': " + field + " " + why);
        };
        if (c.name.empty()) {
            throw InputError("component with empty name");
        }
        if (!seen.insert(c.name).second) {
            throw InputError("duplicate component name '" + c.name + "'");
        }
        if (!(c.tc > 0.0)) fail("tc", "must be positive");
        if (!(c.pc > 0.0)) fail("pc", "must be positive");
        if (!(c.mw > 0.0)) fail("mw", "must be positive");
        if (!(c.zc > 0.0 && c.zc < 1.0)) fail("zc", "must lie in (0, 1)");
        if (!std::isfinite(c.omega)) fail("omega", "must be finite");
        if (!(c.cp_ig.t_min > 0.0 && c.cp_ig.t_max > c.cp_ig.t_min)) {
            fail("cp_range", "must be an increasing pair of positive temperatures");
        }
        // Cubic cp: checking a dense grid is enough to catch sign changes.
        for (int k = 0; k <= 200; ++k) {
            const double t = c.cp_ig.t_min + (c.cp_ig.t_max - c.cp_ig.t_min) * k / 200.0;
            if (!(c.cp_ig.cp(t) > 0.0)) fail("cp_ig", "is not positive over cp_range");
        }
        if (c.costald && !(c.costald->v_star > 0.0)) fail("costald.v_star", "must be positive");
    }

    if (bip.size() != n) {
        throw InputError("bip must have " + std::to_string(n) + " rows");
    }
    bip_.assign(n * n, 0.0);
    std::vector<bool> set(n * n, false);
    auto put = [&](std::size_t i, std::size_t j, double v) {
        if (!std::isfinite(v)) {
            throw InputError("bip(" + components_[i].name + "," + components_[j].name + ") is not finite");
        }
        for (auto [r, c] : {std::pair{i, j}, std::pair{j, i}}) {
            if (set[r * n + c] && bip_[r * n + c] != v) {
                throw InputError("bip(" + components_[i].name + "," + components_[j].name +
                                 ") has conflicting symmetric entries");
            }
            bip_[r * n + c] = v;
            set[r * n + c] = true;
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = bip[i];
        if (row.size() == n) {
            for (std::size_t j = 0; j < n; ++j) put(i, j, row[j]);
        } else if (row.size() == n - i) {
            for (std::size_t j = i; j < n; ++j) put(i, j, row[j - i]);
        } else {
            throw InputError("bip row for '" + components_[i].name + "' has " + std::to_string(row.size()) +
                             " entries; expected " + std::to_string(n - i) + " (upper triangle) or " +
                             std::to_string(n));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (bip_[i * n + i] != 0.0) {
            throw InputError("bip diagonal for '" + components_[i].name + "' must be zero");
        }
    }
}

std::optional<std::size_t> FluidSystem::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (components_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::string> FluidSystem::names() const {
    std::vector<std::string> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.name);
    return out;
}

Composition normalize(std::span<const double> raw) {
    if (raw.empty()) {
        throw InputError("cannot normalize an empty composition");
    }
    double sum = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v) || v < 0.0) {
            throw InputError("composition entries must be finite and nonnegative");
        }
        sum += v;
    }
    if (!(sum > 0.0)) {
        throw InputError("cannot normalize an all-zero composition");
    }
    std::vector<double> z(raw.begin(), raw.end());
    // Already normalized up to rounding: leave as is so normalize is idempotent.
    bool clean = std::abs(sum - 1.0) <= 4.0 * raw.size() * std::numeric_limits<double>::epsilon();
    for (double v : z) clean = clean && (v == 0.0 || v >= trace_fraction);
    if (clean) return Composition(std::move(z));
    for (double& v : z) {
        v /= sum;
        if (v < trace_fraction) v = 0.0;
    }
    const double total = std::accumulate(z.begin(), z.end(), 0.0);
    if (total != 1.0) {
        for (double& v : z) v /= total;
    }
    return Composition(std::move(z));
}

namespace {

double required_number(const json& obj, const char* key, const std::string& owner) {
    if (!obj.contains(key)) {
        throw InputError(owner + ": missing required field '" + key + "'");
    }
    if (!obj.at(key).is_number()) {
        throw InputError(owner + ": field '" + key + "' must be a number");
    }
    return obj.at(key).get<double>();
}

double round15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::strtod(buf, nullptr);
}

ComponentProps parse_component(const json& j, UnitSystem units) {
    ComponentProps c;
    if (!j.contains("name") || !j.at("name").is_string()) {
        throw InputError("component entry is missing 'name'");
    }
    c.name = j.at("name").get<std::string>();
    const std::string owner = "component '" + c.name + "'";
    const double tc = required_number(j, "tc", owner);
    const double pc = required_number(j, "pc", owner);
    c.tc = units == UnitSystem::Field ? units::rankine_to_kelvin(tc) : tc;
    c.pc = units == UnitSystem::Field ? units::psia_to_pa(pc) : pc;
    c.omega = required_number(j, "omega", owner);
    c.mw = required_number(j, "mw", owner);
    c.zc = required_number(j, "zc", owner);
    c.parachor = j.value("parachor", 0.0);
    c.vshift = j.value("vshift", 0.0);

    if (!j.contains("cp_ig") || !j.at("cp_ig").is_array() || j.at("cp_ig").size() != 4) {
        throw InputError(owner + ": field 'cp_ig' must be an array of 4 coefficients");
    }
    for (std::size_t k = 0; k < 4; ++k) c.cp_ig.coeffs[k] = j.at("cp_ig").at(k).get<double>();
    if (!j.contains("cp_range") || !j.at("cp_range").is_array() || j.at("cp_range").size() != 2) {
        throw InputError(owner + ": field 'cp_range' must be [t_min, t_max]");
    }
    c.cp_ig.t_min = j.at("cp_range").at(0).get<double>();
    c.cp_ig.t_max = j.at("cp_range").at(1).get<double>();

    if (j.contains("costald")) {
        const auto& cs = j.at("costald");
        c.costald = CostaldParams{required_number(cs, "v_star", owner + " costald"),
                                  required_number(cs, "omega_srk", owner + " costald")};
    }
    return c;
}

}  // namespace

FluidSystem parse_fluid_system(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("fluid file parse error: ") + e.what());
    }
    try {
        UnitSystem units;
        const std::string u = doc.value("units", "");
        if (u == "field") {
            units = UnitSystem::Field;
        } else if (u == "si") {
            units = UnitSystem::SI;
        } else {
            throw InputError("fluid file: 'units' must be \"field\" or \"si\"");
        }
        if (!doc.contains("components") || !doc.at("components").is_array()) {
            throw InputError("fluid file: missing 'components' array");
        }
        if (!doc.contains("bip") || !doc.at("bip").is_array()) {
            throw InputError("fluid file: missing 'bip' array");
        }
        std::vector<ComponentProps> comps;
        for (const auto& jc : doc.at("components")) comps.push_back(parse_component(jc, units));
        auto bip = doc.at("bip").get<std::vector<std::vector<double>>>();

        FluidSystem fluid(std::move(comps), std::move(bip));
        fluid.declared_units = units;
        fluid.name = doc.value("name", "");
        if (doc.contains("metadata")) {
            const auto& meta = doc.at("metadata");
            fluid.cp_source = meta.value("cp_source", "");
            fluid.costald_source = meta.value("costald_source", "");
            fluid.notes = meta.value("notes", std::vector<std::string>{});
        }
        return fluid;
    } catch (const json::exception& e) {
        throw InputError(std::string("fluid file schema error: ") + e.what());
    }
}

FluidSystem load_fluid_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open fluid file '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_fluid_system(buf.str());
}

std::string serialize_fluid_system(const FluidSystem& fluid) {
    const bool field = fluid.declared_units == UnitSystem::Field;
    json doc;
    doc["name"] = fluid.name;
    doc["units"] = field ? "field" : "si";
    doc["metadata"] = {{"cp_source", fluid.cp_source},
                       {"costald_source", fluid.costald_source},
                       {"notes", fluid.notes}};
    json comps = json::array();
    for (const auto& c : fluid.components()) {
        json jc;
        jc["name"] = c.name;
        jc["tc"] = field ? round15(units::kelvin_to_rankine(c.tc)) : c.tc;
        jc["pc"] = field ? round15(units::pa_to_psia(c.pc)) : c.pc;
        jc["omega"] = c.omega;
        jc["mw"] = c.mw;
        jc["zc"] = c.zc;
        jc["parachor"] = c.parachor;
        jc["vshift"] = c.vshift;
        jc["cp_ig"] = c.cp_ig.coeffs;
        jc["cp_range"] = {c.cp_ig.t_min, c.cp_ig.t_max};
        if (c.costald) {
            jc["costald"] = {{"v_star", c.costald->v_star}, {"omega_srk", c.costald->omega_srk}};
        }
        comps.push_back(std::move(jc));
    }
    doc["components"] = std::move(comps);
    json bip = json::array();
    for (std::size_t i = 0; i < fluid.size(); ++i) {
        std::vector<double> row;
        for (std::size_t j = i; j < fluid.size(); ++j) row.push_back(fluid.bip(i, j));
        bip.push_back(row);
    }
    doc["bip"] = std::move(bip);
    return doc.dump(2);
}

}  // namespace chokeflow
