#include "chokeflow/process.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "chokeflow/errors.hpp"
#include "chokeflow/units.hpp"

namespace chokeflow {

SeparatorTrain SeparatorTrain::default_train() {
    SeparatorTrain t;
    t.stages = {{units::bar_to_pa(20.0), units::celsius_to_kelvin(50.0)},
                {units::bar_to_pa(4.0), units::celsius_to_kelvin(40.0)}};
    t.standard = {units::bar_to_pa(1.01325), units::celsius_to_kelvin(15.0)};
    return t;
}

void SeparatorTrain::validate() const {
    if (stages.empty()) {
        throw InputError("separator train needs at least one stage");
    }
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (!(stages[i].pressure > 0.0) || !(stages[i].temperature > 0.0)) {
            throw InputError("separator stage " + std::to_string(i + 1) + " needs positive P and T");
        }
        if (i > 0 && !(stages[i].pressure < stages[i - 1].pressure)) {
            throw InputError("separator stage pressures must be strictly decreasing");
        }
    }
    if (!(standard.pressure > 0.0) || !(standard.temperature > 0.0)) {
        throw InputError("standard conditions need positive P and T");
    }
}

SeparatorTrain parse_separator_train(const std::string& json_text) {
    using nlohmann::json;
    try {
        const auto doc = json::parse(json_text);
        auto stage = [](const json& j) {
            return StageConditions{units::bar_to_pa(j.at("p_bara").get<double>()),
                                   units::celsius_to_kelvin(j.at("t_celsius").get<double>())};
        };
        SeparatorTrain t;
        for (const auto& s : doc.at("stages")) t.stages.push_back(stage(s));
        t.standard = stage(doc.at("standard_conditions"));
        t.validate();
        return t;
    } catch (const json::exception& e) {
        throw InputError(std::string("train file: ") + e.what());
    }
}

SeparatorTrain load_separator_train(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open train file '" + path.string() + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_separator_train(buf.str());
}

Composition recombine(const Composition& oil, const Composition& gas, double f_g) {
    if (!(f_g >= 0.0 && f_g <= 1.0)) {
        throw InputError("recombination fraction f_g must lie in [0, 1]");
    }
    if (oil.size() != gas.size()) {
        throw InputError("seed oil and gas must have the same number of components");
    }
    std::vector<double> z(oil.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = f_g * gas[i] + (1.0 - f_g) * oil[i];
    return normalize(z);
}

ChokeResult choke_expand(const PengRobinson& eos, const Composition& z, double p_in, double t_in, double p_out,
                         const PhFlashOptions& options) {
    if (!(p_out > 0.0) || p_out > p_in) {
        throw InputError("choke expansion needs p_in >= p_out > 0");
    }
    ChokeResult out;
    out.inlet = pt_flash(eos, z, t_in, p_in, options.flash);
    out.h_in = mixture_enthalpy(eos, out.inlet, t_in, p_in);
    auto ph = ph_flash(eos, z, p_out, out.h_in, t_in, options);
    out.t_out = ph.temperature;
    out.outlet = std::move(ph.equilibrium);
    return out;
}

SurfaceStreams separator_train(const PengRobinson& eos, const Composition& z, const SeparatorTrain& train,
                               LiquidVolumeMode mode) {
    train.validate();
    const std::size_t n = z.size();
    std::vector<double> gas_moles(n, 0.0);
    Composition liquid = z;
    double liquid_moles = 1.0;

    std::vector<StageConditions> flashes = train.stages;
    flashes.push_back(train.standard);
    for (const auto& stage : flashes) {
        const auto eq = pt_flash(eos, liquid, stage.temperature, stage.pressure);
        const double vapor = liquid_moles * eq.beta;
        if (vapor > 0.0) {
            for (std::size_t i = 0; i < n; ++i) gas_moles[i] += vapor * eq.y[i];
        }
        liquid_moles -= vapor;
        if (eq.state == PhaseState::SinglePhaseVapor || !(liquid_moles > 0.0)) {
            throw InfiniteGorError("no stock-tank oil left after the separator train; GOR is unbounded");
        }
        liquid = eq.x;
    }

    SurfaceStreams s;
    s.volume_mode = mode;
    s.oil = liquid;
    double total_gas = 0.0;
    for (double g : gas_moles) total_gas += g;
    s.f_g = total_gas;
    s.gas = total_gas > 0.0 ? normalize(gas_moles) : liquid;

    const auto& std_c = train.standard;
    s.oil_molar_volume = eos.liquid_molar_volume(s.oil, std_c.temperature, std_c.pressure, mode).molar_volume;
    s.gas_molar_volume = eos.vapor_molar_volume(s.gas, std_c.temperature, std_c.pressure);
    s.gor = s.f_g * s.gas_molar_volume / ((1.0 - s.f_g) * s.oil_molar_volume);
    return s;
}

std::vector<ForwardStep> forward_timeseries(const ProcessModel& model, const std::vector<ProfileStep>& profile) {
    std::vector<ForwardStep> out(profile.size());
    for (std::size_t k = 0; k < profile.size(); ++k) {
        const auto& step = profile[k];
        auto& res = out[k];
        res.index = k;
        res.z = step.z;
        res.measurement = {step.day, step.p_in, step.t_in, step.p_out, 0.0};
        try {
            if (step.z.size() != model.eos.size()) {
                throw InputError("composition does not match the fluid system");
            }
            res.measurement.t_out_meas = choke_expand(model.eos, step.z, step.p_in, step.t_in, step.p_out).t_out;
            res.truth = separator_train(model, step.z);
        } catch (const Error& e) {
            res.error = e.what();
        }
    }
    return out;
}

std::vector<ProfileStep> synthesize_profile(const ProfileSynthesis& params) {
    if (params.steps < 2) {
        throw InputError("profile synthesis needs at least two steps");
    }
    if (params.oil_anchor.size() != params.gas_anchor.size()) {
        throw InputError("profile anchors must have the same length");
    }
    if (!(params.peak_position > 0.0 && params.peak_position < 1.0)) {
        throw InputError("peak_position must lie in (0, 1)");
    }
    const auto oil = normalize(params.oil_anchor);
    const auto gas = normalize(params.gas_anchor);
    const double shape = std::log(0.5) / std::log(params.peak_position);
    std::vector<ProfileStep> out;
    out.reserve(params.steps);
    for (std::size_t k = 0; k < params.steps; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(params.steps - 1);
        const double sn = std::sin(std::numbers::pi * std::pow(s, shape));
        const double w = params.max_gas_weight * sn * sn;
        ProfileStep step;
        step.day = params.first_day + s * (params.last_day - params.first_day);
        step.z = recombine(oil, gas, w);
        step.p_in = params.p_in;
        step.t_in = params.t_in;
        step.p_out = params.p_in - params.pressure_drop;
        out.push_back(std::move(step));
    }
    return out;
}

ProfileSynthesis default_profile_synthesis() {
    ProfileSynthesis params;
    // Initial SPE5 reservoir oil and a lean, gas-cap-like stream.
    params.oil_anchor = {0.50, 0.03, 0.07, 0.20, 0.15, 0.05};
    params.gas_anchor = {0.80, 0.08, 0.05, 0.04, 0.02, 0.01};
    return params;
}

}  // namespace chokeflow
