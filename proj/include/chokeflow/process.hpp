#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chokeflow/eos.hpp"
#include "chokeflow/equilibrium.hpp"
#include "chokeflow/fluid.hpp"

namespace chokeflow {

struct StageConditions {
    double pressure = 0.0;     // Pa
    double temperature = 0.0;  // K
};

struct SeparatorTrain {
    std::vector<StageConditions> stages;
    StageConditions standard;

    // 20 bara / 50 C, then 4 bara / 40 C; standard conditions 1.01325 bara / 15 C.
    static SeparatorTrain default_train();
    void validate() const;
};

// JSON: {"stages": [{"p_bara": .., "t_celsius": ..}, ...],
//        "standard_conditions": {"p_bara": .., "t_celsius": ..}}
SeparatorTrain parse_separator_train(const std::string& json_text);
SeparatorTrain load_separator_train(const std::filesystem::path& path);

struct SurfaceStreams {
    Composition oil;  // stock-tank oil
    Composition gas;  // all separator and stock-tank gas
    double f_g = 0.0;                // gas moles / feed moles
    double gor = 0.0;                // Sm3/Sm3
    double oil_molar_volume = 0.0;   // m3/mol at standard conditions
    double gas_molar_volume = 0.0;   // m3/mol at standard conditions
    LiquidVolumeMode volume_mode = LiquidVolumeMode::ShiftedPR;
};

struct ChokeMeasurement {
    double day = 0.0;
    double p_in = 0.0;        // Pa
    double t_in = 0.0;        // K
    double p_out = 0.0;       // Pa
    double t_out_meas = 0.0;  // K
};

// Everything the forward and inverse paths share: the EOS, the surface train
// and the liquid-volume convention for GOR.
struct ProcessModel {
    PengRobinson eos;
    SeparatorTrain train = SeparatorTrain::default_train();
    LiquidVolumeMode volume_mode = LiquidVolumeMode::ShiftedPR;
};

// z = f_g y + (1 - f_g) x.
Composition recombine(const Composition& oil, const Composition& gas, double f_g);

struct ChokeResult {
    double t_out = 0.0;  // K
    double h_in = 0.0;   // J/mol
    PhaseEquilibrium inlet;
    PhaseEquilibrium outlet;
};

// Isenthalpic expansion from (p_in, t_in) to p_out.
ChokeResult choke_expand(const PengRobinson& eos, const Composition& z, double p_in, double t_in, double p_out,
                         const PhFlashOptions& options = {});

// Sequential PT flashes of the liquid through every stage and finally at
// standard conditions. Vapor from every flash is pooled into the surface gas.
SurfaceStreams separator_train(const PengRobinson& eos, const Composition& z, const SeparatorTrain& train,
                               LiquidVolumeMode mode = LiquidVolumeMode::ShiftedPR);
inline SurfaceStreams separator_train(const ProcessModel& model, const Composition& z) {
    return separator_train(model.eos, z, model.train, model.volume_mode);
}

struct ProfileStep {
    double day = 0.0;
    Composition z;
    double p_in = 0.0;   // Pa
    double t_in = 0.0;   // K
    double p_out = 0.0;  // Pa
};

struct ForwardStep {
    std::size_t index = 0;
    ChokeMeasurement measurement;
    Composition z;
    SurfaceStreams truth;
    std::optional<std::string> error;  // set when the step failed

    bool ok() const { return !error.has_value(); }
};

// Steps are independent; a failing step is recorded and the run continues.
std::vector<ForwardStep> forward_timeseries(const ProcessModel& model, const std::vector<ProfileStep>& profile);

// Parameters of a synthetic wellstream history. The wellstream moves from the
// oil anchor towards the gas anchor and back, following
//   w(s) = w_max sin^2(pi s^k),  s = step / (steps - 1),  k = ln(1/2) / ln(s_peak)
// so the gas weight peaks at s_peak.
struct ProfileSynthesis {
    std::vector<double> oil_anchor;
    std::vector<double> gas_anchor;
    std::size_t steps = 100;
    double first_day = 1.0;
    double last_day = 2774.0;
    double peak_position = 0.6;
    double max_gas_weight = 0.85;
    double p_in = 96.0e5;    // Pa
    double t_in = 339.15;    // K
    double pressure_drop = 30.0e5;  // Pa
};

std::vector<ProfileStep> synthesize_profile(const ProfileSynthesis& params);

// Bundled synthetic history for the SPE5 fluid.
ProfileSynthesis default_profile_synthesis();

}  // namespace chokeflow
