#pragma once

// Shared inputs for the estimator, cli and acceptance tests.

#include <string>
#include <vector>

#include "chokeflow/estimator.hpp"
#include "chokeflow/io.hpp"
#include "chokeflow/process.hpp"

namespace fixture {

inline std::string data(const std::string& name) { return std::string(CHOKEFLOW_DATA_DIR) + "/" + name; }

inline const chokeflow::ProcessModel& model() {
    static const chokeflow::ProcessModel m{chokeflow::PengRobinson(chokeflow::load_fluid_system(data("spe5_fluid.json")))};
    return m;
}

struct Forward {
    std::vector<chokeflow::ProfileStep> profile;
    std::vector<chokeflow::ForwardStep> steps;
    std::vector<chokeflow::ChokeMeasurement> measurements;
    std::vector<chokeflow::TruthRow> truth;
    std::size_t max_gor_step = 0;
};

// The bundled 100-step profile pushed through the forward model.
inline const Forward& forward() {
    static const Forward f = [] {
        Forward out;
        out.profile = chokeflow::io::parse_profile(chokeflow::io::read_csv(data("fixture_profile.csv")),
                                                   model().eos.fluid());
        out.steps = chokeflow::forward_timeseries(model(), out.profile);
        out.measurements = chokeflow::io::measurements_of(out.steps);
        out.truth = chokeflow::io::truth_of(out.steps);
        for (std::size_t k = 0; k < out.truth.size(); ++k) {
            if (out.truth[k].gor > out.truth[out.max_gor_step].gor) out.max_gor_step = k;
        }
        return out;
    }();
    return f;
}

inline chokeflow::SeedPair seeds_at(std::size_t step) {
    const auto& t = forward().truth.at(step);
    return {t.oil, t.gas, "step " + std::to_string(step)};
}

// Low-GOR seeds for which the outlet temperature is not monotone in f_g:
// the measurement below is matched at two gas fractions.
inline chokeflow::SeedPair two_root_seeds() {
    return {chokeflow::normalize({0.30, 0.10, 0.20, 0.01, 0.28, 0.11}),
            chokeflow::normalize({0.03, 0.65, 0.09, 0.09, 0.02, 0.12}), "two-root"};
}

inline chokeflow::ChokeMeasurement two_root_measurement() { return {1.0, 82e5, 299.15, 52e5, 299.15 + 1.55}; }

}  // namespace fixture
