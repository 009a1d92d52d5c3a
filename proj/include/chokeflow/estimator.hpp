#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chokeflow/fluid.hpp"
#include "chokeflow/process.hpp"

namespace chokeflow {

struct SeedPair {
    Composition oil;  // x_i
    Composition gas;  // y_i
    std::string provenance;
};

enum class EstimationStatus { Converged, NoBracket, MultipleRoots, FlashFailure };

// Fixed uppercase tokens used in CSV output.
std::string to_string(EstimationStatus s);
std::optional<EstimationStatus> parse_status(const std::string& token);

struct RootCandidate {
    double f_g = 0.0;
    double t_out_calc = 0.0;  // K
    double residual = 0.0;    // K
    double gor = 0.0;         // Sm3/Sm3, NaN when the train failed
};

struct EstimationResult {
    double f_g_est = 0.0;
    Composition z_est;
    double gor_est = 0.0;
    double t_out_calc = 0.0;  // K
    double residual = 0.0;    // K, t_out_calc - t_out_meas
    int iterations = 0;       // residual evaluations
    EstimationStatus status = EstimationStatus::FlashFailure;
    std::vector<RootCandidate> candidates;  // every root found, ascending f_g
    // Outlet temperature envelope seen on the scan grid (NoBracket diagnostics).
    double t_out_min = 0.0;
    double t_out_max = 0.0;
    std::string message;

    bool has_estimate() const {
        return status == EstimationStatus::Converged || status == EstimationStatus::MultipleRoots;
    }
};

struct EstimatorOptions {
    int grid_points = 21;
    double f_g_tolerance = 1e-13;  // bracket width at which Brent gives up
    int max_brent_iterations = 100;
};

// T_out,calc(recombine(x, y, f_g)) - T_out,meas in K.
double residual_temperature(const ProcessModel& model, const SeedPair& seeds, const ChokeMeasurement& m,
                            double f_g);

// Uniform grid scan over f_g in [0, 1], Brent on every sign change until
// |residual| <= tol_t. With several roots the smallest f_g is selected and the
// status is MultipleRoots; select_candidate() re-picks.
EstimationResult solve_fg(const ProcessModel& model, const SeedPair& seeds, const ChokeMeasurement& m,
                          double tol_t, const EstimatorOptions& options = {});

// Makes candidates[index] the reported estimate.
void select_candidate(const SeedPair& seeds, EstimationResult& result, std::size_t index);

// Candidate whose GOR is closest to previous_gor; the smallest f_g without one.
std::size_t continuity_choice(const EstimationResult& result, std::optional<double> previous_gor);

// Per-step solve_fg; MultipleRoots resolved by GOR continuity with the last
// step that produced an estimate.
std::vector<EstimationResult> estimate_timeseries(const ProcessModel& model, const SeedPair& seeds,
                                                  const std::vector<ChokeMeasurement>& measurements, double tol_t,
                                                  const EstimatorOptions& options = {});

// Signed, 100 (est - ref) / ref.
double percent_error(double estimate, double reference);

struct MeanPercentError {
    double mpe = 0.0;
    std::vector<std::size_t> excluded;  // components with zero reference fraction
};

// (100 / N) sum |z_est - z_ref| / z_ref over components with z_ref > 0.
MeanPercentError mole_fraction_mpe(const Composition& estimate, const Composition& reference);

// Truth of one step as produced by the forward model.
struct TruthRow {
    double day = 0.0;
    double f_g = 0.0;
    double gor = 0.0;
    Composition oil;
    Composition gas;
    Composition z;
};

struct ScoredEstimate {
    double key = 0.0;  // tolerance (K) or seed day, depending on the sweep
    std::size_t step = 0;
    double day = 0.0;
    EstimationResult result;
    std::optional<double> gor_true;
    std::optional<double> delta_gor;  // %
    std::optional<double> mpe;        // %
};

// Attaches delta(GOR) and MPE when a truth row is available.
ScoredEstimate score(double key, std::size_t step, double day, EstimationResult result, const TruthRow* truth);

std::vector<ScoredEstimate> sweep_tolerance(const ProcessModel& model, const SeedPair& seeds,
                                            const std::vector<ChokeMeasurement>& measurements,
                                            const std::vector<double>& tolerances,
                                            const std::vector<TruthRow>* truth = nullptr,
                                            const EstimatorOptions& options = {});

struct SeedSweep {
    std::vector<ScoredEstimate> rows;
    std::vector<double> duplicate_days;  // dropped from the request
};

// One full-series estimation per seed day, seeds taken from that day's truth
// surface streams. Throws InputError when a seed day has no truth row.
SeedSweep sweep_seed_times(const ProcessModel& model, const std::vector<TruthRow>& truth,
                           const std::vector<ChokeMeasurement>& measurements, const std::vector<double>& seed_days,
                           double tol_t, const EstimatorOptions& options = {});

// Truth row whose day matches within 1e-6 days, or null.
const TruthRow* find_truth(const std::vector<TruthRow>& truth, double day);

// Seeds from the truth row of that day.
SeedPair seeds_from_truth(const std::vector<TruthRow>& truth, double day);

}  // namespace chokeflow
