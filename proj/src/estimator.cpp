#include "chokeflow/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "chokeflow/errors.hpp"
#include "chokeflow/numerics.hpp"

namespace chokeflow {

namespace {

constexpr double day_match = 1e-6;

void check_seeds(const ProcessModel& model, const SeedPair& seeds) {
    if (seeds.oil.size() != model.eos.size() || seeds.gas.size() != model.eos.size()) {
        throw InputError("seed compositions do not match the fluid system");
    }
}

double candidate_gor(const ProcessModel& model, const SeedPair& seeds, double f_g) {
    try {
        return separator_train(model, recombine(seeds.oil, seeds.gas, f_g)).gor;
    } catch (const InfiniteGorError&) {
        return std::numeric_limits<double>::infinity();
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Root of the inverse quadratic through three points, if it falls strictly
// inside (a, b).
std::optional<double> inverse_quadratic(double xc, double fc, double a, double fa, double b, double fb) {
    if (fa == fb || fa == fc || fb == fc) return std::nullopt;
    const double x = xc * fa * fb / ((fc - fa) * (fc - fb)) + a * fc * fb / ((fa - fc) * (fa - fb)) +
                     b * fc * fa / ((fb - fc) * (fb - fa));
    if (!(x > std::min(a, b) && x < std::max(a, b))) return std::nullopt;
    return x;
}

}  // namespace

const TruthRow* find_truth(const std::vector<TruthRow>& truth, double day) {
    for (const auto& row : truth) {
        if (std::abs(row.day - day) <= day_match) return &row;
    }
    return nullptr;
}

std::string to_string(EstimationStatus s) {
    switch (s) {
        case EstimationStatus::Converged: return "CONVERGED";
        case EstimationStatus::NoBracket: return "NO_BRACKET";
        case EstimationStatus::MultipleRoots: return "MULTIPLE_ROOTS";
        case EstimationStatus::FlashFailure: return "FLASH_FAILURE";
    }
    return "FLASH_FAILURE";
}

std::optional<EstimationStatus> parse_status(const std::string& token) {
    for (auto s : {EstimationStatus::Converged, EstimationStatus::NoBracket, EstimationStatus::MultipleRoots,
                   EstimationStatus::FlashFailure}) {
        if (to_string(s) == token) return s;
    }
    return std::nullopt;
}

double residual_temperature(const ProcessModel& model, const SeedPair& seeds, const ChokeMeasurement& m,
                            double f_g) {
    const auto z = recombine(seeds.oil, seeds.gas, f_g);
    try {
        return choke_expand(model.eos, z, m.p_in, m.t_in, m.p_out).t_out - m.t_out_meas;
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        char tag[48];
        std::snprintf(tag, sizeof tag, "f_g = %.10g: ", f_g);
        throw ConvergenceError(tag + std::string(e.what()), std::numeric_limits<double>::quiet_NaN());
    }
}

EstimationResult solve_fg(const ProcessModel& model, const SeedPair& seeds, const ChokeMeasurement& m,
                          double tol_t, const EstimatorOptions& options) {
    if (!(tol_t > 0.0)) {
        throw InputError("temperature tolerance must be positive");
    }
    if (options.grid_points < 2) {
        throw InputError("f_g scan needs at least two grid points");
    }
    check_seeds(model, seeds);

    EstimationResult res;
    int evaluations = 0;
    std::string failures;
    auto eval = [&](double f_g) -> std::optional<double> {
        ++evaluations;
        try {
            return residual_temperature(model, seeds, m, f_g);
        } catch (const Error& e) {
            if (failures.empty()) failures = e.what();
            return std::nullopt;
        }
    };

    const int n = options.grid_points;
    std::vector<double> grid(n);
    std::vector<std::optional<double>> r(n);
    res.t_out_min = std::numeric_limits<double>::infinity();
    res.t_out_max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        grid[j] = j == n - 1 ? 1.0 : static_cast<double>(j) / (n - 1);
        r[j] = eval(grid[j]);
        if (r[j]) {
            res.t_out_min = std::min(res.t_out_min, *r[j] + m.t_out_meas);
            res.t_out_max = std::max(res.t_out_max, *r[j] + m.t_out_meas);
        }
    }
    if (std::none_of(r.begin(), r.end(), [](const auto& v) { return v.has_value(); })) {
        res.status = EstimationStatus::FlashFailure;
        res.iterations = evaluations;
        res.t_out_min = res.t_out_max = std::numeric_limits<double>::quiet_NaN();
        res.message = "every grid point failed: " + failures;
        return res;
    }

    bool bracketed = false;
    bool refine_failed = false;
    for (int j = 0; j < n; ++j) {
        if (r[j] && *r[j] == 0.0) {
            bracketed = true;
            res.candidates.push_back({grid[j], m.t_out_meas, 0.0, 0.0});
            continue;
        }
        if (j + 1 == n || !r[j] || !r[j + 1] || *r[j + 1] == 0.0) continue;
        if ((*r[j] < 0.0) == (*r[j + 1] < 0.0)) continue;
        bracketed = true;
        double a = grid[j], b = grid[j + 1], fa = *r[j], fb = *r[j + 1];
        // Best point seen in this bracket, so a tighter tolerance (a longer
        // run of the same deterministic sequence) never returns a larger |residual|.
        double best_x = std::abs(fa) <= std::abs(fb) ? a : b;
        double best_f = std::abs(fa) <= std::abs(fb) ? fa : fb;
        bool failed = false;
        auto f = [&](double x) {
            if (failed) return 0.0;
            const auto v = eval(x);
            if (!v) {
                failed = true;
                return 0.0;
            }
            if (std::abs(*v) < std::abs(best_f)) {
                best_x = x;
                best_f = *v;
            }
            return *v;
        };
        if (std::abs(best_f) > tol_t) {
            // First step: inverse quadratic interpolation through a neighbouring
            // grid residual; Brent then works on the narrowed bracket.
            const int k = (j > 0 && r[j - 1]) ? j - 1 : (j + 2 < n && r[j + 2]) ? j + 2 : -1;
            const auto x0 = k < 0 ? std::nullopt : inverse_quadratic(grid[k], *r[k], a, fa, b, fb);
            if (x0) {
                const double f0 = f(*x0);
                if ((f0 < 0.0) == (fa < 0.0)) {
                    a = *x0;
                    fa = f0;
                } else {
                    b = *x0;
                    fb = f0;
                }
            }
            if (!failed && std::abs(best_f) > tol_t) {
                brent_root(f, a, b, fa, fb, tol_t, options.f_g_tolerance, options.max_brent_iterations);
            }
        }
        if (failed || !(std::abs(best_f) <= tol_t)) {
            refine_failed = true;
            continue;
        }
        res.candidates.push_back({best_x, best_f + m.t_out_meas, best_f, 0.0});
    }
    res.iterations = evaluations;

    if (res.candidates.empty()) {
        res.status = bracketed ? EstimationStatus::FlashFailure : EstimationStatus::NoBracket;
        if (!bracketed) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "measured T_out %.6g K outside achievable range [%.6g, %.6g] K",
                          m.t_out_meas, res.t_out_min, res.t_out_max);
            res.message = buf;
        } else {
            res.message = failures.empty() ? "root refinement did not reach the tolerance"
                                           : "root refinement failed: " + failures;
        }
        return res;
    }
    if (refine_failed) {
        res.message = "a bracket could not be refined; remaining roots reported";
    }

    for (auto& c : res.candidates) c.gor = candidate_gor(model, seeds, c.f_g);
    res.status = res.candidates.size() == 1 ? EstimationStatus::Converged : EstimationStatus::MultipleRoots;
    select_candidate(seeds, res, 0);
    return res;
}

void select_candidate(const SeedPair& seeds, EstimationResult& result, std::size_t index) {
    if (index >= result.candidates.size()) {
        throw InputError("candidate index out of range");
    }
    const auto& c = result.candidates[index];
    result.f_g_est = c.f_g;
    result.t_out_calc = c.t_out_calc;
    result.residual = c.residual;
    result.z_est = recombine(seeds.oil, seeds.gas, c.f_g);
    result.gor_est = c.gor;
}

std::size_t continuity_choice(const EstimationResult& result, std::optional<double> previous_gor) {
    if (!previous_gor || !std::isfinite(*previous_gor)) return 0;
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        const double g = result.candidates[i].gor;
        const double d = std::isfinite(g) ? std::abs(g - *previous_gor) : std::numeric_limits<double>::infinity();
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

std::vector<EstimationResult> estimate_timeseries(const ProcessModel& model, const SeedPair& seeds,
                                                  const std::vector<ChokeMeasurement>& measurements, double tol_t,
                                                  const EstimatorOptions& options) {
    if (!(tol_t > 0.0)) {
        throw InputError("temperature tolerance must be positive");
    }
    check_seeds(model, seeds);
    for (std::size_t k = 1; k < measurements.size(); ++k) {
        if (measurements[k].day < measurements[k - 1].day) {
            throw InputError("measurements must be time-ordered");
        }
    }
    std::vector<EstimationResult> out;
    out.reserve(measurements.size());
    std::optional<double> previous_gor;
    for (const auto& m : measurements) {
        EstimationResult r;
        try {
            r = solve_fg(model, seeds, m, tol_t, options);
        } catch (const InputError&) {
            throw;
        } catch (const Error& e) {
            r.status = EstimationStatus::FlashFailure;
            r.message = e.what();
        }
        if (r.status == EstimationStatus::MultipleRoots) {
            select_candidate(seeds, r, continuity_choice(r, previous_gor));
        }
        if (r.has_estimate()) previous_gor = r.gor_est;
        out.push_back(std::move(r));
    }
    return out;
}

double percent_error(double estimate, double reference) {
    if (reference == 0.0) {
        throw InputError("percent error needs a nonzero reference");
    }
    return 100.0 * (estimate - reference) / reference;
}

MeanPercentError mole_fraction_mpe(const Composition& estimate, const Composition& reference) {
    if (estimate.size() != reference.size()) {
        throw InputError("compositions have different lengths");
    }
    MeanPercentError out;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        if (reference[i] > 0.0) {
            sum += std::abs(estimate[i] - reference[i]) / reference[i];
            ++count;
        } else {
            out.excluded.push_back(i);
        }
    }
    if (count == 0) {
        throw InputError("reference composition has no nonzero fraction");
    }
    out.mpe = 100.0 * sum / static_cast<double>(count);
    return out;
}

ScoredEstimate score(double key, std::size_t step, double day, EstimationResult result, const TruthRow* truth) {
    ScoredEstimate s;
    s.key = key;
    s.step = step;
    s.day = day;
    if (truth) {
        s.gor_true = truth->gor;
        if (result.has_estimate()) {
            if (std::isfinite(result.gor_est) && truth->gor != 0.0) {
                s.delta_gor = percent_error(result.gor_est, truth->gor);
            }
            s.mpe = mole_fraction_mpe(result.z_est, truth->z).mpe;
        }
    }
    s.result = std::move(result);
    return s;
}

std::vector<ScoredEstimate> sweep_tolerance(const ProcessModel& model, const SeedPair& seeds,
                                            const std::vector<ChokeMeasurement>& measurements,
                                            const std::vector<double>& tolerances,
                                            const std::vector<TruthRow>* truth, const EstimatorOptions& options) {
    if (tolerances.empty()) {
        throw InputError("tolerance sweep needs at least one tolerance");
    }
    for (double t : tolerances) {
        if (!(t > 0.0)) throw InputError("tolerances must be positive");
    }
    std::vector<ScoredEstimate> rows;
    rows.reserve(tolerances.size() * measurements.size());
    for (double tol : tolerances) {
        auto series = estimate_timeseries(model, seeds, measurements, tol, options);
        for (std::size_t k = 0; k < series.size(); ++k) {
            const double day = measurements[k].day;
            rows.push_back(score(tol, k, day, std::move(series[k]), truth ? find_truth(*truth, day) : nullptr));
        }
    }
    return rows;
}

SeedPair seeds_from_truth(const std::vector<TruthRow>& truth, double day) {
    const auto* row = find_truth(truth, day);
    if (!row) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "seed day %.10g not found in truth data", day);
        throw InputError(buf);
    }
    char tag[64];
    std::snprintf(tag, sizeof tag, "truth surface streams, day %.10g", row->day);
    return {row->oil, row->gas, tag};
}

SeedSweep sweep_seed_times(const ProcessModel& model, const std::vector<TruthRow>& truth,
                           const std::vector<ChokeMeasurement>& measurements, const std::vector<double>& seed_days,
                           double tol_t, const EstimatorOptions& options) {
    if (seed_days.empty()) {
        throw InputError("seed-time sweep needs at least one seed day");
    }
    SeedSweep out;
    std::vector<double> days;
    for (double d : seed_days) {
        const bool dup = std::any_of(days.begin(), days.end(), [&](double e) { return std::abs(e - d) <= day_match; });
        if (dup) {
            out.duplicate_days.push_back(d);
        } else {
            days.push_back(d);
        }
    }
    std::vector<SeedPair> pairs;
    for (double d : days) pairs.push_back(seeds_from_truth(truth, d));

    for (std::size_t s = 0; s < days.size(); ++s) {
        auto series = estimate_timeseries(model, pairs[s], measurements, tol_t, options);
        for (std::size_t k = 0; k < series.size(); ++k) {
            const double day = measurements[k].day;
            out.rows.push_back(score(days[s], k, day, std::move(series[k]), find_truth(truth, day)));
        }
    }
    return out;
}

}  // namespace chokeflow
