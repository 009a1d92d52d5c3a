#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "chokeflow/errors.hpp"
#include "chokeflow/estimator.hpp"
#include "support/fixture.hpp"

using namespace chokeflow;
using fixture::forward;
using fixture::model;

namespace {

double max_abs_diff(const Composition& a, const Composition& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

std::vector<ChokeMeasurement> first_measurements(std::size_t n) {
    const auto& all = forward().measurements;
    return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace

TEST(Fixture, ForwardRunIsComplete) {
    ASSERT_EQ(forward().steps.size(), 100u);
    EXPECT_EQ(forward().measurements.size(), 100u);
    EXPECT_EQ(forward().truth.size(), 100u);
    EXPECT_GT(forward().max_gor_step, 0u);
    EXPECT_LT(forward().max_gor_step, 99u);
}

TEST(Residual, VanishesAtTrueFraction) {
    for (std::size_t k : {0u, 37u, 80u}) {
        const auto& t = forward().truth[k];
        const double r = residual_temperature(model(), fixture::seeds_at(k), forward().measurements[k], t.f_g);
        EXPECT_LT(std::abs(r), 1e-4) << k;
    }
}

TEST(Residual, EndpointsArePureSeeds) {
    const auto seeds = fixture::seeds_at(20);
    const auto& m = forward().measurements[20];
    const double t_oil = choke_expand(model().eos, seeds.oil, m.p_in, m.t_in, m.p_out).t_out;
    const double t_gas = choke_expand(model().eos, seeds.gas, m.p_in, m.t_in, m.p_out).t_out;
    EXPECT_EQ(residual_temperature(model(), seeds, m, 0.0), t_oil - m.t_out_meas);
    EXPECT_EQ(residual_temperature(model(), seeds, m, 1.0), t_gas - m.t_out_meas);
}

TEST(Residual, OutOfRangeFraction) {
    EXPECT_THROW(residual_temperature(model(), fixture::seeds_at(0), forward().measurements[0], 1.5), InputError);
}

TEST(SolveFg, ScanMatchesBruteForceGrid) {
    const auto seeds = fixture::seeds_at(0);
    const auto& m = forward().measurements[50];
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k <= 20; ++k) {
        const auto z = recombine(seeds.oil, seeds.gas, k / 20.0);
        const double t = choke_expand(model().eos, z, m.p_in, m.t_in, m.p_out).t_out;
        EXPECT_EQ(residual_temperature(model(), seeds, m, k / 20.0), t - m.t_out_meas);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    const auto r = solve_fg(model(), seeds, m, 1e-4);
    EXPECT_EQ(r.t_out_min, lo);
    EXPECT_EQ(r.t_out_max, hi);
}

TEST(SolveFg, SameStepSeedsRecoverTheWellstream) {
    const double tol = 1e-4;
    for (std::size_t k = 0; k < 100; k += 9) {
        const auto& t = forward().truth[k];
        const auto r = solve_fg(model(), fixture::seeds_at(k), forward().measurements[k], tol);
        ASSERT_EQ(r.status, EstimationStatus::Converged) << k;
        EXPECT_LE(std::abs(r.residual), tol);
        EXPECT_GE(r.f_g_est, 0.0);
        EXPECT_LE(r.f_g_est, 1.0);
        EXPECT_LT(max_abs_diff(r.z_est, t.z), 5e-4) << k;
        EXPECT_LT(std::abs(percent_error(r.gor_est, t.gor)), 0.5) << k;
        EXPECT_NEAR(r.t_out_calc - r.residual, forward().measurements[k].t_out_meas, 1e-9);
        EXPECT_GT(r.iterations, 21);
    }
}

TEST(SolveFg, UnreachableMeasurementHasNoBracket) {
    const auto seeds = fixture::seeds_at(0);
    auto m = forward().measurements[0];
    const auto base = solve_fg(model(), seeds, m, 1e-3);
    m.t_out_meas = base.t_out_max + 20.0;
    const auto r = solve_fg(model(), seeds, m, 1e-3);
    EXPECT_EQ(r.status, EstimationStatus::NoBracket);
    EXPECT_FALSE(r.has_estimate());
    EXPECT_TRUE(r.candidates.empty());
    EXPECT_EQ(r.t_out_max, base.t_out_max);
    EXPECT_LT(r.t_out_min, r.t_out_max);
    EXPECT_NE(r.message.find("outside"), std::string::npos);
}

TEST(SolveFg, TwoRootFixture) {
    const double tol = 1e-4;
    const auto seeds = fixture::two_root_seeds();
    auto r = solve_fg(model(), seeds, fixture::two_root_measurement(), tol);
    ASSERT_EQ(r.status, EstimationStatus::MultipleRoots);
    ASSERT_GE(r.candidates.size(), 2u);
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        EXPECT_LE(std::abs(r.candidates[i].residual), tol);
        if (i > 0) EXPECT_GT(r.candidates[i].f_g, r.candidates[i - 1].f_g);
    }
    // Default is the smallest gas fraction.
    EXPECT_EQ(r.f_g_est, r.candidates.front().f_g);
    EXPECT_NEAR(r.candidates[0].f_g, 0.270994, 1e-4);
    EXPECT_NEAR(r.candidates[1].f_g, 0.797648, 1e-4);
    EXPECT_LT(r.candidates[0].gor, 150.0);
    EXPECT_LT(r.candidates[1].gor, 150.0);

    select_candidate(seeds, r, 1);
    EXPECT_EQ(r.f_g_est, r.candidates[1].f_g);
    EXPECT_EQ(r.z_est, recombine(seeds.oil, seeds.gas, r.candidates[1].f_g));
    EXPECT_THROW(select_candidate(seeds, r, 7), InputError);

    EXPECT_EQ(continuity_choice(r, std::nullopt), 0u);
    EXPECT_EQ(continuity_choice(r, r.candidates[1].gor + 5.0), 1u);
    EXPECT_EQ(continuity_choice(r, r.candidates[0].gor - 5.0), 0u);
}

TEST(SolveFg, InvalidInput) {
    const auto seeds = fixture::seeds_at(0);
    EXPECT_THROW(solve_fg(model(), seeds, forward().measurements[0], 0.0), InputError);
    EXPECT_THROW(solve_fg(model(), seeds, forward().measurements[0], -1.0), InputError);
    const SeedPair short_seeds{normalize({0.5, 0.5}), normalize({0.5, 0.5}), ""};
    EXPECT_THROW(solve_fg(model(), short_seeds, forward().measurements[0], 1e-3), InputError);
}

TEST(SolveFg, Deterministic) {
    const auto seeds = fixture::seeds_at(0);
    const auto a = solve_fg(model(), seeds, forward().measurements[60], 1e-4);
    const auto b = solve_fg(model(), seeds, forward().measurements[60], 1e-4);
    EXPECT_EQ(a.f_g_est, b.f_g_est);
    EXPECT_EQ(a.gor_est, b.gor_est);
    EXPECT_EQ(a.residual, b.residual);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.z_est, b.z_est);
}

TEST(SolveFg, TighterToleranceNeverWorsensResidual) {
    const auto seeds = fixture::seeds_at(0);
    for (std::size_t k = 0; k < 100; k += 11) {
        double previous = 1e300;
        for (double tol : {0.1, 0.01, 0.001, 0.0001}) {
            const auto r = solve_fg(model(), seeds, forward().measurements[k], tol);
            ASSERT_TRUE(r.has_estimate());
            EXPECT_LE(std::abs(r.residual), tol);
            EXPECT_LE(std::abs(r.residual), previous) << k << " " << tol;
            previous = std::abs(r.residual);
        }
    }
}

TEST(Timeseries, InitialSeedsConvergeEverywhere) {
    const auto results = estimate_timeseries(model(), fixture::seeds_at(0), forward().measurements, 1e-4);
    ASSERT_EQ(results.size(), 100u);
    for (const auto& r : results) EXPECT_EQ(r.status, EstimationStatus::Converged);
}

TEST(Timeseries, CorruptedStepIsIsolated) {
    const auto seeds = fixture::seeds_at(0);
    auto ms = first_measurements(5);
    const auto clean = estimate_timeseries(model(), seeds, ms, 1e-3);
    ms[2].t_out_meas += 25.0;
    const auto dirty = estimate_timeseries(model(), seeds, ms, 1e-3);
    EXPECT_EQ(dirty[2].status, EstimationStatus::NoBracket);
    for (std::size_t k : {0u, 1u, 3u, 4u}) {
        EXPECT_EQ(dirty[k].status, EstimationStatus::Converged);
        EXPECT_EQ(dirty[k].f_g_est, clean[k].f_g_est);
    }
}

TEST(Timeseries, EmptyAndUnordered) {
    EXPECT_TRUE(estimate_timeseries(model(), fixture::seeds_at(0), {}, 1e-3).empty());
    auto ms = first_measurements(3);
    std::swap(ms[0], ms[2]);
    EXPECT_THROW(estimate_timeseries(model(), fixture::seeds_at(0), ms, 1e-3), InputError);
    EXPECT_THROW(estimate_timeseries(model(), fixture::seeds_at(0), first_measurements(2), 0.0), InputError);
}

TEST(Timeseries, ContinuityPicksRootNearPreviousGor) {
    const auto seeds = fixture::two_root_seeds();
    const auto m = fixture::two_root_measurement();
    const auto single = solve_fg(model(), seeds, m, 1e-4);
    ASSERT_EQ(single.candidates.size(), 2u);
    // The same measurement twice: the second step stays on the first step's root.
    auto second = m;
    second.day = 2.0;
    const auto r = estimate_timeseries(model(), seeds, {m, second}, 1e-4);
    EXPECT_EQ(r[0].f_g_est, single.candidates[0].f_g);
    EXPECT_EQ(r[1].f_g_est, single.candidates[0].f_g);
    EXPECT_EQ(r[1].status, EstimationStatus::MultipleRoots);
}

TEST(Metrics, PercentError) {
    EXPECT_EQ(percent_error(100.0, 100.0), 0.0);
    EXPECT_NEAR(percent_error(112.0, 100.0), 12.0, 1e-12);
    EXPECT_NEAR(percent_error(88.0, 100.0), -12.0, 1e-12);
    EXPECT_THROW(percent_error(1.0, 0.0), InputError);
}

TEST(Metrics, MeanPercentError) {
    const auto ref = normalize({0.5, 0.5});
    EXPECT_EQ(mole_fraction_mpe(ref, ref).mpe, 0.0);
    EXPECT_NEAR(mole_fraction_mpe(normalize({0.55, 0.45}), ref).mpe, 10.0, 1e-12);
    const auto with_zero = normalize({0.5, 0.0, 0.5});
    const auto m = mole_fraction_mpe(normalize({0.55, 0.0, 0.45}), with_zero);
    EXPECT_NEAR(m.mpe, 10.0, 1e-12);
    ASSERT_EQ(m.excluded.size(), 1u);
    EXPECT_EQ(m.excluded[0], 1u);
    EXPECT_THROW(mole_fraction_mpe(ref, with_zero), InputError);
}

TEST(Metrics, StatusTokens) {
    for (auto s : {EstimationStatus::Converged, EstimationStatus::NoBracket, EstimationStatus::MultipleRoots,
                   EstimationStatus::FlashFailure}) {
        EXPECT_EQ(parse_status(to_string(s)), s);
    }
    EXPECT_EQ(to_string(EstimationStatus::NoBracket), "NO_BRACKET");
    EXPECT_FALSE(parse_status("converged").has_value());
}

TEST(Sweep, ToleranceValidation) {
    const auto seeds = fixture::seeds_at(0);
    const auto ms = first_measurements(2);
    EXPECT_THROW(sweep_tolerance(model(), seeds, ms, {}), InputError);
    EXPECT_THROW(sweep_tolerance(model(), seeds, ms, {0.01, 0.0}), InputError);
    EXPECT_THROW(sweep_tolerance(model(), seeds, ms, {-0.1}), InputError);
}

TEST(Sweep, SingleToleranceIsTheTimeseries) {
    const auto seeds = fixture::seeds_at(0);
    const auto ms = first_measurements(4);
    const auto rows = sweep_tolerance(model(), seeds, ms, {0.01}, &forward().truth);
    const auto series = estimate_timeseries(model(), seeds, ms, 0.01);
    ASSERT_EQ(rows.size(), series.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_EQ(rows[k].key, 0.01);
        EXPECT_EQ(rows[k].step, k);
        EXPECT_EQ(rows[k].result.f_g_est, series[k].f_g_est);
        ASSERT_TRUE(rows[k].delta_gor.has_value());
        EXPECT_EQ(*rows[k].delta_gor, percent_error(series[k].gor_est, forward().truth[k].gor));
        ASSERT_TRUE(rows[k].mpe.has_value());
    }
}

TEST(Sweep, ToleranceRowsPerTolerance) {
    const auto rows = sweep_tolerance(model(), fixture::seeds_at(0), first_measurements(3), {0.1, 0.01, 0.001});
    ASSERT_EQ(rows.size(), 9u);
    EXPECT_EQ(rows[3].key, 0.01);
    EXPECT_FALSE(rows[0].gor_true.has_value());
}

TEST(Sweep, SeedTimes) {
    const auto& truth = forward().truth;
    const auto ms = first_measurements(6);
    const double d0 = truth[0].day, d4 = truth[4].day;
    const auto sweep = sweep_seed_times(model(), truth, ms, {d0, d4, d0}, 1e-4);
    ASSERT_EQ(sweep.duplicate_days.size(), 1u);
    EXPECT_EQ(sweep.duplicate_days[0], d0);
    ASSERT_EQ(sweep.rows.size(), 12u);
    EXPECT_EQ(sweep.rows[0].key, d0);
    EXPECT_EQ(sweep.rows[6].key, d4);
    // Each seed reproduces its own step.
    for (const auto& row : {sweep.rows[0], sweep.rows[6 + 4]}) {
        ASSERT_TRUE(row.delta_gor && row.mpe);
        EXPECT_LT(std::abs(*row.delta_gor), 0.5);
        EXPECT_LT(*row.mpe, 0.5);
    }
    const auto one = sweep_seed_times(model(), truth, ms, {d4}, 1e-4);
    EXPECT_EQ(one.rows.size(), ms.size());
}

TEST(Sweep, SeedTimeErrors) {
    const auto& truth = forward().truth;
    const auto ms = first_measurements(2);
    EXPECT_THROW(sweep_seed_times(model(), truth, ms, {12345.0}, 1e-3), InputError);
    EXPECT_THROW(sweep_seed_times(model(), truth, ms, {}, 1e-3), InputError);
    EXPECT_EQ(find_truth(truth, truth[3].day + 5e-7), &truth[3]);
    EXPECT_EQ(find_truth(truth, truth[3].day + 1e-3), nullptr);
}

TEST(Sweep, SeedLocality) {
    const auto& truth = forward().truth;
    const std::size_t peak = forward().max_gor_step;
    auto delta_at = [&](const SeedPair& seeds, std::size_t k) {
        const auto r = solve_fg(model(), seeds, forward().measurements[k], 1e-4);
        return std::abs(percent_error(r.gor_est, truth[k].gor));
    };
    const auto early = fixture::seeds_at(0);
    const auto late = fixture::seeds_at(peak);
    EXPECT_LT(delta_at(early, 0), delta_at(early, peak));
    EXPECT_LT(delta_at(late, peak), delta_at(late, 0));
}
