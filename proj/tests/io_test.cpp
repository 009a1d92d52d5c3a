#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "chokeflow/errors.hpp"
#include "chokeflow/io.hpp"
#include "support/fixture.hpp"

using namespace chokeflow;
using fixture::data;
using fixture::model;

namespace {

const FluidSystem& fluid() { return model().eos.fluid(); }

io::CsvTable table_of(const std::string& text) {
    std::istringstream in(text);
    return io::parse_csv(in, "inline");
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Format, TwelveSignificantDigits) {
    EXPECT_EQ(io::format_number(0.0), "0");
    EXPECT_EQ(io::format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(io::format_number(98.491417298208873), "98.4914172982");
    EXPECT_EQ(io::format_number(-2.5), "-2.5");
    EXPECT_EQ(io::format_number(1e-20), "1e-20");
    EXPECT_EQ(io::format_number(2774.0), "2774");
}

TEST(Csv, SkipsCommentsAndBlankLines) {
    const auto t = table_of("# note\n\na,b\n1,2\n\n# more\n3,4\n");
    ASSERT_EQ(t.header.size(), 2u);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1][0], "3");
    EXPECT_EQ(t.column("b"), 1u);
}

TEST(Csv, MissingColumnIsNamed) {
    const auto t = table_of("day,p_in_bara,t_in_c,p_out_bara\n1,96,66,66\n");
    const auto msg = message_of([&] { io::parse_measurements(t); });
    EXPECT_NE(msg.find("t_out_c"), std::string::npos) << msg;
}

TEST(Csv, RaggedRowAndBadNumber) {
    EXPECT_THROW(io::parse_measurements(table_of("day,p_in_bara,t_in_c,p_out_bara,t_out_c\n1,96,66\n")),
                 InputError);
    EXPECT_THROW(io::parse_measurements(table_of("day,p_in_bara,t_in_c,p_out_bara,t_out_c\n1,96,abc,66,65\n")),
                 InputError);
    EXPECT_THROW(io::read_csv("/nonexistent/file.csv"), InputError);
}

TEST(Profile, BundledFixture) {
    const auto profile = io::parse_profile(io::read_csv(data("fixture_profile.csv")), fluid());
    ASSERT_EQ(profile.size(), 100u);
    EXPECT_EQ(profile[0].day, 1.0);
    EXPECT_NEAR(profile[0].t_in, 339.15, 1e-12);
    EXPECT_NEAR(profile[0].p_in - profile[0].p_out, 30e5, 1e-6);
    EXPECT_EQ(profile[0].z, normalize({0.5, 0.03, 0.07, 0.2, 0.15, 0.05}));
}

TEST(Profile, RoundTrip) {
    const auto profile = io::parse_profile(io::read_csv(data("fixture_profile.csv")), fluid());
    std::ostringstream a;
    io::write_profile(a, fluid(), profile);
    // Parsing renormalizes the 12-digit fractions, so values agree to that precision.
    const auto again = io::parse_profile(table_of(a.str()), fluid());
    ASSERT_EQ(again.size(), profile.size());
    for (std::size_t k = 0; k < profile.size(); ++k) {
        EXPECT_EQ(again[k].day, profile[k].day);
        EXPECT_EQ(again[k].p_out, profile[k].p_out);
        for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(again[k].z[i], profile[k].z[i], 1e-12);
    }
}

TEST(Profile, ComponentColumnsMustMatchFluid) {
    const auto msg = message_of([&] {
        io::parse_profile(table_of("day,p_in_bara,t_in_c,p_out_bara,z_C1,z_C3\n1,96,66,66,0.5,0.5\n"), fluid());
    });
    EXPECT_NE(msg.find("z_C6"), std::string::npos) << msg;
}

TEST(Measurements, RoundTripAndUnits) {
    const std::vector<ChokeMeasurement> ms{{1.5, 96e5, 339.15, 66e5, 336.0}, {2.0, 90e5, 340.0, 60e5, 338.25}};
    std::ostringstream a;
    io::write_measurements(a, ms);
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "day,p_in_bara,t_in_c,p_out_bara,t_out_c");
    const auto back = io::parse_measurements(table_of(a.str()));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_NEAR(back[0].p_in, 96e5, 1e-6);
    EXPECT_NEAR(back[0].t_out_meas, 336.0, 1e-9);
    EXPECT_NEAR(back[1].t_in, 340.0, 1e-9);
}

TEST(Truth, BundledFilesMatchForwardRun) {
    const auto& f = fixture::forward();
    std::ostringstream m, t;
    io::write_measurements(m, f.measurements);
    io::write_truth(t, fluid(), f.truth);
    std::ostringstream m_file, t_file;
    m_file << std::ifstream(data("fixture_measurements.csv")).rdbuf();
    t_file << std::ifstream(data("fixture_truth.csv")).rdbuf();
    EXPECT_EQ(m.str(), m_file.str());
    EXPECT_EQ(t.str(), t_file.str());
}

TEST(Truth, RoundTrip) {
    const auto truth = io::parse_truth(io::read_csv(data("fixture_truth.csv")), fluid());
    ASSERT_EQ(truth.size(), 100u);
    const auto& ref = fixture::forward().truth;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        EXPECT_NEAR(truth[k].gor, ref[k].gor, 1e-9 * ref[k].gor);
        EXPECT_NEAR(truth[k].f_g, ref[k].f_g, 1e-11);
        for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(truth[k].oil[i], ref[k].oil[i], 1e-11);
    }
}

TEST(Seeds, ParseAndValidate) {
    const auto seeds = io::parse_seeds(io::read_csv(data("two_root_seeds.csv")), fluid(), "file");
    EXPECT_EQ(seeds.oil, fixture::two_root_seeds().oil);
    EXPECT_EQ(seeds.gas, fixture::two_root_seeds().gas);
    EXPECT_EQ(seeds.provenance, "file");
    const auto msg = message_of([&] {
        io::parse_seeds(table_of("component,oil,gas\nC1,0.5,0.9\nC3,0.5,0.1\n"), fluid(), "");
    });
    EXPECT_NE(msg.find("missing component"), std::string::npos) << msg;
    EXPECT_THROW(io::parse_seeds(table_of("component,oil,gas\nC99,0.5,0.9\n"), fluid(), ""), InputError);
}

TEST(Estimates, ColumnsAndEmptyFields) {
    EstimationResult ok;
    ok.status = EstimationStatus::MultipleRoots;
    ok.f_g_est = 0.25;
    ok.gor_est = 80.0;
    ok.t_out_calc = 300.15;
    ok.residual = 1e-5;
    ok.iterations = 24;
    ok.z_est = normalize({1, 1, 1, 1, 1, 1});
    ok.candidates = {{0.25, 300.15, 1e-5, 80.0}, {0.75, 300.15, -2e-5, 120.0}};
    EstimationResult none;
    none.status = EstimationStatus::NoBracket;
    TruthRow truth{1.0, 0.25, 100.0, ok.z_est, ok.z_est, ok.z_est};
    const std::vector<ScoredEstimate> rows{score(0.01, 0, 1.0, ok, &truth), score(0.01, 1, 2.0, none, nullptr)};

    std::ostringstream out;
    io::write_estimates(out, fluid(), rows, true, "tolerance_c");
    const auto t = table_of(out.str());
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.header.front(), "tolerance_c");
    EXPECT_EQ(t.header.back(), "mpe_abs_pct");
    EXPECT_EQ(t.rows[0][t.column("status")], "MULTIPLE_ROOTS");
    EXPECT_EQ(t.rows[0][t.column("candidate_f_g")], "0.25;0.75");
    EXPECT_EQ(t.rows[0][t.column("t_out_calc_c")], "27");
    EXPECT_EQ(t.rows[0][t.column("delta_gor_signed_pct")], "-20");
    EXPECT_EQ(t.rows[0][t.column("mpe_abs_pct")], "0");
    EXPECT_EQ(t.rows[1][t.column("status")], "NO_BRACKET");
    EXPECT_EQ(t.rows[1][t.column("f_g_est")], "");
    EXPECT_EQ(t.rows[1][t.column("gor_true_sm3_sm3")], "");

    std::ostringstream plain;
    io::write_estimates(plain, fluid(), rows, false);
    const auto p = table_of(plain.str());
    EXPECT_EQ(p.header.front(), "day");
    EXPECT_EQ(p.header.back(), "candidate_f_g");
}
