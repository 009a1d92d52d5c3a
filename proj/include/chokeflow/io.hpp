#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chokeflow/estimator.hpp"
#include "chokeflow/fluid.hpp"
#include "chokeflow/process.hpp"

namespace chokeflow::io {

// 12 significant digits, shortest form.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Throws InputError naming the column when absent.
    std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

// day,p_in_bara,t_in_c,p_out_bara,z_<component>...
std::vector<ProfileStep> parse_profile(const CsvTable& table, const FluidSystem& fluid);
void write_profile(std::ostream& out, const FluidSystem& fluid, const std::vector<ProfileStep>& profile);

// day,p_in_bara,t_in_c,p_out_bara,t_out_c
std::vector<ChokeMeasurement> parse_measurements(const CsvTable& table);
void write_measurements(std::ostream& out, const std::vector<ChokeMeasurement>& measurements);

// day,f_g,gor_sm3_sm3,x_*,y_*,z_*
std::vector<TruthRow> parse_truth(const CsvTable& table, const FluidSystem& fluid);
void write_truth(std::ostream& out, const FluidSystem& fluid, const std::vector<TruthRow>& truth);

// Successful forward steps as measurement and truth rows, in step order.
std::vector<ChokeMeasurement> measurements_of(const std::vector<ForwardStep>& steps);
std::vector<TruthRow> truth_of(const std::vector<ForwardStep>& steps);

// component,oil,gas
SeedPair parse_seeds(const CsvTable& table, const FluidSystem& fluid, const std::string& provenance);

// day,f_g_est,gor_est,t_out_calc_c,residual_c,status,iterations,z_*,candidate_f_g
// and, with truth, gor_true_sm3_sm3,delta_gor_signed_pct,mpe_abs_pct.
// key_column (tolerance_c or seed_day) is prepended when not empty.
void write_estimates(std::ostream& out, const FluidSystem& fluid, const std::vector<ScoredEstimate>& rows,
                     bool with_truth, const std::string& key_column = "");

}  // namespace chokeflow::io
