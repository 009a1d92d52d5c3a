#include "chokeflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chokeflow/errors.hpp"
#include "chokeflow/estimator.hpp"
#include "chokeflow/io.hpp"
#include "chokeflow/process.hpp"
#include "chokeflow/units.hpp"

namespace chokeflow::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string fluid;
    std::string train = "default";
    std::string liquid_volume = "shifted-pr";
    std::string out_dir = ".";
};

struct SeedSource {
    std::string seeds_path;
    bool from_truth = false;
    std::optional<double> day;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--fluid", c.fluid, "Fluid-system JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--train", c.train, "Separator train JSON file, or 'default'")->capture_default_str();
    cmd->add_option("--liquid-volume", c.liquid_volume, "Stock-tank oil volume: shifted-pr or costald")
        ->check(CLI::IsMember({"shifted-pr", "costald"}))
        ->capture_default_str();
    cmd->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
}

void add_seed_options(CLI::App* cmd, SeedSource& s) {
    cmd->add_option("--seeds", s.seeds_path, "Seed CSV: component,oil,gas")->check(CLI::ExistingFile);
    cmd->add_flag("--seed-from-truth", s.from_truth, "Take seeds from the truth CSV surface streams at --day");
    cmd->add_option("--day", s.day, "Day of the truth row used with --seed-from-truth");
}

ProcessModel make_model(const Common& c) {
    ProcessModel model{PengRobinson(load_fluid_system(c.fluid))};
    if (c.train != "default") model.train = load_separator_train(c.train);
    model.volume_mode = c.liquid_volume == "costald" ? LiquidVolumeMode::Costald : LiquidVolumeMode::ShiftedPR;
    return model;
}

SeedPair resolve_seeds(const SeedSource& s, const FluidSystem& fluid, const std::vector<TruthRow>* truth) {
    if (s.from_truth == !s.seeds_path.empty()) {
        throw InputError("give exactly one seed source: --seeds FILE or --seed-from-truth --day D");
    }
    if (s.from_truth) {
        if (!truth) throw InputError("--seed-from-truth needs --truth FILE");
        if (!s.day) throw InputError("--seed-from-truth needs --day D");
        return seeds_from_truth(*truth, *s.day);
    }
    return io::parse_seeds(io::read_csv(s.seeds_path), fluid, "seed file " + s.seeds_path);
}

nlohmann::json provenance(const std::string& command, const Common& c) {
    nlohmann::json j;
    j["command"] = command;
    j["fluid"] = c.fluid;
    j["train"] = c.train;
    j["liquid_volume"] = c.liquid_volume;
    return j;
}

// Files are only touched once all content exists; on a failed write every
// file of the batch is removed again.
void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    std::vector<fs::path> written;
    try {
        fs::create_directories(dir);
        for (const auto& [name, content] : files) {
            const auto path = dir / name;
            written.push_back(path);
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            f << content;
            f.close();
            if (!f) throw InputError("cannot write '" + path.string() + "'");
        }
    } catch (const fs::filesystem_error& e) {
        for (const auto& p : written) fs::remove(p);
        throw InputError(e.what());
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }
}

std::string fmt(double v) { return io::format_number(v); }

void summarize_estimates(std::ostream& out, const std::vector<ScoredEstimate>& rows) {
    std::map<std::string, int> counts;
    double gmin = INFINITY, gmax = -INFINITY, dmax = 0.0, mmax = 0.0;
    bool scored = false;
    for (const auto& r : rows) {
        ++counts[to_string(r.result.status)];
        if (r.result.has_estimate() && std::isfinite(r.result.gor_est)) {
            gmin = std::min(gmin, r.result.gor_est);
            gmax = std::max(gmax, r.result.gor_est);
        }
        if (r.delta_gor) {
            scored = true;
            dmax = std::max(dmax, std::abs(*r.delta_gor));
        }
        if (r.mpe) mmax = std::max(mmax, *r.mpe);
    }
    out << "rows: " << rows.size() << '\n';
    for (const auto& [status, n] : counts) out << "  " << status << ": " << n << '\n';
    if (gmin <= gmax) out << "GOR estimate range: " << fmt(gmin) << " .. " << fmt(gmax) << " Sm3/Sm3\n";
    if (scored) out << "max |delta GOR|: " << fmt(dmax) << " %, max MPE: " << fmt(mmax) << " %\n";
}

int cmd_profile(const Common& c, std::size_t steps, std::ostream& out) {
    const auto fluid = load_fluid_system(c.fluid);
    auto params = default_profile_synthesis();
    params.steps = steps;
    const auto profile = synthesize_profile(params);
    if (params.oil_anchor.size() != fluid.size()) {
        throw InputError("bundled profile anchors do not match the fluid system");
    }
    std::ostringstream csv;
    io::write_profile(csv, fluid, profile);
    write_outputs(c.out_dir, {{"profile.csv", csv.str()}});
    out << "profile: " << profile.size() << " steps written to " << (fs::path(c.out_dir) / "profile.csv").string()
        << '\n';
    return exit_ok;
}

int cmd_forward(const Common& c, const std::string& profile_path, std::ostream& out, std::ostream& err) {
    const auto model = make_model(c);
    const auto profile = io::parse_profile(io::read_csv(profile_path), model.eos.fluid());
    if (profile.empty()) {
        throw InputError("profile '" + profile_path + "' has no steps");
    }
    const auto steps = forward_timeseries(model, profile);

    const auto measurements = io::measurements_of(steps);
    const auto truth = io::truth_of(steps);
    std::ostringstream mcsv, tcsv;
    io::write_measurements(mcsv, measurements);
    io::write_truth(tcsv, model.eos.fluid(), truth);

    auto prov = provenance("forward", c);
    prov["profile"] = profile_path;
    prov["failed_steps"] = nlohmann::json::array();
    double gmin = INFINITY, gmax = -INFINITY, dtmin = INFINITY, dtmax = -INFINITY;
    for (const auto& s : steps) {
        if (!s.ok()) {
            prov["failed_steps"].push_back({{"step", s.index}, {"day", s.measurement.day}, {"error", *s.error}});
            err << "step " << s.index << " (day " << fmt(s.measurement.day) << ") failed: " << *s.error << '\n';
            continue;
        }
        gmin = std::min(gmin, s.truth.gor);
        gmax = std::max(gmax, s.truth.gor);
        const double dt = s.measurement.t_out_meas - s.measurement.t_in;
        dtmin = std::min(dtmin, dt);
        dtmax = std::max(dtmax, dt);
    }
    write_outputs(c.out_dir, {{"measurements.csv", mcsv.str()},
                              {"truth.csv", tcsv.str()},
                              {"forward_run.json", prov.dump(2) + "\n"}});

    out << "steps: " << steps.size() << ", failures: " << steps.size() - truth.size() << '\n';
    if (!truth.empty()) {
        out << "GOR range: " << fmt(gmin) << " .. " << fmt(gmax) << " Sm3/Sm3\n";
        out << "choke dT range: " << fmt(dtmin) << " .. " << fmt(dtmax) << " C\n";
    }
    return exit_ok;
}

int cmd_estimate(const Common& c, const std::string& measurements_path, const std::string& truth_path,
                 const SeedSource& seed_src, double tol_c, std::ostream& out) {
    if (!(tol_c > 0.0)) throw InputError("--tol-c must be positive");
    const auto model = make_model(c);
    const auto& fluid = model.eos.fluid();
    const auto measurements = io::parse_measurements(io::read_csv(measurements_path));
    std::optional<std::vector<TruthRow>> truth;
    if (!truth_path.empty()) truth = io::parse_truth(io::read_csv(truth_path), fluid);
    const auto seeds = resolve_seeds(seed_src, fluid, truth ? &*truth : nullptr);

    auto series = estimate_timeseries(model, seeds, measurements, tol_c);
    std::vector<ScoredEstimate> rows;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double day = measurements[k].day;
        rows.push_back(score(tol_c, k, day, std::move(series[k]), truth ? find_truth(*truth, day) : nullptr));
    }
    std::ostringstream csv;
    io::write_estimates(csv, fluid, rows, truth.has_value());

    auto prov = provenance("estimate", c);
    prov["measurements"] = measurements_path;
    prov["truth"] = truth_path;
    prov["seeds"] = seeds.provenance;
    prov["tol_c"] = tol_c;
    write_outputs(c.out_dir, {{"estimates.csv", csv.str()}, {"estimate_run.json", prov.dump(2) + "\n"}});

    out << "seeds: " << seeds.provenance << ", tolerance " << fmt(tol_c) << " C\n";
    summarize_estimates(out, rows);
    return exit_ok;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0' || !std::isfinite(v)) {
            throw InputError(flag + ": '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) throw InputError(flag + " needs at least one value");
    return out;
}

int cmd_sweep(const Common& c, const std::string& mode, const std::string& measurements_path,
              const std::string& truth_path, const SeedSource& seed_src, const std::string& tolerances,
              const std::string& seed_days, double tol_c, std::ostream& out, std::ostream& err) {
    const auto model = make_model(c);
    const auto& fluid = model.eos.fluid();
    const auto measurements = io::parse_measurements(io::read_csv(measurements_path));
    std::optional<std::vector<TruthRow>> truth;
    if (!truth_path.empty()) truth = io::parse_truth(io::read_csv(truth_path), fluid);

    auto prov = provenance("sweep", c);
    prov["mode"] = mode;
    prov["measurements"] = measurements_path;
    prov["truth"] = truth_path;

    std::vector<ScoredEstimate> rows;
    std::string file, key;
    if (mode == "tolerance") {
        const auto tols = parse_list(tolerances, "--tolerances-c");
        const auto seeds = resolve_seeds(seed_src, fluid, truth ? &*truth : nullptr);
        rows = sweep_tolerance(model, seeds, measurements, tols, truth ? &*truth : nullptr);
        prov["seeds"] = seeds.provenance;
        prov["tolerances_c"] = tols;
        file = "sweep_tolerance.csv";
        key = "tolerance_c";
    } else {
        if (!truth) throw InputError("seed-times mode needs --truth FILE");
        if (!(tol_c > 0.0)) throw InputError("--tol-c must be positive");
        if (seed_days.empty()) throw InputError("seed-times mode needs --seed-days D,D,...");
        auto sweep = sweep_seed_times(model, *truth, measurements, parse_list(seed_days, "--seed-days"), tol_c);
        for (double d : sweep.duplicate_days) err << "warning: duplicate seed day " << fmt(d) << " ignored\n";
        rows = std::move(sweep.rows);
        prov["seed_days"] = parse_list(seed_days, "--seed-days");
        prov["tol_c"] = tol_c;
        file = "sweep_seed_times.csv";
        key = "seed_day";
    }
    std::ostringstream csv;
    io::write_estimates(csv, fluid, rows, truth.has_value(), key);
    write_outputs(c.out_dir, {{file, csv.str()}, {"sweep_run.json", prov.dump(2) + "\n"}});
    out << "sweep (" << mode << ")\n";
    summarize_estimates(out, rows);
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wellstream composition and GOR from choke temperature measurements", "chokeflow"};
    app.require_subcommand(1);

    Common c;
    SeedSource seeds;
    std::string profile_path, measurements_path, truth_path, mode;
    std::string tolerances = "0.1,0.01,0.001,0.0001";
    std::string seed_days;
    double tol_c = 0.01;
    std::size_t steps = 100;

    auto* profile = app.add_subcommand("profile", "Write the bundled synthetic wellstream profile");
    add_common(profile, c);
    profile->add_option("--steps", steps, "Number of time steps")->capture_default_str();

    auto* forward = app.add_subcommand("forward", "Choke outlet temperatures and surface truth for a profile");
    add_common(forward, c);
    forward->add_option("--profile", profile_path, "Profile CSV")->required()->check(CLI::ExistingFile);

    auto* estimate = app.add_subcommand("estimate", "Estimate f_g, composition and GOR per measurement");
    add_common(estimate, c);
    estimate->add_option("--measurements", measurements_path, "Measurement CSV")
        ->required()
        ->check(CLI::ExistingFile);
    estimate->add_option("--truth", truth_path, "Truth CSV (adds delta and MPE columns)")
        ->check(CLI::ExistingFile);
    estimate->add_option("--tol-c", tol_c, "Outlet temperature tolerance in C")->capture_default_str();
    add_seed_options(estimate, seeds);

    auto* sweep = app.add_subcommand("sweep", "Tolerance or seed-time study");
    add_common(sweep, c);
    sweep->add_option("--mode", mode, "tolerance or seed-times")
        ->required()
        ->check(CLI::IsMember({"tolerance", "seed-times"}));
    sweep->add_option("--measurements", measurements_path, "Measurement CSV")->required()->check(CLI::ExistingFile);
    sweep->add_option("--truth", truth_path, "Truth CSV")->check(CLI::ExistingFile);
    sweep->add_option("--tolerances-c", tolerances, "Comma-separated tolerances in C")->capture_default_str();
    sweep->add_option("--seed-days", seed_days, "Comma-separated seed days");
    sweep->add_option("--tol-c", tol_c, "Tolerance in C for seed-times mode")->capture_default_str();
    add_seed_options(sweep, seeds);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (profile->parsed()) return cmd_profile(c, steps, out);
        if (forward->parsed()) return cmd_forward(c, profile_path, out, err);
        if (estimate->parsed()) return cmd_estimate(c, measurements_path, truth_path, seeds, tol_c, out);
        return cmd_sweep(c, mode, measurements_path, truth_path, seeds, tolerances, seed_days, tol_c, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_error;
    }
}

}  // namespace chokeflow::cli
