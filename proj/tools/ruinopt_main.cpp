// Command-line front end: solves the decumulation DP from a control file,
// derives hazard schedules, simulates strategies, and runs the return
// diagnostics.

#include "ruinopt/control_file.hpp"
#include "ruinopt/dp_solver.hpp"
#include "ruinopt/hazard.hpp"
#include "ruinopt/result_files.hpp"
#include "ruinopt/series_stats.hpp"
#include "ruinopt/simulate.hpp"
#include "ruinopt/text_format.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace ruinopt;

namespace {

// Historical real-return moments used throughout the published results;
// the default model when no control file is given to `simulate`.
ReturnModel historical_model() {
    ReturnModel m;
    m.stock_mean = 0.082509;
    m.stock_var = 0.0402696529;
    m.bond_mean = 0.021409;
    m.bond_var = 0.0069605649;
    m.stock_bond_cov = 0.0007344180;
    m.expense_ratio = 0.0;
    return m;
}

MpuSpec parse_members(const std::string& text) {
    MpuSpec mpu;
    std::istringstream in(text);
    std::string gender;
    while (in >> gender) {
        MpuMember m;
        const char g = static_cast<char>(std::toupper(static_cast<unsigned char>(gender[0])));
        if (gender.size() != 1 || (g != 'M' && g != 'F'))
            throw std::runtime_error("invalid gender '" + gender + "' in member list");
        m.gender = g == 'M' ? Gender::Male : Gender::Female;
        if (!(in >> m.age)) throw std::runtime_error("missing age after gender in member list");
        mpu.members.push_back(m);
    }
    if (mpu.members.empty()) throw std::runtime_error("empty member list");
    return mpu;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    fn(out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

int cmd_solve(const std::string& control_path, const std::string& age_table_path,
              const std::string& out_dir, int workers, bool reuse_hazards, bool no_prune) {
    ControlConfig cfg = parse_control_file(control_path);
    if (no_prune) cfg.disc.prune_power = std::numeric_limits<double>::infinity();

    fs::create_directories(out_dir);
    HazardSchedule sched;
    if (cfg.random_horizon) {
        const fs::path hr_path = fs::path(out_dir) / "hrates.txt";
        if (reuse_hazards && fs::exists(hr_path)) {
            std::ifstream in(hr_path);
            sched = read_hazards(in, hr_path.string());
            std::cout << "Reusing hazard rates from " << hr_path.string() << "\n";
        } else {
            if (age_table_path.empty())
                throw std::runtime_error("random horizon requires --age-table");
            const AgeTable table = load_age_table_file(age_table_path);
            sched = derive_hazards(table, cfg.mpu);
            write_file(hr_path, [&](std::ostream& o) { write_hazards(o, sched); });
            std::cout << "Hazard rates written to " << hr_path.string() << " (S_Max = "
                      << sched.s_max() << ")\n";
        }
    } else {
        sched = fixed_horizon_schedule(cfg.fixed_years);
    }

    SolveOptions opts;
    opts.workers = workers;
    opts.on_stage = [&](const StageLog& log) {
        std::cout << "stage t=" << log.t << ": runs=" << log.unique_runs
                  << " prune_bucket=" << log.prune_bucket << " threshold=" << log.prune_threshold
                  << " (" << log.seconds << " s)\n"
                  << std::flush;
    };
    const PolicyGrid grid = solve(cfg.model, sched, cfg.disc, opts);

    write_file(fs::path(out_dir) / "FinalResults_V.txt",
               [&](std::ostream& o) { write_results_v(o, grid); });
    write_file(fs::path(out_dir) / "FinalProbResults_H.csv",
               [&](std::ostream& o) { write_prob_csv(o, grid); });
    write_file(fs::path(out_dir) / "FinalAlphaResults_H.csv",
               [&](std::ostream& o) { write_alpha_csv(o, grid); });
    std::cout << "Solved " << grid.stages << " stages x " << grid.buckets()
              << " buckets; results in " << out_dir << "\n";
    return 0;
}

int cmd_hazard(const std::string& age_table_path, const std::string& members,
               const std::string& out_path) {
    const AgeTable table = load_age_table_file(age_table_path);
    const HazardSchedule sched = derive_hazards(table, parse_members(members));
    if (out_path.empty()) {
        write_hazards(std::cout, sched);
    } else {
        write_file(out_path, [&](std::ostream& o) { write_hazards(o, sched); });
        std::cout << "Hazard rates written to " << out_path << " (S_Max = " << sched.s_max()
                  << ")\n";
    }
    return 0;
}

int cmd_simulate(const std::string& control_path, double fixed_alpha,
                 const std::string& policy_csv, const std::string& glide_path_file, double wr,
                 int years, const std::string& age_table_path, const std::string& members,
                 long paths, std::uint64_t seed, int workers, double expense_ratio,
                 const std::string& histogram_path) {
    ReturnModel model = historical_model();
    if (!control_path.empty()) model = parse_control_file(control_path).model;
    if (expense_ratio >= 0.0) model.expense_ratio = expense_ratio;

    SimConfig cfg;
    cfg.n_paths = paths;
    cfg.master_seed = seed;
    cfg.w_r = wr;
    cfg.workers = workers;

    if (!members.empty()) {
        if (age_table_path.empty())
            throw std::runtime_error("--members requires --age-table");
        cfg.horizon = derive_hazards(load_age_table_file(age_table_path), parse_members(members));
    } else {
        cfg.horizon = fixed_horizon_schedule(years);
    }

    int strategies = 0;
    if (fixed_alpha >= 0.0) ++strategies;
    if (!policy_csv.empty()) ++strategies;
    if (!glide_path_file.empty()) ++strategies;
    if (strategies != 1)
        throw std::runtime_error(
            "choose exactly one of --fixed-alpha, --policy, --glidepath");

    if (fixed_alpha >= 0.0) {
        cfg.strategy = FixedAlpha{fixed_alpha};
    } else if (!policy_csv.empty()) {
        std::ifstream in(policy_csv);
        if (!in) throw std::runtime_error("cannot open " + policy_csv);
        cfg.strategy = PolicyStrategy{read_alpha_csv(in, policy_csv)};
    } else {
        std::ifstream in(glide_path_file);
        if (!in) throw std::runtime_error("cannot open " + glide_path_file);
        GlidePath gp;
        double a;
        while (in >> a) gp.alpha.push_back(a);
        cfg.strategy = std::move(gp);
    }

    const SimResult res = simulate(cfg, model);
    std::printf("paths:         %ld\n", res.paths);
    std::printf("ruined:        %ld\n", res.ruined);
    std::printf("ruin estimate: %.6f\n", res.ruin_estimate);
    std::printf("std error:     %.6f\n", res.std_error);

    if (!histogram_path.empty()) {
        write_file(histogram_path, [&](std::ostream& o) {
            o << "t,ruined\n";
            for (size_t t = 1; t < res.ruined_at.size(); ++t)
                o << t << ',' << res.ruined_at[t] << '\n';
        });
    }
    return 0;
}

int cmd_analyze(const std::string& input_path, int max_lag) {
    std::ifstream in(input_path);
    if (!in) throw std::runtime_error("cannot open " + input_path);
    std::vector<double> series;
    double y;
    while (in >> y) series.push_back(y);
    if (series.size() < 8) throw std::runtime_error("need at least 8 observations");

    const int n = static_cast<int>(series.size());
    if (max_lag <= 0) max_lag = std::max(1, n / 4);
    max_lag = std::min(max_lag, n - 1);

    const WhitenessReport rep = whiteness_report(series, max_lag);
    std::printf("n = %d, threshold 2/sqrt(n) = %.5f\n", n, rep.threshold);
    std::printf("%4s %12s %12s %6s\n", "lag", "acf", "pacf", "flag");
    for (int k = 1; k <= max_lag; ++k) {
        const size_t i = static_cast<size_t>(k - 1);
        const bool flagged = rep.acf_flagged[i] || rep.pacf_flagged[i];
        std::printf("%4d %12.5f %12.5f %6s\n", k, rep.acf_values[i], rep.pacf_values[i],
                    flagged ? "*" : "");
    }
    std::printf("%d of %d lags flagged\n", rep.flagged_count(), max_lag);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal decumulation: ruin-probability DP solver and validation tools"};
    app.require_subcommand(1);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Solve the DP described by a control file");
    std::string control_path, age_table_path, out_dir;
    int workers = 0;
    bool reuse_hazards = false, no_prune = false;
    solve_cmd->add_option("--control", control_path, "3-line control file")->required();
    solve_cmd->add_option("--age-table", age_table_path, "age probability table (random horizon)");
    solve_cmd->add_option("--out", out_dir, "output directory")->required();
    solve_cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
    solve_cmd->add_flag("--reuse-hazards", reuse_hazards,
                        "reuse an existing hrates.txt instead of re-deriving");
    solve_cmd->add_flag("--no-prune", no_prune, "disable heavy pruning (verification runs)");

    // hazard
    auto* hazard_cmd = app.add_subcommand("hazard", "Derive an MPU hazard schedule");
    std::string hz_table, hz_members, hz_out;
    hazard_cmd->add_option("--age-table", hz_table, "age probability table")->required();
    hazard_cmd->add_option("--members", hz_members, "e.g. \"M 65 F 67\"")->required();
    hazard_cmd->add_option("--out", hz_out, "output file (default: stdout)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo ruin-probability estimate");
    std::string sim_control, sim_policy, sim_glide, sim_table, sim_members, sim_hist;
    double sim_alpha = -1.0, sim_wr = 0.04, sim_er = -1.0;
    int sim_years = 30, sim_workers = 0;
    long sim_paths = 0;
    std::uint64_t sim_seed = 1;
    sim_cmd->add_option("--control", sim_control, "take the return model from a control file");
    sim_cmd->add_option("--fixed-alpha", sim_alpha, "constant stock fraction");
    sim_cmd->add_option("--policy", sim_policy, "FinalAlphaResults_H.csv to follow");
    sim_cmd->add_option("--glidepath", sim_glide, "file with one alpha per decision stage");
    sim_cmd->add_option("--wr", sim_wr, "initial withdrawal rate");
    sim_cmd->add_option("--years", sim_years, "fixed horizon in years");
    sim_cmd->add_option("--age-table", sim_table, "age probability table (random horizon)");
    sim_cmd->add_option("--members", sim_members, "MPU members, e.g. \"M 65 F 65\"");
    sim_cmd->add_option("--paths", sim_paths, "number of simulated paths")->required();
    sim_cmd->add_option("--seed", sim_seed, "master seed");
    sim_cmd->add_option("--workers", sim_workers, "worker threads (0 = all cores)");
    sim_cmd->add_option("--expense-ratio", sim_er, "override the expense ratio");
    sim_cmd->add_option("--histogram", sim_hist, "write a CSV histogram of ruin times");

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "ACF/PACF whiteness diagnostics");
    std::string an_input;
    int an_max_lag = 0;
    an_cmd->add_option("input", an_input, "one-column text file of returns")->required();
    an_cmd->add_option("--max-lag", an_max_lag, "maximum lag (default n/4)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed())
            return cmd_solve(control_path, age_table_path, out_dir, workers, reuse_hazards,
                             no_prune);
        if (hazard_cmd->parsed()) return cmd_hazard(hz_table, hz_members, hz_out);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_control, sim_alpha, sim_policy, sim_glide, sim_wr, sim_years,
                                sim_table, sim_members, sim_paths, sim_seed, sim_workers, sim_er,
                                sim_hist);
        if (an_cmd->parsed()) return cmd_analyze(an_input, an_max_lag);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
