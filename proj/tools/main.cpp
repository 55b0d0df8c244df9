// Benchmark harness for the channel reaction scenarios: runs the reduced
// and/or fully coupled solver, sweeps refinement levels or rate constants,
// and exports CSV tables and boundary profiles.

#include "fvrb/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct CommonFlags {
    std::string config;
    int level = -1;
    double diffusion = -1.0;
    double k = -1.0;
    double vin = -1.0;
    std::string mode;
    int compress = -1;
    double ftol = -1.0;
    std::string out;
    int repeats = -1;
    bool allow_big = false;
    bool keep_fields = false;
    bool force_full_reassembly = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "key=value config file; explicit flags win");
    cmd->add_option("--level", f.level, "refinement level (10*2^level nodes per direction)");
    cmd->add_option("--D", f.diffusion, "diffusion coefficient");
    cmd->add_option("--k", f.k, "reaction rate constant");
    cmd->add_option("--vin", f.vin, "inlet speed of the channel profile");
    cmd->add_option("--mode", f.mode, "global|reduced|both");
    cmd->add_option("--compress", f.compress, "combine the basis into this many groups (0 = off)");
    cmd->add_option("--ftol", f.ftol, "Newton residual tolerance");
    cmd->add_option("--out", f.out, "output CSV path");
    cmd->add_option("--repeats", f.repeats, "timing repeats (median reported)");
    cmd->add_flag("--allow-big", f.allow_big, "lift the level <= 6 guard");
    cmd->add_flag("--keep-fields", f.keep_fields, "retain full basis fields in memory");
    cmd->add_flag("--force-full-reassembly", f.force_full_reassembly,
                  "re-run operator assembly inside every Newton step of the coupled solver");
}

fvrb::ScenarioConfig resolve(const CommonFlags& f) {
    fvrb::ScenarioConfig cfg;
    if (!f.config.empty()) cfg = fvrb::load_config(f.config);
    if (f.level >= 0) cfg.level = f.level;
    if (f.diffusion >= 0.0) cfg.diffusion = f.diffusion;
    if (f.k >= 0.0) cfg.k = f.k;
    if (f.vin >= 0.0) cfg.v_in = f.vin;
    if (!f.mode.empty()) cfg.mode = fvrb::parse_mode(f.mode);
    if (f.compress >= 0) cfg.compress_groups = f.compress;
    if (f.ftol >= 0.0) cfg.ftol = f.ftol;
    if (!f.out.empty()) cfg.out = f.out;
    if (f.repeats >= 1) cfg.repeats = f.repeats;
    if (f.allow_big) cfg.allow_big = true;
    if (f.keep_fields) cfg.keep_fields = true;
    if (f.force_full_reassembly) cfg.force_full_reassembly = true;
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    return os;
}

std::vector<int> parse_levels(const std::string& arg) {
    std::vector<int> levels;
    std::istringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto dash = tok.find('-', 1);
        if (dash != std::string::npos) {
            const int lo = std::stoi(tok.substr(0, dash));
            const int hi = std::stoi(tok.substr(dash + 1));
            for (int l = lo; l <= hi; ++l) levels.push_back(l);
        } else {
            levels.push_back(std::stoi(tok));
        }
    }
    return levels;
}

std::vector<double> parse_ks(const std::string& arg) {
    std::vector<double> ks;
    std::istringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) ks.push_back(std::stod(tok));
    return ks;
}

void print_report(const fvrb::SolveReport& r) {
    std::cout << "level " << r.level << ": N_global=" << r.n_global
              << " N_reduced=" << r.n_reduced << "\n";
    if (r.reduced_fields.size()) {
        std::cout << "  reduced: offline " << r.t_offline << " s, online " << r.t_online
                  << " s, " << r.iters_reduced << " Newton iterations, residual "
                  << r.residual_reduced << "\n";
    }
    if (r.global_fields.size()) {
        std::cout << "  global:  " << r.t_global << " s, " << r.iters_global
                  << " Newton iterations, residual " << r.residual_global << "\n";
    }
    if (r.reduced_fields.size() && r.global_fields.size())
        std::cout << "  max |reduced - global| over all nodes and species: " << r.max_diff << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume drift-diffusion solver with a reduced boundary basis"};
    app.require_subcommand(1);

    CommonFlags run_f, lv_f, k_f, prof_f;
    std::string levels_arg = "0-3";
    std::string ks_arg = "1e2,1e4,1e6,1e8,1e10";
    bool count_only = false;
    std::string grid_summary;

    auto* run = app.add_subcommand("run", "run one scenario and print a report");
    add_common_flags(run, run_f);
    run->add_option("--grid-summary", grid_summary, "write a grid summary CSV to this path");

    auto* swl = app.add_subcommand("sweep-levels", "one CSV row per refinement level");
    add_common_flags(swl, lv_f);
    swl->add_option("--levels", levels_arg, "levels, e.g. 0-6 or 0,2,4");
    swl->add_flag("--count-only", count_only, "report DOF counts without solving");

    auto* swk = app.add_subcommand("sweep-k", "one CSV row per rate constant on a fixed mesh");
    add_common_flags(swk, k_f);
    swk->add_option("--ks", ks_arg, "comma-separated rate constants");

    auto* prof = app.add_subcommand("profile", "boundary profile CSV along the catalytic strip");
    add_common_flags(prof, prof_f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cfg = resolve(run_f);
            const auto report = fvrb::run_scenario(cfg);
            print_report(report);
            if (!grid_summary.empty()) {
                auto os = open_out(grid_summary);
                const auto grid = fvrb::tag_boundary(fvrb::build_grid(cfg.level, cfg.lx, cfg.ly), cfg.span);
                fvrb::write_grid_summary(grid, os);
            }
            if (!cfg.out.empty()) {
                auto os = open_out(cfg.out);
                fvrb::write_sweep_header(os);
                fvrb::write_report_row(report, os);
            }
        } else if (swl->parsed()) {
            const auto cfg = resolve(lv_f);
            if (cfg.out.empty()) {
                fvrb::sweep_levels(cfg, parse_levels(levels_arg), std::cout, count_only);
            } else {
                auto os = open_out(cfg.out);
                fvrb::sweep_levels(cfg, parse_levels(levels_arg), os, count_only);
            }
        } else if (swk->parsed()) {
            const auto cfg = resolve(k_f);
            if (cfg.out.empty()) {
                fvrb::sweep_k(cfg, parse_ks(ks_arg), std::cout);
            } else {
                auto os = open_out(cfg.out);
                fvrb::sweep_k(cfg, parse_ks(ks_arg), os);
            }
        } else if (prof->parsed()) {
            const auto cfg = resolve(prof_f);
            const auto report = fvrb::run_scenario(cfg);
            if (cfg.out.empty()) {
                fvrb::export_boundary_profile(report, std::cout);
            } else {
                auto os = open_out(cfg.out);
                fvrb::export_boundary_profile(report, os);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
