#pragma once

#include "fvrb/grid.hpp"
#include "fvrb/kinetics.hpp"
#include "fvrb/reduced.hpp"
#include "fvrb/reference.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace fvrb {

/// Benchmark scenario. The defaults are the channel experiment: a 5 x 1
/// channel, catalytic strip (2,3) on the bottom wall, inlet mass fractions
/// (0.2, 0.8, 0), D = 1e-2, k = 1e10, v_in = 1, ftol = 1e-11.
struct ScenarioConfig {
    enum class Mode { global, reduced, both };

    int level = 3;
    double diffusion = 1e-2;
    double k = 1e10;
    double v_in = 1.0;
    double lx = 5.0;
    double ly = 1.0;
    Span span{2.0, 3.0};
    std::array<double, 3> y_in{0.2, 0.8, 0.0};
    Mode mode = Mode::both;
    int compress_groups = 0;  // 0 = off, g >= 1 = g contiguous groups
    double ftol = 1e-11;
    std::string out;
    int repeats = 5;  // timing repeats, medians reported
    bool keep_fields = false;
    bool force_full_reassembly = false;
    bool allow_big = false;  // lift the level <= 6 guard
    std::string kind = "mass_action_co_ox";
};

ScenarioConfig::Mode parse_mode(const std::string& s);

/// Flat key=value config file (# comments); unknown keys are rejected.
ScenarioConfig load_config(const std::string& path);

ReactionModel make_model(const ScenarioConfig& cfg);

struct SolveReport {
    int level = 0;
    long long n_global = 0;  // species DOFs times species count
    int n_reduced = 0;       // catalytic nodes
    double t_offline = 0.0;
    double t_online = 0.0;
    double t_global = 0.0;
    int iters_reduced = 0;
    int iters_global = 0;
    double max_diff = 0.0;  // reduced-reconstructed vs global, max over nodes and species
    double residual_reduced = 0.0;
    double residual_global = 0.0;
    // Catalytic boundary profile (x ascending) from the reduced trace when
    // available, otherwise from the global fields.
    std::vector<double> profile_x;
    Eigen::MatrixXd profile_y;      // n_species x n_cat
    Eigen::MatrixXd global_fields;  // empty unless mode included global
    Eigen::MatrixXd reduced_fields; // reconstructed; empty unless mode included reduced
};

/// Builds the scenario, runs the requested solvers with median timing over
/// cfg.repeats, and collects counts, discrepancies, and profiles.
SolveReport run_scenario(const ScenarioConfig& cfg);

/// One CSV row per level. With count_only no solver runs and the timing and
/// iteration columns are zero. Partial rows are flushed before an error from
/// a failing point is rethrown.
void sweep_levels(const ScenarioConfig& cfg, const std::vector<int>& levels, std::ostream& os,
                  bool count_only = false);

/// One CSV row per rate constant on the fixed mesh cfg.level.
void sweep_k(const ScenarioConfig& cfg, const std::vector<double>& k_list, std::ostream& os);

/// CSV rows (x, Y_CO, Y_O2, Y_CO2) along the catalytic boundary.
void export_boundary_profile(const SolveReport& report, std::ostream& os);

void write_sweep_header(std::ostream& os, bool with_k = false);
void write_report_row(const SolveReport& report, std::ostream& os);

}  // namespace fvrb
