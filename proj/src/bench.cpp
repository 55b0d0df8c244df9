#include "fvrb/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fvrb {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename Fn>
double timed(Fn&& fn) {
    const auto t0 = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::vector<int>> contiguous_groups(int n_cat, int n_groups) {
    if (n_groups < 1 || n_groups > n_cat)
        throw std::invalid_argument("compress group count must be in [1, n_cat]");
    std::vector<std::vector<int>> groups(n_groups);
    for (int p = 0; p < n_cat; ++p)
        groups[static_cast<size_t>(p) * n_groups / n_cat].push_back(p);
    return groups;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: expected boolean, got '" + v + "'");
}

}  // namespace

ScenarioConfig::Mode parse_mode(const std::string& s) {
    if (s == "global") return ScenarioConfig::Mode::global;
    if (s == "reduced") return ScenarioConfig::Mode::reduced;
    if (s == "both") return ScenarioConfig::Mode::both;
    throw std::invalid_argument("mode must be one of global|reduced|both, got '" + s + "'");
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "level") cfg.level = std::stoi(val);
        else if (key == "D") cfg.diffusion = std::stod(val);
        else if (key == "k") cfg.k = std::stod(val);
        else if (key == "vin") cfg.v_in = std::stod(val);
        else if (key == "lx") cfg.lx = std::stod(val);
        else if (key == "ly") cfg.ly = std::stod(val);
        else if (key == "span_lo") cfg.span.lo = std::stod(val);
        else if (key == "span_hi") cfg.span.hi = std::stod(val);
        else if (key == "yin_co") cfg.y_in[0] = std::stod(val);
        else if (key == "yin_o2") cfg.y_in[1] = std::stod(val);
        else if (key == "yin_co2") cfg.y_in[2] = std::stod(val);
        else if (key == "mode") cfg.mode = parse_mode(val);
        else if (key == "compress") cfg.compress_groups = std::stoi(val);
        else if (key == "ftol") cfg.ftol = std::stod(val);
        else if (key == "out") cfg.out = val;
        else if (key == "repeats") cfg.repeats = std::stoi(val);
        else if (key == "keep_fields") cfg.keep_fields = parse_bool(val);
        else if (key == "force_full_reassembly") cfg.force_full_reassembly = parse_bool(val);
        else if (key == "allow_big") cfg.allow_big = parse_bool(val);
        else if (key == "kind") cfg.kind = val;
        else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return cfg;
}

ReactionModel make_model(const ScenarioConfig& cfg) {
    if (cfg.kind == "mass_action_co_ox") return mass_action_co_oxidation(cfg.k);
    throw std::invalid_argument("unknown kinetics kind '" + cfg.kind + "'");
}

SolveReport run_scenario(const ScenarioConfig& cfg) {
    if (cfg.level > 6 && !cfg.allow_big)
        throw std::invalid_argument("level " + std::to_string(cfg.level) +
                                    " exceeds the default guard (6); pass allow_big to override");
    if (cfg.repeats < 1) throw std::invalid_argument("repeats must be >= 1");

    const ChannelGrid grid = tag_boundary(build_grid(cfg.level, cfg.lx, cfg.ly), cfg.span);
    const CatalyticIndex cat = catalytic_index(grid);
    const VelocityField vel = hagen_poiseuille(cfg.v_in, cfg.ly);
    const ReactionModel model = make_model(cfg);
    const std::vector<double> y_in(cfg.y_in.begin(), cfg.y_in.end());

    SolveReport rep;
    rep.level = cfg.level;
    rep.n_global = static_cast<long long>(grid.n_nodes()) * 3;
    rep.n_reduced = cat.size();

    NewtonOptions newton;
    newton.ftol = cfg.ftol;
    GlobalOptions gopts;
    static_cast<NewtonOptions&>(gopts) = newton;
    gopts.force_full_reassembly = cfg.force_full_reassembly;

    const bool want_reduced = cfg.mode != ScenarioConfig::Mode::global;
    const bool want_global = cfg.mode != ScenarioConfig::Mode::reduced;

    std::optional<TransportOperator> op;
    std::optional<ReducedBasis> basis;
    std::optional<ReducedSolution> rsol;
    std::optional<GlobalSolution> gsol;

    // Offline phase = assembly + factorization + basis solves. The global
    // path needs the assembled operator too, so assembly always runs.
    std::vector<double> t_off;
    for (int rep_i = 0; rep_i < (want_reduced ? cfg.repeats : 1); ++rep_i) {
        t_off.push_back(timed([&] {
            op.emplace(assemble(grid, vel, cfg.diffusion, nullptr, y_in));
            if (want_reduced) basis.emplace(offline(*op, grid, cat, {cfg.keep_fields}));
        }));
    }
    rep.t_offline = want_reduced ? median(t_off) : 0.0;

    if (want_reduced && cfg.compress_groups > 0)
        basis.emplace(compress(*basis, contiguous_groups(cat.size(), cfg.compress_groups)));

    if (want_reduced) {
        std::vector<double> t_on;
        for (int rep_i = 0; rep_i < cfg.repeats; ++rep_i)
            t_on.push_back(timed([&] { rsol.emplace(online(*basis, model, newton)); }));
        rep.t_online = median(t_on);
        rep.iters_reduced = rsol->newton_iters;
        rep.residual_reduced = rsol->residual_norm;
        rep.reduced_fields = reconstruct(*op, *basis, *rsol);
    }

    if (want_global) {
        std::vector<double> t_glob;
        for (int rep_i = 0; rep_i < cfg.repeats; ++rep_i)
            t_glob.push_back(timed([&] { gsol.emplace(global_solve(*op, grid, cat, model, gopts)); }));
        rep.t_global = median(t_glob);
        rep.iters_global = gsol->newton_iters;
        rep.residual_global = gsol->residual_norm;
        rep.global_fields = gsol->fields;
    }

    if (want_reduced && want_global)
        rep.max_diff = (rep.reduced_fields - rep.global_fields).cwiseAbs().maxCoeff();

    rep.profile_x.reserve(cat.size());
    for (int node : cat.nodes) rep.profile_x.push_back(grid.node_coords[node][0]);
    if (want_reduced) {
        rep.profile_y = rsol->boundary_trace;
    } else {
        rep.profile_y.resize(3, cat.size());
        for (int l = 0; l < cat.size(); ++l)
            for (int s = 0; s < 3; ++s) rep.profile_y(s, l) = gsol->fields(cat.nodes[l], s);
    }
    return rep;
}

void write_sweep_header(std::ostream& os, bool with_k) {
    if (with_k) os << "k,";
    os << "level,N_global,N_reduced,t_offline_s,t_online_s,t_global_s,"
          "iters_reduced,iters_global,max_diff\n";
}

void write_report_row(const SolveReport& r, std::ostream& os) {
    os.precision(12);
    os << r.level << ',' << r.n_global << ',' << r.n_reduced << ',' << r.t_offline << ','
       << r.t_online << ',' << r.t_global << ',' << r.iters_reduced << ',' << r.iters_global << ',';
    os.precision(17);
    os << r.max_diff << '\n';
}

void sweep_levels(const ScenarioConfig& cfg, const std::vector<int>& levels, std::ostream& os,
                  bool count_only) {
    if (levels.empty()) throw std::invalid_argument("sweep_levels: empty level list");
    write_sweep_header(os);
    for (int level : levels) {
        if (count_only) {
            const ChannelGrid grid = tag_boundary(build_grid(level, cfg.lx, cfg.ly), cfg.span);
            SolveReport r;
            r.level = level;
            r.n_global = static_cast<long long>(grid.n_nodes()) * 3;
            r.n_reduced = catalytic_index(grid).size();
            write_report_row(r, os);
            os.flush();
            continue;
        }
        ScenarioConfig point = cfg;
        point.level = level;
        try {
            write_report_row(run_scenario(point), os);
            os.flush();
        } catch (...) {
            os.flush();
            throw;
        }
    }
}

void sweep_k(const ScenarioConfig& cfg, const std::vector<double>& k_list, std::ostream& os) {
    if (k_list.empty()) throw std::invalid_argument("sweep_k: empty k list");
    write_sweep_header(os, true);
    for (double k : k_list) {
        ScenarioConfig point = cfg;
        point.k = k;
        try {
            os.precision(17);
            os << k << ',';
            write_report_row(run_scenario(point), os);
            os.flush();
        } catch (...) {
            os << '\n';
            os.flush();
            throw;
        }
    }
}

void export_boundary_profile(const SolveReport& report, std::ostream& os) {
    if (report.profile_y.rows() != 3)
        throw std::invalid_argument("export_boundary_profile: expected three species");
    os << "x,Y_CO,Y_O2,Y_CO2\n";
    os.precision(17);
    for (size_t l = 0; l < report.profile_x.size(); ++l) {
        const auto li = static_cast<Eigen::Index>(l);
        os << report.profile_x[l] << ',' << report.profile_y(0, li) << ','
           << report.profile_y(1, li) << ',' << report.profile_y(2, li) << '\n';
    }
}

}  // namespace fvrb
