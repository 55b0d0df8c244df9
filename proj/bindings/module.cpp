#include "fvrb/bench.hpp"
#include "fvrb/grid.hpp"
#include "fvrb/kinetics.hpp"
#include "fvrb/operator.hpp"
#include "fvrb/reduced.hpp"
#include "fvrb/reference.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace fvrb;

namespace {

Eigen::MatrixX2d coords_matrix(const ChannelGrid& g) {
    Eigen::MatrixX2d m(g.n_nodes(), 2);
    for (int i = 0; i < g.n_nodes(); ++i) {
        m(i, 0) = g.node_coords[i][0];
        m(i, 1) = g.node_coords[i][1];
    }
    return m;
}

ReactionModel make_reaction_model(int n_species, std::vector<double> nu,
                                  std::function<double(std::vector<double>)> rate,
                                  std::function<std::vector<double>(std::vector<double>)> grad,
                                  std::string name) {
    ReactionModel m;
    m.n_species = n_species;
    m.nu = std::move(nu);
    m.name = std::move(name);
    m.rate = [rate = std::move(rate)](std::span<const double> y) {
        return rate(std::vector<double>(y.begin(), y.end()));
    };
    m.rate_grad = [grad = std::move(grad), n_species](std::span<const double> y,
                                                      std::span<double> g) {
        const auto out = grad(std::vector<double>(y.begin(), y.end()));
        if (static_cast<int>(out.size()) != n_species)
            throw std::invalid_argument("rate_grad must return one entry per species");
        for (int s = 0; s < n_species; ++s) g[s] = out[s];
    };
    return m;
}

NewtonOptions newton_options(double ftol, int max_iters, double damp_initial, double damp_growth,
                             bool continuation) {
    NewtonOptions o;
    o.ftol = ftol;
    o.max_iters = max_iters;
    o.damp_initial = damp_initial;
    o.damp_growth = damp_growth;
    o.continuation_fallback = continuation;
    return o;
}

}  // namespace

PYBIND11_MODULE(_fvrb, m) {
    m.doc() = "Finite-volume drift-diffusion solver with a reduced boundary basis";

    py::enum_<Region>(m, "Region")
        .value("inlet", Region::inlet)
        .value("outlet", Region::outlet)
        .value("inert", Region::inert)
        .value("catalytic", Region::catalytic);

    py::class_<Span>(m, "Span")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &Span::lo)
        .def_readwrite("hi", &Span::hi);

    py::class_<ChannelGrid>(m, "ChannelGrid")
        .def_readonly("level", &ChannelGrid::level)
        .def_readonly("nx", &ChannelGrid::nx)
        .def_readonly("ny", &ChannelGrid::ny)
        .def_readonly("lx", &ChannelGrid::lx)
        .def_readonly("ly", &ChannelGrid::ly)
        .def_readonly("dx", &ChannelGrid::dx)
        .def_readonly("dy", &ChannelGrid::dy)
        .def_readonly("tagged", &ChannelGrid::tagged)
        .def_property_readonly("n_nodes", &ChannelGrid::n_nodes)
        .def_property_readonly("coords", &coords_matrix)
        .def_property_readonly("cell_measure",
                               [](const ChannelGrid& g) { return g.cell_measure; })
        .def("summary", [](const ChannelGrid& g) {
            std::ostringstream os;
            write_grid_summary(g, os);
            return os.str();
        });

    py::class_<CatalyticIndex>(m, "CatalyticIndex")
        .def_readonly("nodes", &CatalyticIndex::nodes)
        .def_readonly("sigma", &CatalyticIndex::sigma)
        .def("__len__", &CatalyticIndex::size);

    m.def("build_grid", &build_grid, py::arg("level"), py::arg("lx"), py::arg("ly"));
    m.def("tag_boundary", &tag_boundary, py::arg("grid"), py::arg("span"));
    m.def(
        "tag_boundary",
        [](ChannelGrid g, double lo, double hi) { return tag_boundary(std::move(g), {lo, hi}); },
        py::arg("grid"), py::arg("lo"), py::arg("hi"));
    m.def("tag_edges", &tag_edges, py::arg("grid"), py::arg("left"), py::arg("right"),
          py::arg("bottom"), py::arg("top"));
    m.def("catalytic_index", &catalytic_index, py::arg("grid"));

    py::class_<VelocityField>(m, "VelocityField")
        .def_readonly("name", &VelocityField::name)
        .def_readonly("param", &VelocityField::param)
        .def("__call__",
             [](const VelocityField& v, double x, double y) { return v.eval(x, y); });
    m.def("hagen_poiseuille", &hagen_poiseuille, py::arg("v_in"), py::arg("ly"));
    m.def("zero_velocity", &zero_velocity);
    m.def("bernoulli", &bernoulli, py::arg("x"));

    py::class_<BoundaryFluxes>(m, "BoundaryFluxes")
        .def_readonly("inlet", &BoundaryFluxes::inlet)
        .def_readonly("outlet", &BoundaryFluxes::outlet);

    py::class_<TransportOperator>(m, "TransportOperator")
        .def("solve", &TransportOperator::solve, py::arg("rhs"))
        .def_property_readonly("matrix",
                               [](const TransportOperator& op) { return op.matrix(); })
        .def_property_readonly("b0", [](const TransportOperator& op) { return op.b0(); })
        .def_property_readonly("n", &TransportOperator::n)
        .def_property_readonly("n_species", &TransportOperator::n_species)
        .def_property_readonly("diffusion", &TransportOperator::diffusion)
        .def_property_readonly("n_factorizations", &TransportOperator::n_factorizations)
        .def_property_readonly("n_solves", &TransportOperator::n_solves)
        .def_property_readonly("dirichlet_nodes", &TransportOperator::dirichlet_nodes)
        .def("is_dirichlet", &TransportOperator::is_dirichlet, py::arg("node"))
        .def("boundary_fluxes", &TransportOperator::boundary_fluxes, py::arg("field"));

    m.def(
        "assemble",
        [](const ChannelGrid& grid, const VelocityField& v, double diffusion,
           std::vector<double> y_in, const py::object& source) {
            SourceFn f;
            if (!source.is_none()) {
                auto fn = source.cast<std::function<double(double, double)>>();
                f = [fn](double x, double y) { return fn(x, y); };
            }
            return assemble(grid, v, diffusion, std::move(f), std::move(y_in));
        },
        py::arg("grid"), py::arg("velocity"), py::arg("diffusion"), py::arg("y_in"),
        py::arg("source") = py::none());

    py::class_<ReactionModel>(m, "ReactionModel")
        .def_readonly("n_species", &ReactionModel::n_species)
        .def_readonly("nu", &ReactionModel::nu)
        .def_readonly("k", &ReactionModel::k)
        .def_readonly("name", &ReactionModel::name)
        .def("rate",
             [](const ReactionModel& m_, std::vector<double> y) { return m_.rate(y); })
        .def("rate_grad", [](const ReactionModel& m_, std::vector<double> y) {
            std::vector<double> g(m_.n_species);
            m_.rate_grad(y, g);
            return g;
        });
    m.def("mass_action_co_oxidation", &mass_action_co_oxidation, py::arg("k"));
    m.def("reaction_model", &make_reaction_model, py::arg("n_species"), py::arg("nu"),
          py::arg("rate"), py::arg("rate_grad"), py::arg("name") = "custom");
    m.def("scale_rate", &scale_rate, py::arg("model"), py::arg("factor"));
    m.def(
        "boundary_flux",
        [](const ReactionModel& m_, std::vector<double> y) { return boundary_flux(m_, y); },
        py::arg("model"), py::arg("y"));

    py::class_<ReducedBasis>(m, "ReducedBasis")
        .def_readonly("level", &ReducedBasis::level)
        .def_readonly("n_species", &ReducedBasis::n_species)
        .def_readonly("diffusion", &ReducedBasis::diffusion)
        .def_readonly("v_in", &ReducedBasis::v_in)
        .def_readonly("G", &ReducedBasis::G)
        .def_readonly("y0_trace", &ReducedBasis::y0_trace)
        .def_readonly("sigma", &ReducedBasis::sigma)
        .def_readonly("nodes", &ReducedBasis::nodes)
        .def_readonly("groups", &ReducedBasis::groups)
        .def_readonly("offline_time", &ReducedBasis::offline_time)
        .def_property_readonly("n_cat", &ReducedBasis::n_cat)
        .def_property_readonly("n_basis", &ReducedBasis::n_basis)
        .def_property_readonly("is_compressed", &ReducedBasis::compressed);

    m.def(
        "offline",
        [](const TransportOperator& op, const ChannelGrid& grid, const CatalyticIndex& cat,
           bool keep_fields) { return offline(op, grid, cat, {keep_fields}); },
        py::arg("op"), py::arg("grid"), py::arg("cat"), py::arg("keep_fields") = false);

    py::class_<ReducedSolution>(m, "ReducedSolution")
        .def_readonly("alpha", &ReducedSolution::alpha)
        .def_readonly("boundary_trace", &ReducedSolution::boundary_trace)
        .def_readonly("nu", &ReducedSolution::nu)
        .def_readonly("newton_iters", &ReducedSolution::newton_iters)
        .def_readonly("residual_norm", &ReducedSolution::residual_norm)
        .def_readonly("online_time", &ReducedSolution::online_time)
        .def_readonly("negative_trace", &ReducedSolution::negative_trace);

    m.def(
        "online",
        [](const ReducedBasis& basis, const ReactionModel& model, double ftol, int max_iters,
           double damp_initial, double damp_growth, bool continuation) {
            return online(basis, model,
                          newton_options(ftol, max_iters, damp_initial, damp_growth, continuation));
        },
        py::arg("basis"), py::arg("model"), py::arg("ftol") = 1e-11, py::arg("max_iters") = 200,
        py::arg("damp_initial") = 1.0, py::arg("damp_growth") = 1.2,
        py::arg("continuation_fallback") = true);

    m.def("online_residual", &online_residual, py::arg("basis"), py::arg("model"),
          py::arg("alpha"));
    m.def("online_jacobian", &online_jacobian, py::arg("basis"), py::arg("model"),
          py::arg("alpha"));
    m.def("compress", &compress, py::arg("basis"), py::arg("groups"));
    m.def("reconstruct", &reconstruct, py::arg("op"), py::arg("basis"), py::arg("solution"));
    m.def("save_basis", &save_basis, py::arg("basis"), py::arg("path"));
    m.def("load_basis", &load_basis, py::arg("path"));

    py::class_<GlobalSolution>(m, "GlobalSolution")
        .def_readonly("fields", &GlobalSolution::fields)
        .def_readonly("newton_iters", &GlobalSolution::newton_iters)
        .def_readonly("residual_norm", &GlobalSolution::residual_norm)
        .def_readonly("solve_time", &GlobalSolution::solve_time)
        .def_readonly("species_min", &GlobalSolution::species_min)
        .def_readonly("species_max", &GlobalSolution::species_max);

    m.def(
        "global_solve",
        [](const TransportOperator& op, const ChannelGrid& grid, const CatalyticIndex& cat,
           const ReactionModel& model, double ftol, int max_iters, double damp_initial,
           double damp_growth, bool force_full_reassembly) {
            GlobalOptions o;
            static_cast<NewtonOptions&>(o) =
                newton_options(ftol, max_iters, damp_initial, damp_growth, false);
            o.force_full_reassembly = force_full_reassembly;
            return global_solve(op, grid, cat, model, o);
        },
        py::arg("op"), py::arg("grid"), py::arg("cat"), py::arg("model"), py::arg("ftol") = 1e-11,
        py::arg("max_iters") = 200, py::arg("damp_initial") = 1.0, py::arg("damp_growth") = 1.2,
        py::arg("force_full_reassembly") = false);

    py::class_<ScenarioConfig> cfg(m, "ScenarioConfig");
    cfg.def(py::init<>())
        .def_readwrite("level", &ScenarioConfig::level)
        .def_readwrite("diffusion", &ScenarioConfig::diffusion)
        .def_readwrite("k", &ScenarioConfig::k)
        .def_readwrite("v_in", &ScenarioConfig::v_in)
        .def_readwrite("lx", &ScenarioConfig::lx)
        .def_readwrite("ly", &ScenarioConfig::ly)
        .def_readwrite("span", &ScenarioConfig::span)
        .def_readwrite("y_in", &ScenarioConfig::y_in)
        .def_readwrite("mode", &ScenarioConfig::mode)
        .def_readwrite("compress_groups", &ScenarioConfig::compress_groups)
        .def_readwrite("ftol", &ScenarioConfig::ftol)
        .def_readwrite("repeats", &ScenarioConfig::repeats)
        .def_readwrite("keep_fields", &ScenarioConfig::keep_fields)
        .def_readwrite("force_full_reassembly", &ScenarioConfig::force_full_reassembly)
        .def_readwrite("allow_big", &ScenarioConfig::allow_big)
        .def_readwrite("kind", &ScenarioConfig::kind);

    py::enum_<ScenarioConfig::Mode>(cfg, "Mode")
        .value("global_", ScenarioConfig::Mode::global)
        .value("reduced", ScenarioConfig::Mode::reduced)
        .value("both", ScenarioConfig::Mode::both);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("level", &SolveReport::level)
        .def_readonly("n_global", &SolveReport::n_global)
        .def_readonly("n_reduced", &SolveReport::n_reduced)
        .def_readonly("t_offline", &SolveReport::t_offline)
        .def_readonly("t_online", &SolveReport::t_online)
        .def_readonly("t_global", &SolveReport::t_global)
        .def_readonly("iters_reduced", &SolveReport::iters_reduced)
        .def_readonly("iters_global", &SolveReport::iters_global)
        .def_readonly("max_diff", &SolveReport::max_diff)
        .def_readonly("residual_reduced", &SolveReport::residual_reduced)
        .def_readonly("residual_global", &SolveReport::residual_global)
        .def_readonly("profile_x", &SolveReport::profile_x)
        .def_readonly("profile_y", &SolveReport::profile_y)
        .def_readonly("global_fields", &SolveReport::global_fields)
        .def_readonly("reduced_fields", &SolveReport::reduced_fields);

    m.def("load_config", &load_config, py::arg("path"));
    m.def("run_scenario", &run_scenario, py::arg("config"));
    m.def(
        "sweep_levels",
        [](const ScenarioConfig& c, const std::vector<int>& levels, const std::string& path,
           bool count_only) {
            std::ofstream os(path);
            if (!os) throw std::runtime_error("cannot open " + path);
            sweep_levels(c, levels, os, count_only);
        },
        py::arg("config"), py::arg("levels"), py::arg("path"), py::arg("count_only") = false);
    m.def(
        "sweep_k",
        [](const ScenarioConfig& c, const std::vector<double>& ks, const std::string& path) {
            std::ofstream os(path);
            if (!os) throw std::runtime_error("cannot open " + path);
            sweep_k(c, ks, os);
        },
        py::arg("config"), py::arg("ks"), py::arg("path"));
    m.def(
        "export_boundary_profile",
        [](const SolveReport& rep, const std::string& path) {
            std::ofstream os(path);
            if (!os) throw std::runtime_error("cannot open " + path);
            export_boundary_profile(rep, os);
        },
        py::arg("report"), py::arg("path"));
}
