#pragma once

#include "fvrb/grid.hpp"
#include "fvrb/kinetics.hpp"
#include "fvrb/operator.hpp"
#include "fvrb/solver_options.hpp"

#include <Eigen/Dense>

namespace fvrb {

struct GlobalOptions : NewtonOptions {
    /// Re-runs the full face assembly in every Newton step, mimicking the
    /// cost profile of solvers that assemble inside the Newton loop. Results
    /// are unchanged; only timing is affected.
    bool force_full_reassembly = false;
};

struct GlobalSolution {
    Eigen::MatrixXd fields;  // n x n_species nodal values
    int newton_iters = 0;
    double residual_norm = 0.0;
    double solve_time = 0.0;
    Eigen::VectorXd species_min;  // post-solve extrema per species
    Eigen::VectorXd species_max;
};

/// Fully coupled solver for the multi-species problem with the non-linear
/// catalytic boundary: the oracle for the reduced method and the baseline
/// for runtime comparison. Each Newton step factorizes the full sparse
/// Jacobian, whose transport blocks are constant and whose reaction block is
/// re-linearized; both paths share the operator, quadrature, and Dirichlet
/// treatment, so discrepancies measure method equivalence only.
GlobalSolution global_solve(const TransportOperator& op, const ChannelGrid& grid,
                            const CatalyticIndex& cat, const ReactionModel& model,
                            const GlobalOptions& opts = {});

}  // namespace fvrb
