#pragma once

#include "fvrb/grid.hpp"
#include "fvrb/kinetics.hpp"
#include "fvrb/operator.hpp"
#include "fvrb/solver_options.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fvrb {

struct OfflineOptions {
    bool keep_fields = false;  // retain the full basis coefficient vectors
};

/// Boundary traces of the reduced basis.
///
/// Column K of G holds the values of the basis function Y_K — the solution
/// of the transport problem with unit outward flux density on catalytic node
/// K's boundary portion and homogeneous conditions elsewhere — at all
/// catalytic collocation points. Y_K acts as a discrete Green's-like
/// function of the operator, is independent of any reaction model, and can
/// be reused for every boundary kinetics on the same operator and geometry.
struct ReducedBasis {
    int level = -1;
    int n_species = 0;
    double diffusion = 0.0;
    double v_in = 0.0;
    Eigen::MatrixXd G;         // n_cat x n_basis
    Eigen::MatrixXd y0_trace;  // n_species x n_cat, trace of the reaction-free solution
    std::vector<double> sigma;
    std::vector<int> nodes;    // global node ids in catalytic order
    std::vector<std::vector<int>> groups;  // basis column -> catalytic positions
    double offline_time = 0.0;
    std::vector<Eigen::VectorXd> basis_fields;  // only with keep_fields

    int n_cat() const { return static_cast<int>(nodes.size()); }
    int n_basis() const { return static_cast<int>(G.cols()); }
    bool compressed() const;
};

/// Offline phase: solves for the reaction-free part and one basis function
/// per catalytic node against the shared factorization, then stores boundary
/// traces only. When the inlet data is constant, there is no source, and
/// constants solve the homogeneous problem, the reaction-free solve is
/// skipped (its trace is the inlet value).
ReducedBasis offline(const TransportOperator& op, const ChannelGrid& grid,
                     const CatalyticIndex& cat, const OfflineOptions& opts = {});

struct ReducedSolution {
    Eigen::VectorXd alpha;           // reaction rate coefficient per basis column
    Eigen::MatrixXd boundary_trace;  // n_species x n_cat species values at collocation points
    std::vector<double> nu;          // stoichiometry captured from the model
    int newton_iters = 0;
    double residual_norm = 0.0;
    double online_time = 0.0;
    bool negative_trace = false;  // any negative species value at convergence
};

/// Online phase: solves the collocation system F(alpha) = 0 with
///
///   F_L(alpha) = alpha_L - R(Yhat(alpha, x_L)),
///   Yhat_s(alpha, x_L) = y0_trace[s][L] + (-nu_s) * sum_K alpha_K G[L][K],
///
/// by Newton's method with the analytic Jacobian and a backtracking line
/// search. One scalar alpha per node serves all species; the stoichiometric
/// scaling recovers the per-species fields. For a compressed basis each
/// group carries one unknown and the sigma-weighted group mean of the
/// per-node equations is enforced, which reduces to the exact per-node
/// system for singleton groups. On non-convergence a rate-scaling
/// continuation (1e-2, 1e-1, 1) retries warm-started before giving up.
ReducedSolution online(const ReducedBasis& basis, const ReactionModel& model,
                       const NewtonOptions& opts = {});

/// Residual F(alpha) and its analytic Jacobian at an arbitrary iterate,
/// exposed for derivative checks and diagnostics.
Eigen::VectorXd online_residual(const ReducedBasis& basis, const ReactionModel& model,
                                const Eigen::VectorXd& alpha);
Eigen::MatrixXd online_jacobian(const ReducedBasis& basis, const ReactionModel& model,
                                const Eigen::VectorXd& alpha);

/// Combines basis columns over a partition of the catalytic nodes; the
/// single-group partition collapses the online system to one equation.
ReducedBasis compress(const ReducedBasis& basis, const std::vector<std::vector<int>>& groups);

/// Full per-species fields (n x n_species) from a converged online solution:
/// one linear solve with the superposed basis right-hand side, shared across
/// species through the stoichiometric scaling.
Eigen::MatrixXd reconstruct(const TransportOperator& op, const ReducedBasis& basis,
                            const ReducedSolution& sol);

/// Flat text container: header (level, n_cat, n_species, D, v_in), then G
/// row-major, y0_trace, sigma, and the catalytic node ids. Only uncompressed
/// bases are serialized.
void save_basis(const ReducedBasis& basis, const std::string& path);
ReducedBasis load_basis(const std::string& path);

}  // namespace fvrb
