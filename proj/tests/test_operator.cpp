#include "fvrb/operator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fvrb;

TEST_SUITE_BEGIN("operator");

TEST_CASE("bernoulli function values") {
    CHECK(bernoulli(0.0) == 1.0);
    CHECK(bernoulli(1.0) == doctest::Approx(0.5819767068693264).epsilon(1e-15));
    // Smooth across the series threshold.
    CHECK(bernoulli(1e-2 - 1e-12) == doctest::Approx(bernoulli(1e-2 + 1e-12)).epsilon(1e-12));
}

TEST_CASE("bernoulli identity B(-x) - B(x) = x") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = dist(rng);
        CHECK(std::abs(bernoulli(-x) - bernoulli(x) - x) <= 1e-14 * std::max(1.0, std::abs(x)));
    }
    for (double x : {1e-9, 1e-5, 1e-3, 0.5, 10.0, 49.9})
        CHECK(std::abs(bernoulli(-x) - bernoulli(x) - x) <= 1e-14 * std::max(1.0, x));
}

TEST_CASE("bernoulli overflow safety") {
    CHECK(bernoulli(800.0) == 0.0);
    CHECK(bernoulli(-800.0) == doctest::Approx(800.0).epsilon(1e-15));
    CHECK(std::isfinite(bernoulli(1e6)));
    CHECK(bernoulli(50.0) > 0.0);
}

TEST_CASE("upwind limit of the two-point flux at high Peclet number") {
    // flux = (s*D/h) * (B(-Pe) Y_K - B(Pe) Y_L) -> s*v*(upwind value)
    const double s = 0.3, h = 0.1, yk = 1.7, yl = -0.4;
    for (double pe : {50.0, -50.0}) {
        const double d = 1e-3;
        const double v = pe * d / h;
        const double flux = (s * d / h) * (bernoulli(-pe) * yk - bernoulli(pe) * yl);
        const double upwind = s * v * (pe > 0 ? yk : yl);
        CHECK(std::abs(flux - upwind) <= 1e-12 * std::abs(upwind));
    }
}

TEST_CASE("channel profile vanishes at the walls") {
    const auto v = hagen_poiseuille(1.0, 1.0);
    CHECK(v.eval(0.3, 0.0)[0] == 0.0);
    CHECK(v.eval(0.3, 1.0)[0] == doctest::Approx(0.0));
    CHECK(v.eval(2.0, 0.5)[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(v.eval(2.0, 0.5)[1] == 0.0);
    CHECK_THROWS_AS(hagen_poiseuille(-1.0, 1.0), std::invalid_argument);
}

namespace {

ChannelGrid default_grid(int level = 0) {
    return tag_boundary(build_grid(level, 5.0, 1.0), {2.0, 3.0});
}

}  // namespace

TEST_CASE("constant inlet state solves the reaction-free problem") {
    const auto grid = default_grid(0);
    for (const auto& vel : {zero_velocity(), hagen_poiseuille(1.0, 1.0)}) {
        const auto op = assemble(grid, vel, 1e-2, nullptr, {0.7});
        const Eigen::VectorXd x = op.solve(op.b0().col(0));
        CHECK((x.array() - 0.7).abs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("zero velocity gives the central two-point flux") {
    const auto grid = default_grid(0);
    const double d = 0.3;
    const auto op = assemble(grid, zero_velocity(), d, nullptr, {1.0});
    // Horizontal interior face away from the Dirichlet column.
    const int k = grid.node(4, 4), l = grid.node(5, 4);
    const double expect = -grid.dy * d / grid.dx;
    CHECK(op.matrix().coeff(k, l) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(op.matrix().coeff(l, k) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("pure diffusion rows form an M-matrix on the non-Dirichlet block") {
    const auto grid = default_grid(0);
    const auto op = assemble(grid, zero_velocity(), 1.0, nullptr, {1.0});
    const auto& A = op.matrix();
    for (int col = 0; col < A.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
            if (it.row() == it.col()) continue;
            if (op.is_dirichlet(static_cast<int>(it.row()))) continue;
            CHECK(it.value() <= 0.0);
            if (!op.is_dirichlet(static_cast<int>(it.col()))) {
                // symmetric pattern and values on the interior block
                CHECK(A.coeff(it.col(), it.row()) == doctest::Approx(it.value()).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("non-Dirichlet row sums vanish for divergence-free transport") {
    const auto grid = default_grid(1);
    for (const auto& vel : {zero_velocity(), hagen_poiseuille(1.0, 1.0)}) {
        const auto op = assemble(grid, vel, 1e-2, nullptr, {1.0});
        CHECK(op.constants_in_kernel());
        const Eigen::VectorXd rowsum = op.matrix() * Eigen::VectorXd::Ones(op.n());
        double worst = 0.0;
        for (int node = 0; node < op.n(); ++node)
            if (!op.is_dirichlet(node)) worst = std::max(worst, std::abs(rowsum[node]));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("affine fields are reproduced exactly by pure diffusion") {
    // Unit outward flux density on the whole left edge, Dirichlet 0 on the
    // right edge: the solution is Y(x) = x - 5.
    const auto grid = tag_edges(build_grid(0, 5.0, 1.0), Region::inert, Region::inlet,
                                Region::inert, Region::inert);
    const auto op = assemble(grid, zero_velocity(), 1.0, nullptr, {0.0});
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.n());
    for (int j = 0; j < grid.ny; ++j) {
        const double w = (j == 0 || j == grid.ny - 1) ? 0.5 * grid.dy : grid.dy;
        rhs[grid.node(0, j)] = -w;  // outward flux density 1 over the node's segment
    }
    const Eigen::VectorXd x = op.solve(rhs);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double expect = grid.node_coords[grid.node(i, j)][0] - 5.0;
            CHECK(std::abs(x[grid.node(i, j)] - expect) <= 1e-12);
        }
    CHECK(std::abs(x[grid.node(0, 0)] + 5.0) <= 1e-12);
}

TEST_CASE("multiply-then-solve round trip") {
    const auto grid = default_grid(1);
    const auto op = assemble(grid, hagen_poiseuille(1.0, 1.0), 1e-2, nullptr, {1.0});
    std::mt19937 rng(7);
    std::normal_distribution<double> dist;
    Eigen::VectorXd w(op.n());
    for (int i = 0; i < op.n(); ++i) w[i] = dist(rng);
    const Eigen::VectorXd x = op.solve(op.matrix() * w);
    CHECK((x - w).lpNorm<Eigen::Infinity>() <= 1e-11 * w.lpNorm<Eigen::Infinity>());

    const Eigen::VectorXd zero = op.solve(Eigen::VectorXd::Zero(op.n()));
    CHECK(zero.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("solve rejects mismatched dimensions") {
    const auto op = assemble(default_grid(0), zero_velocity(), 1.0, nullptr, {1.0});
    CHECK_THROWS_AS(op.solve(Eigen::VectorXd::Zero(7)), std::invalid_argument);
}

TEST_CASE("pure Neumann assembly reports the singular factorization") {
    const auto grid = tag_edges(build_grid(0, 5.0, 1.0), Region::inert, Region::inert,
                                Region::inert, Region::inert);
    CHECK_THROWS_WITH_AS(assemble(grid, zero_velocity(), 1.0, nullptr, {1.0}),
                         doctest::Contains("singular"), std::runtime_error);
}

TEST_CASE("discrete maximum principle with varying inlet data") {
    const auto grid = default_grid(1);
    const auto op = assemble(grid, hagen_poiseuille(1.0, 1.0), 1e-2, nullptr, {1.0});
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op.n());
    double lo = 1e30, hi = -1e30;
    for (int node : op.dirichlet_nodes()) {
        const double y = grid.node_coords[node][1];
        const double g = 0.6 + 0.3 * std::sin(3.0 * y);
        rhs[node] = g;
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    const Eigen::VectorXd x = op.solve(rhs);
    CHECK(x.minCoeff() >= lo - 1e-12);
    CHECK(x.maxCoeff() <= hi + 1e-12);
}

TEST_CASE("inlet and outlet fluxes balance without reaction") {
    const auto grid = default_grid(1);
    const auto op = assemble(grid, hagen_poiseuille(1.0, 1.0), 1e-2, nullptr, {1.0});
    const Eigen::VectorXd x = op.solve(op.b0().col(0));
    const auto fluxes = op.boundary_fluxes(x);
    const double scale = std::max(std::abs(fluxes.inlet), std::abs(fluxes.outlet));
    CHECK(scale > 0.0);
    CHECK(std::abs(fluxes.inlet + fluxes.outlet) <= 1e-10 * scale);
    CHECK(fluxes.outlet > 0.0);  // mass leaves through the outlet
}

TEST_CASE("source terms accumulate box integrals into the right-hand side") {
    const auto grid = default_grid(0);
    const auto op = assemble(grid, zero_velocity(), 1.0,
                             [](double x, double) { return 2.0 + x; }, {0.5});
    CHECK(op.has_source());
    const int node = grid.node(4, 4);
    const double expect = (2.0 + grid.node_coords[node][0]) * grid.cell_measure[node];
    CHECK(op.b0()(node, 0) == doctest::Approx(expect).epsilon(1e-14));
    for (int d : op.dirichlet_nodes()) CHECK(op.b0()(d, 0) == 0.5);
}

TEST_SUITE_END();
