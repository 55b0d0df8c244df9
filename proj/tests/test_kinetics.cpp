#include "fvrb/kinetics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace fvrb;

TEST_SUITE_BEGIN("kinetics");

TEST_CASE("mass-action rate values") {
    const std::vector<double> y{0.2, 0.8, 0.0};
    CHECK(mass_action_co_oxidation(0.0).rate(y) == 0.0);
    CHECK(mass_action_co_oxidation(1.0).rate(y) == doctest::Approx(0.032).epsilon(1e-15));
    CHECK(mass_action_co_oxidation(1e10).rate(y) == doctest::Approx(3.2e8).epsilon(1e-15));
    CHECK_THROWS_AS(mass_action_co_oxidation(-1.0), std::invalid_argument);
}

TEST_CASE("stoichiometry and outward fluxes") {
    const auto m = mass_action_co_oxidation(1.0);
    REQUIRE(m.n_species == 3);
    CHECK(m.nu == std::vector<double>{-2.0, -1.0, 1.0});

    const std::vector<double> y{0.2, 0.8, 0.0};
    const auto flux = boundary_flux(m, y);
    CHECK(flux[0] == doctest::Approx(0.064).epsilon(1e-15));   // CO leaves
    CHECK(flux[1] == doctest::Approx(0.032).epsilon(1e-15));   // O2 leaves
    CHECK(flux[2] == doctest::Approx(-0.032).epsilon(1e-15));  // CO2 enters

    const auto doubled = boundary_flux(mass_action_co_oxidation(2.0), y);
    for (int s = 0; s < 3; ++s) CHECK(doubled[s] == doctest::Approx(2.0 * flux[s]));

    const auto none = boundary_flux(mass_action_co_oxidation(0.0), y);
    for (double f : none) CHECK(f == 0.0);
}

TEST_CASE("gradient matches central differences at random states") {
    const auto m = mass_action_co_oxidation(3.7);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.05, 1.0);
    std::vector<double> y(3), g(3), yp(3), ym(3);
    for (int trial = 0; trial < 200; ++trial) {
        for (auto& v : y) v = dist(rng);
        m.rate_grad(y, g);
        for (int s = 0; s < 3; ++s) {
            const double h = 1e-6 * std::max(1.0, std::abs(y[s]));
            yp = y;
            ym = y;
            yp[s] += h;
            ym[s] -= h;
            const double fd = (m.rate(yp) - m.rate(ym)) / (2.0 * h);
            CHECK(std::abs(fd - g[s]) <= 1e-6 * std::max(1.0, std::abs(g[s])));
        }
    }
}

TEST_CASE("rate sign and monotonicity on the non-negative orthant") {
    const auto m = mass_action_co_oxidation(5.0);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> y(3);
    for (int trial = 0; trial < 200; ++trial) {
        for (auto& v : y) v = dist(rng);
        const double r = m.rate(y);
        CHECK(r >= 0.0);
        const auto flux = boundary_flux(m, y);
        CHECK(flux[0] >= 0.0);  // consumed species leave
        CHECK(flux[1] >= 0.0);
        CHECK(flux[2] <= 0.0);  // produced species enter

        auto bumped = y;
        bumped[0] += dist(rng);
        CHECK(m.rate(bumped) >= r);
        bumped = y;
        bumped[1] += dist(rng);
        CHECK(m.rate(bumped) >= r);
    }
}

TEST_CASE("rate scaling wrapper") {
    const auto m = mass_action_co_oxidation(2.0);
    const auto half = scale_rate(m, 0.5);
    const std::vector<double> y{0.3, 0.4, 0.1};
    CHECK(half.rate(y) == doctest::Approx(0.5 * m.rate(y)).epsilon(1e-15));
    std::vector<double> g(3), gh(3);
    m.rate_grad(y, g);
    half.rate_grad(y, gh);
    for (int s = 0; s < 3; ++s) CHECK(gh[s] == doctest::Approx(0.5 * g[s]).epsilon(1e-15));
}

TEST_SUITE_END();
