#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fvrb {

/// Boundary reaction: scalar rate functional of the species values at a
/// boundary point, its analytic partial derivatives, and the stoichiometric
/// vector nu coupling the species. The outward flux of species s on the
/// catalytic boundary is -nu[s] * rate(Y): consumed species (nu < 0) leave
/// the domain, produced species enter it.
struct ReactionModel {
    int n_species = 0;
    std::vector<double> nu;
    double k = 0.0;
    std::string name = "custom";
    std::function<double(std::span<const double>)> rate;
    std::function<void(std::span<const double>, std::span<double>)> rate_grad;
};

/// Mass-action CO oxidation, 2 CO + O2 -> 2 CO2:
/// rate = k * Y_CO^2 * Y_O2, nu = (-2, -1, 1).
ReactionModel mass_action_co_oxidation(double k);

/// Same model with the rate multiplied by `factor` (used for continuation).
ReactionModel scale_rate(const ReactionModel& m, double factor);

/// Outward normal flux density per species, rate(Y) * (-nu).
std::vector<double> boundary_flux(const ReactionModel& m, std::span<const double> y);

}  // namespace fvrb
