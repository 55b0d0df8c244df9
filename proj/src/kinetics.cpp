#include "fvrb/kinetics.hpp"

#include <stdexcept>

namespace fvrb {

ReactionModel mass_action_co_oxidation(double k) {
    if (k < 0.0) throw std::invalid_argument("mass_action_co_oxidation: k must be non-negative");
    ReactionModel m;
    m.n_species = 3;
    m.nu = {-2.0, -1.0, 1.0};
    m.k = k;
    m.name = "mass_action_co_ox";
    m.rate = [k](std::span<const double> y) { return k * y[0] * y[0] * y[1]; };
    m.rate_grad = [k](std::span<const double> y, std::span<double> g) {
        g[0] = 2.0 * k * y[0] * y[1];
        g[1] = k * y[0] * y[0];
        g[2] = 0.0;
    };
    return m;
}

ReactionModel scale_rate(const ReactionModel& m, double factor) {
    ReactionModel out = m;
    out.rate = [rate = m.rate, factor](std::span<const double> y) { return factor * rate(y); };
    out.rate_grad = [grad = m.rate_grad, factor](std::span<const double> y, std::span<double> g) {
        grad(y, g);
        for (auto& gi : g) gi *= factor;
    };
    return out;
}

std::vector<double> boundary_flux(const ReactionModel& m, std::span<const double> y) {
    const double r = m.rate(y);
    std::vector<double> flux(m.n_species);
    for (int s = 0; s < m.n_species; ++s) flux[s] = -m.nu[s] * r;
    return flux;
}

}  // namespace fvrb
