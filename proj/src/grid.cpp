#include "fvrb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fvrb {

const char* region_name(Region r) {
    switch (r) {
        case Region::inlet: return "inlet";
        case Region::outlet: return "outlet";
        case Region::inert: return "inert";
        case Region::catalytic: return "catalytic";
    }
    return "?";
}

ChannelGrid build_grid(int level, double lx, double ly) {
    if (level < 0) throw std::invalid_argument("build_grid: level must be non-negative");
    if (level > 12) throw std::invalid_argument("build_grid: level > 12 would overflow node indexing");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("build_grid: domain lengths must be positive");

    ChannelGrid g;
    g.level = level;
    g.nx = g.ny = 10 << level;
    g.lx = lx;
    g.ly = ly;
    g.dx = lx / (g.nx - 1);
    g.dy = ly / (g.ny - 1);

    const int n = g.nx * g.ny;
    g.node_coords.resize(n);
    g.cell_measure.resize(n);

    auto wx = [&](int i) { return (i == 0 || i == g.nx - 1) ? 0.5 * g.dx : g.dx; };
    auto wy = [&](int j) { return (j == 0 || j == g.ny - 1) ? 0.5 * g.dy : g.dy; };

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int id = g.node(i, j);
            g.node_coords[id] = {i * g.dx, j * g.dy};
            g.cell_measure[id] = wx(i) * wy(j);
        }
    }

    // Boundary faces, untagged until tag_boundary/tag_edges runs.
    g.bfaces.reserve(2 * (g.nx - 1) + 2 * (g.ny - 1));
    for (int i = 0; i < g.nx - 1; ++i) {
        g.bfaces.push_back({g.node(i, 0), g.node(i + 1, 0), g.dx, {0.0, -1.0}, Region::inert});
        g.bfaces.push_back({g.node(i, g.ny - 1), g.node(i + 1, g.ny - 1), g.dx, {0.0, 1.0}, Region::inert});
    }
    for (int j = 0; j < g.ny - 1; ++j) {
        g.bfaces.push_back({g.node(0, j), g.node(0, j + 1), g.dy, {-1.0, 0.0}, Region::inert});
        g.bfaces.push_back({g.node(g.nx - 1, j), g.node(g.nx - 1, j + 1), g.dy, {1.0, 0.0}, Region::inert});
    }
    return g;
}

ChannelGrid tag_boundary(ChannelGrid grid, Span span) {
    if (!(span.lo < span.hi))
        throw std::invalid_argument("tag_boundary: catalytic span must have positive length");
    if (span.hi <= 0.0 || span.lo >= grid.lx)
        throw std::invalid_argument("tag_boundary: catalytic span lies outside the bottom wall");

    int n_cat = 0;
    for (auto& f : grid.bfaces) {
        if (f.normal[0] < -0.5) {
            f.region = Region::inlet;
        } else if (f.normal[0] > 0.5) {
            f.region = Region::outlet;
        } else if (f.normal[1] < -0.5) {
            // Bottom face [x0,x1]: catalytic iff the open overlap with the
            // span has positive length.
            const double x0 = grid.node_coords[f.n0][0];
            const double x1 = grid.node_coords[f.n1][0];
            const double overlap = std::min(x1, span.hi) - std::max(x0, span.lo);
            f.region = overlap > 0.0 ? Region::catalytic : Region::inert;
            if (f.region == Region::catalytic) ++n_cat;
        } else {
            f.region = Region::inert;
        }
    }
    if (n_cat == 0)
        throw std::invalid_argument("tag_boundary: catalytic span (" + std::to_string(span.lo) + "," +
                                    std::to_string(span.hi) + ") does not overlap any bottom face");
    grid.tagged = true;
    return grid;
}

ChannelGrid tag_edges(ChannelGrid grid, Region left, Region right, Region bottom, Region top) {
    for (auto& f : grid.bfaces) {
        if (f.normal[0] < -0.5)
            f.region = left;
        else if (f.normal[0] > 0.5)
            f.region = right;
        else if (f.normal[1] < -0.5)
            f.region = bottom;
        else
            f.region = top;
    }
    grid.tagged = true;
    return grid;
}

CatalyticIndex catalytic_index(const ChannelGrid& grid) {
    if (!grid.tagged) throw std::invalid_argument("catalytic_index: grid has no boundary tags");

    std::map<int, double> sigma;  // node -> half length sum
    for (const auto& f : grid.bfaces) {
        if (f.region != Region::catalytic) continue;
        sigma[f.n0] += 0.5 * f.length;
        sigma[f.n1] += 0.5 * f.length;
    }

    CatalyticIndex idx;
    idx.nodes.reserve(sigma.size());
    for (const auto& [node, s] : sigma) idx.nodes.push_back(node);
    std::sort(idx.nodes.begin(), idx.nodes.end(), [&](int a, int b) {
        const auto& pa = grid.node_coords[a];
        const auto& pb = grid.node_coords[b];
        if (pa[0] != pb[0]) return pa[0] < pb[0];
        return pa[1] < pb[1];
    });
    idx.sigma.reserve(idx.nodes.size());
    for (int node : idx.nodes) idx.sigma.push_back(sigma.at(node));
    return idx;
}

void write_grid_summary(const ChannelGrid& grid, std::ostream& os) {
    const int n_cat = grid.tagged ? catalytic_index(grid).size() : 0;
    os << "level,nx,ny,dx,dy,n_catalytic\n"
       << grid.level << ',' << grid.nx << ',' << grid.ny << ',' << grid.dx << ',' << grid.dy << ','
       << n_cat << '\n';
}

}  // namespace fvrb
