#pragma once

#include <array>
#include <iosfwd>
#include <vector>

namespace fvrb {

/// Boundary region of a channel domain face.
enum class Region { inlet, outlet, inert, catalytic };

const char* region_name(Region r);

/// One straight boundary segment between two adjacent boundary nodes.
struct BoundaryFace {
    int n0 = -1;
    int n1 = -1;
    double length = 0.0;
    std::array<double, 2> normal{0.0, 0.0};  // outward unit normal
    Region region = Region::inert;
};

/// Half-open interval (lo, hi) along the bottom wall.
struct Span {
    double lo = 0.0;
    double hi = 0.0;
};

/// Tensor-product Voronoi-box grid of the rectangle (0,lx) x (0,ly).
///
/// Unknowns are node-centred: node (i,j) sits at (i*dx, j*dy) and owns the
/// dual box obtained by clipping [x-dx/2,x+dx/2] x [y-dy/2,y+dy/2] against
/// the domain, so boundary boxes have half width and corner boxes quarter
/// area. The boxes partition the domain exactly.
struct ChannelGrid {
    int level = -1;  // refinement level used to build the grid, -1 if custom
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    std::vector<std::array<double, 2>> node_coords;  // collocation points
    std::vector<double> cell_measure;                // Voronoi box areas
    std::vector<BoundaryFace> bfaces;
    bool tagged = false;

    int n_nodes() const { return nx * ny; }
    int node(int i, int j) const { return j * nx + i; }
};

/// Catalytic boundary cells: node indices (sorted by coordinate) and the
/// boundary measure sigma each node controls, i.e. half the total length of
/// the catalytic faces incident to it.
struct CatalyticIndex {
    std::vector<int> nodes;
    std::vector<double> sigma;

    int size() const { return static_cast<int>(nodes.size()); }
};

/// Uniform grid with 10 * 2^level nodes in each direction.
/// Levels above 12 are rejected (index arithmetic would overflow).
ChannelGrid build_grid(int level, double lx, double ly);

/// Channel tagging: left edge -> inlet, right edge -> outlet, bottom faces
/// whose open overlap with `catalytic_span` has positive length -> catalytic,
/// everything else -> inert. Throws if the span resolves to no face.
ChannelGrid tag_boundary(ChannelGrid grid, Span catalytic_span);

/// Whole-edge tagging for non-channel configurations (used by tests and the
/// one-dimensional verification problems).
ChannelGrid tag_edges(ChannelGrid grid, Region left, Region right, Region bottom, Region top);

/// Catalytic node enumeration for a tagged grid.
CatalyticIndex catalytic_index(const ChannelGrid& grid);

/// CSV one-liner: level,nx,ny,dx,dy,n_catalytic
void write_grid_summary(const ChannelGrid& grid, std::ostream& os);

}  // namespace fvrb
