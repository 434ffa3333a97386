#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "glpin/geometry.hpp"

namespace glpin {

// Neighbour directions used by stencils: +x, -x, +y, -y.
inline constexpr std::array<int, 4> kDx{1, -1, 0, 0};
inline constexpr std::array<int, 4> kDy{0, 0, 1, -1};

struct BoundaryNode {
  int node = 0;
  Point2 foot;    // nearest boundary crossing seen from an interior neighbour
  Point2 normal;  // analytic outward normal at `foot`
};

// Shortley-Weller data for one interior node: fraction theta of the grid step
// to the boundary in each direction (1 when the neighbour is interior).
struct CutInfo {
  std::array<double, 4> theta{1.0, 1.0, 1.0, 1.0};
  std::array<Point2, 4> foot{};
};

// Uniform node grid covering the bounding box of the domain. Two parallel
// discretisations live on it:
//  * nodal finite differences on the strict interior (`inside`), used by the
//    Dirichlet solvers;
//  * a finite-volume lattice (nodes, x-edges, y-edges, plaquettes with area
//    fractions), used for the Ginzburg-Landau type energies.
// Edge k in ex is (i,j)-(i+1,j), in ey is (i,j)-(i,j+1); plaquette k has lower
// left corner (i,j). All share the node index k = j*nx + i.
class Grid {
 public:
  Grid(const DomainSpec& spec, int n);

  int nx = 0;
  int ny = 0;
  int resolution = 0;
  double h = 0.0;
  Point2 origin;
  DomainSpec domain;

  std::vector<std::uint8_t> inside;
  std::vector<int> unknown;         // node -> interior unknown, or -1
  std::vector<int> interior_nodes;  // unknown -> node
  std::vector<CutInfo> cuts;        // per unknown
  std::vector<BoundaryNode> boundary_nodes;

  std::vector<double> node_w;   // control-cell fraction inside
  std::vector<double> ex_w;     // h x h rectangle centred on the edge
  std::vector<double> ey_w;
  std::vector<double> plaq_w;   // plaquette area fraction
  std::vector<std::uint8_t> node_active;
  std::vector<std::uint8_t> ex_link;  // edge of a plaquette with plaq_w > 0
  std::vector<std::uint8_t> ey_link;

  int size() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  int col(int k) const { return k % nx; }
  int row(int k) const { return k / nx; }
  Point2 pos(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
  Point2 pos(int k) const { return pos(col(k), row(k)); }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
  int interior_count() const { return static_cast<int>(interior_nodes.size()); }
  double lattice_area() const;
  // Nearest node to p (clamped into the grid).
  int nearest(Point2 p) const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const DomainSpec& spec, int n);

}  // namespace glpin
