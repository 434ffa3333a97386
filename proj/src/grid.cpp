#include "glpin/grid.hpp"

#include <algorithm>
#include <cmath>

#include "glpin/errors.hpp"

namespace glpin {

namespace {

constexpr int kMargin = 2;
constexpr int kSub = 8;  // samples per quadrant side

// Area fractions of the four quadrants of the plaquette with lower-left
// corner c0: 0 = lower-left, 1 = lower-right, 2 = upper-left, 3 = upper-right.
std::array<double, 4> quadrant_fractions(const DomainSpec& d, Point2 c0, double h) {
  std::array<double, 4> q{};
  const double s = 0.5 * h / kSub;
  for (int qi = 0; qi < 4; ++qi) {
    const double ox = c0.x + (qi & 1 ? 0.5 * h : 0.0);
    const double oy = c0.y + (qi & 2 ? 0.5 * h : 0.0);
    int count = 0;
    for (int b = 0; b < kSub; ++b)
      for (int a = 0; a < kSub; ++a)
        if (d.contains({ox + (a + 0.5) * s, oy + (b + 0.5) * s})) ++count;
    q[qi] = static_cast<double>(count) / (kSub * kSub);
  }
  return q;
}

}  // namespace

Grid::Grid(const DomainSpec& spec, int n) : resolution(n), domain(spec) {
  spec.validate();
  if (n < 16) throw ValidationError("resolution must be at least 16");
  const Box bb = spec.bbox();
  const double w = bb.hi.x - bb.lo.x, hh = bb.hi.y - bb.lo.y;
  h = std::max(w, hh) / n;
  const int cx = static_cast<int>(std::ceil(w / h - 1e-9));
  const int cy = static_cast<int>(std::ceil(hh / h - 1e-9));
  nx = cx + 1 + 2 * kMargin;
  ny = cy + 1 + 2 * kMargin;
  const Point2 c{0.5 * (bb.lo.x + bb.hi.x), 0.5 * (bb.lo.y + bb.hi.y)};
  origin = {c.x - 0.5 * (nx - 1) * h, c.y - 0.5 * (ny - 1) * h};
  if (cx == n) origin.x = bb.lo.x - kMargin * h;
  if (cy == n) origin.y = bb.lo.y - kMargin * h;

  const int N = size();
  inside.assign(N, 0);
  unknown.assign(N, -1);
  for (int k = 0; k < N; ++k) inside[k] = spec.contains(pos(k)) ? 1 : 0;
  // interior nodes must have all four neighbours inside the array
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) inside[idx(i, j)] = 0;
  for (int k = 0; k < N; ++k)
    if (inside[k]) {
      unknown[k] = static_cast<int>(interior_nodes.size());
      interior_nodes.push_back(k);
    }

  cuts.resize(interior_nodes.size());
  std::vector<double> best(N, 2.0);
  std::vector<Point2> best_foot(N);
  for (std::size_t u = 0; u < interior_nodes.size(); ++u) {
    const int k = interior_nodes[u];
    const int i = col(k), j = row(k);
    for (int d = 0; d < 4; ++d) {
      const int q = idx(i + kDx[d], j + kDy[d]);
      if (inside[q]) continue;
      double t = boundary_fraction(spec, pos(k), pos(q));
      if (t > 1.0 - 1e-9) t = 1.0;  // neighbour lies on the boundary
      const Point2 foot = t == 1.0 ? pos(q) : pos(k) + (pos(q) - pos(k)) * t;
      cuts[u].theta[d] = t;
      cuts[u].foot[d] = foot;
      if (1.0 - t < best[q]) {
        best[q] = 1.0 - t;
        best_foot[q] = foot;
      }
    }
  }
  for (int k = 0; k < N; ++k)
    if (best[k] <= 1.0) boundary_nodes.push_back({k, best_foot[k], spec.outward_normal(best_foot[k])});

  // finite-volume weights
  std::vector<std::array<double, 4>> quad(N, std::array<double, 4>{});
  plaq_w.assign(N, 0.0);
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const Point2 c0 = pos(i, j);
      const double lv = spec.level(c0 + Point2{0.5 * h, 0.5 * h});
      std::array<double, 4> q{};
      if (lv < -h)
        q = {1.0, 1.0, 1.0, 1.0};
      else if (lv <= h)
        q = quadrant_fractions(spec, c0, h);
      quad[idx(i, j)] = q;
      plaq_w[idx(i, j)] = 0.25 * (q[0] + q[1] + q[2] + q[3]);
    }
  auto Q = [&](int i, int j, int qi) { return in_range(i, j) ? quad[idx(i, j)][qi] : 0.0; };
  node_w.assign(N, 0.0);
  ex_w.assign(N, 0.0);
  ey_w.assign(N, 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = idx(i, j);
      node_w[k] = 0.25 * (Q(i, j, 0) + Q(i - 1, j, 1) + Q(i, j - 1, 2) + Q(i - 1, j - 1, 3));
      if (i + 1 < nx) ex_w[k] = 0.25 * (Q(i, j, 0) + Q(i, j, 1) + Q(i, j - 1, 2) + Q(i, j - 1, 3));
      if (j + 1 < ny) ey_w[k] = 0.25 * (Q(i, j, 0) + Q(i, j, 2) + Q(i - 1, j, 1) + Q(i - 1, j, 3));
    }
  node_active.assign(N, 0);
  ex_link.assign(N, 0);
  ey_link.assign(N, 0);
  auto P = [&](int i, int j) { return in_range(i, j) && plaq_w[idx(i, j)] > 0.0; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = idx(i, j);
      bool act = node_w[k] > 0.0 || ex_w[k] > 0.0 || ey_w[k] > 0.0;
      if (i > 0) act = act || ex_w[idx(i - 1, j)] > 0.0;
      if (j > 0) act = act || ey_w[idx(i, j - 1)] > 0.0;
      node_active[k] = act;
      if (i + 1 < nx) ex_link[k] = P(i, j) || P(i, j - 1);
      if (j + 1 < ny) ey_link[k] = P(i, j) || P(i - 1, j);
    }
}

double Grid::lattice_area() const {
  double s = 0.0;
  for (double w : plaq_w) s += w;
  return s * h * h;
}

int Grid::nearest(Point2 p) const {
  const int i = std::clamp(static_cast<int>(std::lround((p.x - origin.x) / h)), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::lround((p.y - origin.y) / h)), 0, ny - 1);
  return idx(i, j);
}

GridPtr build_grid(const DomainSpec& spec, int n) { return std::make_shared<const Grid>(spec, n); }

}  // namespace glpin
