#include "glpin/field.hpp"

#include <algorithm>
#include <cmath>

namespace glpin {

ScalarField::ScalarField(GridPtr g, double fill) : grid(std::move(g)), values(grid->size(), fill) {}

ScalarField ScalarField::sample(GridPtr g, const std::function<double(Point2)>& f) {
  ScalarField s(g);
  for (int k = 0; k < g->size(); ++k) s.values[k] = f(g->pos(k));
  return s;
}

ComplexField::ComplexField(GridPtr g, cplx fill) : grid(std::move(g)), values(grid->size(), fill) {}

ComplexField ComplexField::sample(GridPtr g, const std::function<cplx(Point2)>& f) {
  ComplexField s(g);
  for (int k = 0; k < g->size(); ++k) s.values[k] = f(g->pos(k));
  return s;
}

VectorField::VectorField(GridPtr g) : grid(std::move(g)), x(grid->size(), 0.0), y(grid->size(), 0.0) {}

EdgeField::EdgeField(GridPtr g) : grid(std::move(g)), ax(grid->size(), 0.0), ay(grid->size(), 0.0) {}

EdgeField EdgeField::sample(GridPtr g, const std::function<Point2(Point2)>& f) {
  EdgeField e(g);
  const double h = g->h;
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i) {
      const int k = g->idx(i, j);
      const Point2 p = g->pos(i, j);
      if (g->ex_link[k]) e.ax[k] = f(p + Point2{0.5 * h, 0.0}).x;
      if (g->ey_link[k]) e.ay[k] = f(p + Point2{0.0, 0.5 * h}).y;
    }
  return e;
}

EdgeField EdgeField::perp_gradient(const ScalarField& psi) {
  const Grid& g = *psi.grid;
  EdgeField e(psi.grid);
  const double s = 1.0 / (4.0 * g.h);
  auto v = [&](int i, int j) { return psi.values[g.idx(i, j)]; };
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      const int k = g.idx(i, j);
      // ax = -d_y psi at (i+1/2, j); ay = d_x psi at (i, j+1/2)
      if (g.ex_link[k]) e.ax[k] = -(v(i, j + 1) + v(i + 1, j + 1) - v(i, j - 1) - v(i + 1, j - 1)) * s;
      if (g.ey_link[k]) e.ay[k] = (v(i + 1, j) + v(i + 1, j + 1) - v(i - 1, j) - v(i - 1, j + 1)) * s;
    }
  return e;
}

namespace {

template <class T>
T bilinear(const std::vector<T>& vals, const Grid& g, Point2 p) {
  const double fx = (p.x - g.origin.x) / g.h, fy = (p.y - g.origin.y) / g.h;
  int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
  int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
  const double tx = fx - i, ty = fy - j;
  if (std::abs(tx - std::round(tx)) < 1e-12 && std::abs(ty - std::round(ty)) < 1e-12)
    return vals[g.idx(i + static_cast<int>(std::round(tx)), j + static_cast<int>(std::round(ty)))];
  return (1 - tx) * (1 - ty) * vals[g.idx(i, j)] + tx * (1 - ty) * vals[g.idx(i + 1, j)] +
         (1 - tx) * ty * vals[g.idx(i, j + 1)] + tx * ty * vals[g.idx(i + 1, j + 1)];
}

}  // namespace

double interpolate(const ScalarField& f, Point2 p) { return bilinear(f.values, *f.grid, p); }
cplx interpolate(const ComplexField& f, Point2 p) { return bilinear(f.values, *f.grid, p); }

double regular_value(const ScalarField& f, Point2 p) {
  const Grid& g = *f.grid;
  const int k = g.nearest(p);
  if (distance(g.pos(k), p) < 1e-12 * g.h) {
    const int i = g.col(k), j = g.row(k);
    double s = 0.0;
    for (int d = 0; d < 4; ++d) s += f.values[g.idx(i + kDx[d], j + kDy[d])];
    return 0.25 * s;
  }
  return interpolate(f, p);
}

double max_abs_interior(const ScalarField& f) {
  double m = 0.0;
  for (int k : f.grid->interior_nodes) m = std::max(m, std::abs(f.values[k]));
  return m;
}

}  // namespace glpin
