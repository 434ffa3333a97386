#include "glpin/geometry.hpp"

#include <algorithm>
#include <numbers>

#include "glpin/errors.hpp"

namespace glpin {

std::string to_string(Shape s) {
  switch (s) {
    case Shape::disk: return "disk";
    case Shape::ellipse: return "ellipse";
    case Shape::rectangle: return "rectangle";
  }
  return "?";
}

Shape shape_from_string(const std::string& s) {
  if (s == "disk") return Shape::disk;
  if (s == "ellipse") return Shape::ellipse;
  if (s == "rectangle") return Shape::rectangle;
  throw ValidationError("unknown shape '" + s + "'");
}

DomainSpec DomainSpec::disk(double r, Point2 c) { return {Shape::disk, r, r, c}; }
DomainSpec DomainSpec::ellipse(double a, double b, Point2 c) { return {Shape::ellipse, a, b, c}; }
DomainSpec DomainSpec::rectangle(double w, double h, Point2 c) { return {Shape::rectangle, w, h, c}; }

void DomainSpec::validate() const {
  auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
  if (bad(a) || (shape != Shape::disk && bad(b)))
    throw ValidationError(to_string(shape) + ": dimensions must be positive");
  if (!std::isfinite(center.x) || !std::isfinite(center.y))
    throw ValidationError(to_string(shape) + ": center must be finite");
}

double DomainSpec::level(Point2 p) const {
  const Point2 q = p - center;
  switch (shape) {
    case Shape::disk: return norm(q) - a;
    case Shape::ellipse: {
      const double r = std::hypot(q.x / a, q.y / b);
      const double gx = q.x / (a * a), gy = q.y / (b * b);
      const double g = std::hypot(gx, gy);
      if (r < 1e-12 || g < 1e-300) return -std::min(a, b);
      // first-order distance estimate F/|grad F| with F = r - 1
      return (r - 1.0) * r / g;
    }
    case Shape::rectangle:
      return std::max(std::abs(q.x) - 0.5 * a, std::abs(q.y) - 0.5 * b);
  }
  return 0.0;
}

Point2 DomainSpec::outward_normal(Point2 p) const {
  const Point2 q = p - center;
  Point2 n{};
  switch (shape) {
    case Shape::disk: n = q; break;
    case Shape::ellipse: n = {q.x / (a * a), q.y / (b * b)}; break;
    case Shape::rectangle:
      if (std::abs(q.x) - 0.5 * a > std::abs(q.y) - 0.5 * b)
        n = {q.x > 0 ? 1.0 : -1.0, 0.0};
      else
        n = {0.0, q.y > 0 ? 1.0 : -1.0};
      break;
  }
  const double l = norm(n);
  return l > 0 ? n / l : Point2{1.0, 0.0};
}

Box DomainSpec::bbox() const {
  const double hx = shape == Shape::rectangle ? 0.5 * a : a;
  const double hy = shape == Shape::rectangle ? 0.5 * b : (shape == Shape::disk ? a : b);
  return {{center.x - hx, center.y - hy}, {center.x + hx, center.y + hy}};
}

double DomainSpec::area() const {
  switch (shape) {
    case Shape::disk: return std::numbers::pi * a * a;
    case Shape::ellipse: return std::numbers::pi * a * b;
    case Shape::rectangle: return a * b;
  }
  return 0.0;
}

double DomainSpec::diameter() const {
  switch (shape) {
    case Shape::disk: return 2 * a;
    case Shape::ellipse: return 2 * std::max(a, b);
    case Shape::rectangle: return std::hypot(a, b);
  }
  return 0.0;
}

double boundary_fraction(const DomainSpec& d, Point2 in, Point2 out) {
  double lo = 0.0, hi = 1.0;
  const Point2 dir = out - in;
  if (!d.contains(out)) {
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (d.contains(in + dir * mid))
        lo = mid;
      else
        hi = mid;
    }
  }
  return hi;
}

}  // namespace glpin
