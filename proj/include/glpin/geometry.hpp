#pragma once

#include <cmath>
#include <string>

namespace glpin {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  Point2 operator/(double s) const { return {x / s, y / s}; }
  bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

struct Box {
  Point2 lo;
  Point2 hi;
};

enum class Shape { disk, ellipse, rectangle };

std::string to_string(Shape s);
Shape shape_from_string(const std::string& s);

// Disk: a = radius. Ellipse: a, b semi-axes along x, y. Rectangle: a = width,
// b = height. All centred at `center`.
struct DomainSpec {
  Shape shape = Shape::disk;
  double a = 1.0;
  double b = 1.0;
  Point2 center{};

  static DomainSpec disk(double r, Point2 c = {});
  static DomainSpec ellipse(double a, double b, Point2 c = {});
  static DomainSpec rectangle(double w, double h, Point2 c = {});

  void validate() const;

  // Negative inside, zero on the boundary. Roughly a signed distance near the
  // boundary (exact for disks and for rectangles away from corners).
  double level(Point2 p) const;
  bool contains(Point2 p) const { return level(p) < 0.0; }
  Point2 outward_normal(Point2 p) const;
  Box bbox() const;
  double area() const;
  double diameter() const;
};

// First boundary crossing on the segment from `in` (inside) to `out`, as a
// fraction of the segment length in (0, 1].
double boundary_fraction(const DomainSpec& d, Point2 in, Point2 out);

}  // namespace glpin
