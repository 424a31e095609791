#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlfem {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double c, Point a) { return {c * a.x, c * a.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Distance from p to the closed segment [a, b].
double segment_distance(Point p, Point a, Point b);

enum class Subdomain : int { Exterior = 0, Omega1 = 1, Omega2 = 2 };

std::string to_string(Subdomain tag);

struct Box {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  bool contains(Point p) const { return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1; }
  double area() const { return (x1 - x0) * (y1 - y0); }
  /// Distance to the box (zero inside).
  double distance(Point p) const;
  /// Distance to the box boundary.
  double boundary_distance(Point p) const;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GeometryKind { Rect, Disk, AnnularSplitDisk, LShapeSplit, TwoRects, SquareSplit };

std::string to_string(GeometryKind kind);
GeometryKind geometry_kind_from_string(const std::string& name);

enum class SegmentKind { Boundary, Interface };

/// A straight piece of the domain description. Arc pieces carry the circle
/// they discretize so that refinement can place new vertices on it.
struct BoundaryPiece {
  Point a;
  Point b;
  SegmentKind kind = SegmentKind::Boundary;
  bool is_arc = false;
  Point center;
  double radius = 0.0;
  double angle_a = 0.0;
  double angle_b = 0.0;
};

/// Test geometries: a domain Omega split into a local part (Omega1) and a
/// nonlocal part (Omega2).
///
///  - Rect / Disk: the whole domain carries `whole_tag`.
///  - AnnularSplitDisk: Omega = B(center, outer_radius), Omega2 = B(center, radius).
///  - LShapeSplit: (-a,a)^2 minus [-a,0]^2, Omega1 = {y > 0}.
///  - TwoRects: Omega1 = box, Omega2 = box2 (disjoint closures).
///  - SquareSplit: box split at x = split, Omega1 = {x < split}.
struct GeometrySpec {
  GeometryKind kind = GeometryKind::SquareSplit;
  Box box{-0.5, 0.5, -0.5, 0.5};
  Box box2{};
  Point center{};
  double radius = 1.0;
  double outer_radius = 2.0;
  double half_width = 0.5;
  double split = 0.0;
  Subdomain whole_tag = Subdomain::Omega2;

  static GeometrySpec rect(Box box, Subdomain tag = Subdomain::Omega2);
  static GeometrySpec disk(Point center, double radius, Subdomain tag = Subdomain::Omega2);
  static GeometrySpec annular_split_disk(Point center, double inner_radius, double outer_radius);
  static GeometrySpec l_shape_split(double half_width = 0.5);
  static GeometrySpec two_rects(Box omega1, Box omega2);
  static GeometrySpec square_split(Box box, double split = 0.0);

  /// Throws GeometryError on nonsensical parameters.
  void validate() const;

  /// Subdomain containing p (Exterior outside Omega). Points on internal
  /// interfaces are resolved arbitrarily.
  Subdomain classify(Point p) const;
  bool inside(Point p) const { return classify(p) != Subdomain::Exterior; }

  double area() const;
  double diameter() const;
  /// max |x| over the closure of Omega.
  double bounding_radius() const;

  bool has_interface() const;
  double distance_to_interface(Point p) const;
  double distance_to_boundary(Point p) const;
  /// Zero for points in the closure of Omega.
  double distance_to_domain(Point p) const;
  /// Unit normal attached to the declared interface at p: radial for the
  /// split disk, +e along the splitting axis for the straight interfaces.
  Point interface_normal(Point p) const;

  /// Boundary and interface pieces. Circles come as several arcs.
  std::vector<BoundaryPiece> pieces() const;
};

}  // namespace nlfem
