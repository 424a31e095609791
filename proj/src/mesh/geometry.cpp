#include "nlfem/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>

namespace nlfem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<Point, 4> corners(const Box& b) {
  return {Point{b.x0, b.y0}, Point{b.x1, b.y0}, Point{b.x1, b.y1}, Point{b.x0, b.y1}};
}

double polygon_boundary_distance(Point p, const std::vector<Point>& poly) {
  double d = kInf;
  for (std::size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

std::vector<Point> l_shape_polygon(double a) {
  return {{0.0, -a}, {a, -a}, {a, a}, {-a, a}, {-a, 0.0}, {0.0, 0.0}};
}

void add_polygon(std::vector<BoundaryPiece>& out, const std::vector<Point>& poly, SegmentKind kind) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    BoundaryPiece p;
    p.a = poly[i];
    p.b = poly[(i + 1) % poly.size()];
    p.kind = kind;
    out.push_back(p);
  }
}

void add_circle(std::vector<BoundaryPiece>& out, Point c, double r, SegmentKind kind) {
  // Four quarter arcs; the axis points are written exactly (cos(pi/2) is not 0).
  const std::array<Point, 5> axis{Point{c.x + r, c.y}, Point{c.x, c.y + r}, Point{c.x - r, c.y},
                                  Point{c.x, c.y - r}, Point{c.x + r, c.y}};
  for (int q = 0; q < 4; ++q) {
    BoundaryPiece p;
    p.is_arc = true;
    p.center = c;
    p.radius = r;
    p.angle_a = q * std::numbers::pi / 2;
    p.angle_b = (q + 1) * std::numbers::pi / 2;
    p.a = axis[q];
    p.b = axis[q + 1];
    p.kind = kind;
    out.push_back(p);
  }
}

}  // namespace

double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

std::string to_string(Subdomain tag) {
  switch (tag) {
    case Subdomain::Exterior: return "EXTERIOR";
    case Subdomain::Omega1: return "OMEGA1";
    case Subdomain::Omega2: return "OMEGA2";
  }
  return "?";
}

double Box::distance(Point p) const {
  const double dx = std::max({x0 - p.x, 0.0, p.x - x1});
  const double dy = std::max({y0 - p.y, 0.0, p.y - y1});
  return std::hypot(dx, dy);
}

double Box::boundary_distance(Point p) const {
  if (!contains(p)) return distance(p);
  return std::min({p.x - x0, x1 - p.x, p.y - y0, y1 - p.y});
}

std::string to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::Rect: return "RECT";
    case GeometryKind::Disk: return "DISK";
    case GeometryKind::AnnularSplitDisk: return "ANNULAR_SPLIT_DISK";
    case GeometryKind::LShapeSplit: return "L_SHAPE_SPLIT";
    case GeometryKind::TwoRects: return "TWO_RECTS";
    case GeometryKind::SquareSplit: return "SQUARE_SPLIT";
  }
  return "?";
}

GeometryKind geometry_kind_from_string(const std::string& name) {
  for (auto k : {GeometryKind::Rect, GeometryKind::Disk, GeometryKind::AnnularSplitDisk,
                 GeometryKind::LShapeSplit, GeometryKind::TwoRects, GeometryKind::SquareSplit})
    if (to_string(k) == name) return k;
  throw GeometryError("unknown geometry kind '" + name +
                      "' (expected RECT, DISK, ANNULAR_SPLIT_DISK, L_SHAPE_SPLIT, TWO_RECTS or SQUARE_SPLIT)");
}

GeometrySpec GeometrySpec::rect(Box box, Subdomain tag) {
  GeometrySpec g;
  g.kind = GeometryKind::Rect;
  g.box = box;
  g.whole_tag = tag;
  g.validate();
  return g;
}

GeometrySpec GeometrySpec::disk(Point center, double radius, Subdomain tag) {
  GeometrySpec g;
  g.kind = GeometryKind::Disk;
  g.center = center;
  g.radius = radius;
  g.whole_tag = tag;
  g.validate();
  return g;
}

GeometrySpec GeometrySpec::annular_split_disk(Point center, double inner_radius, double outer_radius) {
  GeometrySpec g;
  g.kind = GeometryKind::AnnularSplitDisk;
  g.center = center;
  g.radius = inner_radius;
  g.outer_radius = outer_radius;
  g.validate();
  return g;
}

GeometrySpec GeometrySpec::l_shape_split(double half_width) {
  GeometrySpec g;
  g.kind = GeometryKind::LShapeSplit;
  g.half_width = half_width;
  g.validate();
  return g;
}

GeometrySpec GeometrySpec::two_rects(Box omega1, Box omega2) {
  GeometrySpec g;
  g.kind = GeometryKind::TwoRects;
  g.box = omega1;
  g.box2 = omega2;
  g.validate();
  return g;
}

GeometrySpec GeometrySpec::square_split(Box box, double split) {
  GeometrySpec g;
  g.kind = GeometryKind::SquareSplit;
  g.box = box;
  g.split = split;
  g.validate();
  return g;
}

void GeometrySpec::validate() const {
  auto check_box = [](const Box& b, const char* what) {
    if (!(std::isfinite(b.x0) && std::isfinite(b.x1) && std::isfinite(b.y0) && std::isfinite(b.y1)))
      throw GeometryError(std::string(what) + ": non-finite coordinates");
    if (!(b.x1 > b.x0) || !(b.y1 > b.y0))
      throw GeometryError(std::string(what) + ": empty or inverted box (need x0 < x1 and y0 < y1)");
  };
  switch (kind) {
    case GeometryKind::Rect:
      check_box(box, "RECT");
      if (whole_tag == Subdomain::Exterior) throw GeometryError("RECT: tag must be OMEGA1 or OMEGA2");
      break;
    case GeometryKind::Disk:
      if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("DISK: radius must be positive");
      if (whole_tag == Subdomain::Exterior) throw GeometryError("DISK: tag must be OMEGA1 or OMEGA2");
      break;
    case GeometryKind::AnnularSplitDisk:
      if (!(radius > 0.0)) throw GeometryError("ANNULAR_SPLIT_DISK: inner radius must be positive");
      if (!(outer_radius > radius) || !std::isfinite(outer_radius))
        throw GeometryError("ANNULAR_SPLIT_DISK: outer radius must exceed inner radius");
      break;
    case GeometryKind::LShapeSplit:
      if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw GeometryError("L_SHAPE_SPLIT: half width must be positive");
      break;
    case GeometryKind::TwoRects: {
      check_box(box, "TWO_RECTS omega1");
      check_box(box2, "TWO_RECTS omega2");
      const bool separated = box.x1 < box2.x0 || box2.x1 < box.x0 || box.y1 < box2.y0 || box2.y1 < box.y0;
      if (!separated) throw GeometryError("TWO_RECTS: the two boxes must have disjoint closures");
      break;
    }
    case GeometryKind::SquareSplit:
      check_box(box, "SQUARE_SPLIT");
      if (!(split > box.x0 && split < box.x1))
        throw GeometryError("SQUARE_SPLIT: split abscissa must lie strictly inside the box");
      break;
  }
}

Subdomain GeometrySpec::classify(Point p) const {
  switch (kind) {
    case GeometryKind::Rect:
      return box.contains(p) ? whole_tag : Subdomain::Exterior;
    case GeometryKind::Disk:
      return distance(p, center) < radius ? whole_tag : Subdomain::Exterior;
    case GeometryKind::AnnularSplitDisk: {
      const double r = distance(p, center);
      if (r < radius) return Subdomain::Omega2;
      if (r < outer_radius) return Subdomain::Omega1;
      return Subdomain::Exterior;
    }
    case GeometryKind::LShapeSplit: {
      const double a = half_width;
      if (!(std::abs(p.x) < a && std::abs(p.y) < a)) return Subdomain::Exterior;
      if (p.x <= 0.0 && p.y <= 0.0) return Subdomain::Exterior;
      return p.y > 0.0 ? Subdomain::Omega1 : Subdomain::Omega2;
    }
    case GeometryKind::TwoRects:
      if (box.contains(p)) return Subdomain::Omega1;
      if (box2.contains(p)) return Subdomain::Omega2;
      return Subdomain::Exterior;
    case GeometryKind::SquareSplit:
      if (!box.contains(p)) return Subdomain::Exterior;
      return p.x < split ? Subdomain::Omega1 : Subdomain::Omega2;
  }
  return Subdomain::Exterior;
}

double GeometrySpec::area() const {
  switch (kind) {
    case GeometryKind::Rect:
    case GeometryKind::SquareSplit: return box.area();
    case GeometryKind::Disk: return std::numbers::pi * radius * radius;
    case GeometryKind::AnnularSplitDisk: return std::numbers::pi * outer_radius * outer_radius;
    case GeometryKind::LShapeSplit: return 3.0 * half_width * half_width;
    case GeometryKind::TwoRects: return box.area() + box2.area();
  }
  return 0.0;
}

double GeometrySpec::diameter() const {
  switch (kind) {
    case GeometryKind::Rect:
    case GeometryKind::SquareSplit: return std::hypot(box.x1 - box.x0, box.y1 - box.y0);
    case GeometryKind::Disk: return 2.0 * radius;
    case GeometryKind::AnnularSplitDisk: return 2.0 * outer_radius;
    case GeometryKind::LShapeSplit: return 2.0 * std::sqrt(2.0) * half_width;
    case GeometryKind::TwoRects: {
      double d = 0.0;
      std::vector<Point> pts;
      for (auto c : corners(box)) pts.push_back(c);
      for (auto c : corners(box2)) pts.push_back(c);
      for (auto a : pts)
        for (auto b : pts) d = std::max(d, distance(a, b));
      return d;
    }
  }
  return 0.0;
}

double GeometrySpec::bounding_radius() const {
  double r = 0.0;
  switch (kind) {
    case GeometryKind::Rect:
    case GeometryKind::SquareSplit:
      for (auto c : corners(box)) r = std::max(r, norm(c));
      return r;
    case GeometryKind::Disk: return norm(center) + radius;
    case GeometryKind::AnnularSplitDisk: return norm(center) + outer_radius;
    case GeometryKind::LShapeSplit: return std::sqrt(2.0) * half_width;
    case GeometryKind::TwoRects:
      for (auto c : corners(box)) r = std::max(r, norm(c));
      for (auto c : corners(box2)) r = std::max(r, norm(c));
      return r;
  }
  return r;
}

bool GeometrySpec::has_interface() const {
  switch (kind) {
    case GeometryKind::AnnularSplitDisk:
    case GeometryKind::LShapeSplit:
    case GeometryKind::SquareSplit: return true;
    default: return false;
  }
}

double GeometrySpec::distance_to_interface(Point p) const {
  switch (kind) {
    case GeometryKind::AnnularSplitDisk: return std::abs(distance(p, center) - radius);
    case GeometryKind::LShapeSplit: return segment_distance(p, {0.0, 0.0}, {half_width, 0.0});
    case GeometryKind::SquareSplit: return segment_distance(p, {split, box.y0}, {split, box.y1});
    default: return kInf;
  }
}

double GeometrySpec::distance_to_boundary(Point p) const {
  switch (kind) {
    case GeometryKind::Rect:
    case GeometryKind::SquareSplit: return box.boundary_distance(p);
    case GeometryKind::Disk: return std::abs(distance(p, center) - radius);
    case GeometryKind::AnnularSplitDisk: return std::abs(distance(p, center) - outer_radius);
    case GeometryKind::LShapeSplit: return polygon_boundary_distance(p, l_shape_polygon(half_width));
    case GeometryKind::TwoRects: return std::min(box.boundary_distance(p), box2.boundary_distance(p));
  }
  return kInf;
}

double GeometrySpec::distance_to_domain(Point p) const {
  switch (kind) {
    case GeometryKind::Rect:
    case GeometryKind::SquareSplit: return box.distance(p);
    case GeometryKind::Disk: return std::max(0.0, distance(p, center) - radius);
    case GeometryKind::AnnularSplitDisk: return std::max(0.0, distance(p, center) - outer_radius);
    case GeometryKind::LShapeSplit: {
      const double a = half_width;
      const Box outer{-a, a, -a, a};
      if (p.x < 0.0 && p.y < 0.0 && p.x > -a && p.y > -a)
        return std::min(-p.x, -p.y);
      return outer.distance(p);
    }
    case GeometryKind::TwoRects: return std::min(box.distance(p), box2.distance(p));
  }
  return kInf;
}

Point GeometrySpec::interface_normal(Point p) const {
  switch (kind) {
    case GeometryKind::AnnularSplitDisk: {
      const Point d = p - center;
      const double r = norm(d);
      if (r == 0.0) throw GeometryError("interface normal undefined at the disk center");
      return (1.0 / r) * d;
    }
    case GeometryKind::LShapeSplit: return {0.0, 1.0};
    case GeometryKind::SquareSplit: return {1.0, 0.0};
    default: throw GeometryError(to_string(kind) + " has no interface");
  }
}

std::vector<BoundaryPiece> GeometrySpec::pieces() const {
  std::vector<BoundaryPiece> out;
  switch (kind) {
    case GeometryKind::Rect: {
      auto c = corners(box);
      add_polygon(out, {c.begin(), c.end()}, SegmentKind::Boundary);
      break;
    }
    case GeometryKind::Disk: add_circle(out, center, radius, SegmentKind::Boundary); break;
    case GeometryKind::AnnularSplitDisk:
      add_circle(out, center, outer_radius, SegmentKind::Boundary);
      add_circle(out, center, radius, SegmentKind::Interface);
      break;
    case GeometryKind::LShapeSplit: {
      const double a = half_width;
      add_polygon(out, {{0.0, -a}, {a, -a}, {a, 0.0}, {a, a}, {-a, a}, {-a, 0.0}, {0.0, 0.0}},
                  SegmentKind::Boundary);
      out.push_back({{0.0, 0.0}, {a, 0.0}, SegmentKind::Interface});
      break;
    }
    case GeometryKind::TwoRects: {
      auto c1 = corners(box);
      auto c2 = corners(box2);
      add_polygon(out, {c1.begin(), c1.end()}, SegmentKind::Boundary);
      add_polygon(out, {c2.begin(), c2.end()}, SegmentKind::Boundary);
      break;
    }
    case GeometryKind::SquareSplit: {
      const Box& b = box;
      add_polygon(out, {{b.x0, b.y0}, {split, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {split, b.y1}, {b.x0, b.y1}},
                  SegmentKind::Boundary);
      out.push_back({{split, b.y0}, {split, b.y1}, SegmentKind::Interface});
      break;
    }
  }
  return out;
}

}  // namespace nlfem
