#pragma once

// Incremental Delaunay triangulation (Bowyer-Watson) with exact predicates.
// Internal to the mesh module.

#include <array>
#include <vector>

#include "nlfem/geometry.hpp"
#include "nlfem/mesh.hpp"

namespace nlfem::detail {

/// Positive when a, b, c are counterclockwise. Exact sign.
double orient2d(Point a, Point b, Point c);
/// Positive when d lies inside the circle through the counterclockwise a, b, c. Exact sign.
double incircle(Point a, Point b, Point c, Point d);

Point circumcenter(Point a, Point b, Point c);

struct DTri {
  std::array<int, 3> v{};
  std::array<int, 3> nb{-1, -1, -1};  // nb[i] lies across the edge opposite v[i]
  bool alive = false;
};

class Delaunay {
 public:
  /// Starts from a super triangle enclosing B(center, radius); its vertices
  /// are 0, 1, 2.
  Delaunay(Point center, double radius);

  static bool is_super(int v) { return v < 3; }

  int locate(Point p, int hint) const;
  /// Triangles whose circumcircle strictly contains p, connected to `start`.
  std::vector<int> cavity(Point p, int start) const;

  /// Inserts p and returns its vertex index. If p coincides with an existing
  /// vertex, that index is returned and nothing changes. `removed_edges`
  /// receives the edges of the destroyed triangles.
  int insert(Point p, int hint = -1, std::vector<Edge>* removed_edges = nullptr);
  int insert_with_cavity(Point p, const std::vector<int>& cav, std::vector<Edge>* removed_edges);

  /// Alive triangle containing edge (a, b), or -1.
  int find_edge(int a, int b) const;
  /// Alive triangles incident to vertex a.
  std::vector<int> star(int a) const;

  const std::vector<Point>& points() const { return pts_; }
  const std::vector<DTri>& triangles() const { return tris_; }
  int any_triangle_of(int v) const { return vert_tri_[v]; }
  const std::vector<int>& last_created() const { return created_; }

 private:
  int new_triangle();

  std::vector<Point> pts_;
  std::vector<DTri> tris_;
  std::vector<int> vert_tri_;
  std::vector<int> free_;
  std::vector<int> created_;
  mutable std::vector<unsigned> mark_;
  mutable unsigned stamp_ = 0;
  mutable unsigned walk_counter_ = 0;
};

}  // namespace nlfem::detail
