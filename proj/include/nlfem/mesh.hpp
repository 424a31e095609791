#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlfem/geometry.hpp"

namespace nlfem {

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;  // stored with e[0] < e[1]

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conforming triangulation of B(0, far_radius) (or of Omega only) with
/// per-triangle subdomain tags. Triangles tagged Exterior form the auxiliary
/// layer between Omega and the far-field circle. Nodes touching Omega come
/// first: indices [0, num_domain_nodes) are exactly the nodes of Omega
/// triangles.
struct Mesh {
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;
  std::vector<Subdomain> tags;
  std::vector<int> boundary_nodes;   // sorted, nodes on the boundary of Omega
  std::vector<Edge> interface_edges; // sorted, OMEGA1/OMEGA2 shared edges
  double h_max = 0.0;                // over Omega triangles
  int num_domain_nodes = 0;
  double far_radius = 0.0;           // 0 when no auxiliary layer was built
  GeometrySpec geometry;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int count(Subdomain tag) const;
  bool has_auxiliary() const { return count(Subdomain::Exterior) > 0; }

  std::array<Point, 3> corners(int t) const {
    const auto& tr = triangles[t];
    return {nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]};
  }
  double area(int t) const;
  double diameter(int t) const;
  Point barycenter(int t) const;

  /// Recomputes boundary nodes, interface edges, h_max and num_domain_nodes
  /// from the triangles and tags.
  void finalize_topology();

  /// Copy without the auxiliary layer.
  Mesh domain_only() const;
};

struct MeshOptions {
  /// Build the triangulated layer between Omega and the far circle.
  bool auxiliary = true;
  /// Far circle radius; 0 selects far_radius_factor * bounding radius of Omega.
  double far_radius = 0.0;
  double far_radius_factor = 2.0;
  /// Size growth per unit distance away from Omega in the auxiliary layer.
  double exterior_growth = 0.5;
  /// Quality bound on circumradius / shortest edge.
  double max_radius_edge = 1.4142135623730951;
  /// Longest edge allowed relative to the local target size.
  double size_factor = 1.3;
  /// Optional cap on edge length along the boundary of Omega (0 = none).
  double boundary_max_edge = 0.0;
  /// Refinement safety cap.
  int max_vertices = 2'000'000;
};

enum class GradingTarget { Interface, Point, Boundary };

struct GradingSpec {
  double mu = 1.0;
  GradingTarget target = GradingTarget::Interface;
  Point point{};
};

/// Target size h(x) = h * max(d, h^mu)^((mu-1)/mu), capped at h.
double graded_size(double h, double mu, double d);

Mesh build_mesh(const GeometrySpec& spec, double h, const MeshOptions& opts = {});
Mesh grade_mesh(const GeometrySpec& spec, double h, const GradingSpec& grading, const MeshOptions& opts = {});

double triangle_inradius(Point a, Point b, Point c);

/// max over Omega triangles of diameter / inscribed-circle diameter.
double shape_regularity(const Mesh& mesh);

struct ConformityReport {
  bool ok = true;
  std::string message;
};

/// Edge-hash audit and orientation/tag checks of the mesh invariants.
ConformityReport check_mesh(const Mesh& mesh, double tol = 1e-12);

void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);
/// Reads the text format; topology is rebuilt, the geometry is attached as given.
Mesh read_mesh(std::istream& is, const GeometrySpec& geometry);
Mesh read_mesh(const std::string& path, const GeometrySpec& geometry);

}  // namespace nlfem
