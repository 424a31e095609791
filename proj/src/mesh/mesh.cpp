#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nlfem/mesh.hpp"

namespace nlfem {

namespace {

double signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

}  // namespace

int Mesh::count(Subdomain tag) const {
  return static_cast<int>(std::count(tags.begin(), tags.end(), tag));
}

double Mesh::area(int t) const {
  const auto p = corners(t);
  return signed_area(p[0], p[1], p[2]);
}

double Mesh::diameter(int t) const {
  const auto p = corners(t);
  return std::max({distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])});
}

Point Mesh::barycenter(int t) const {
  const auto p = corners(t);
  return (1.0 / 3.0) * (p[0] + p[1] + p[2]);
}

void Mesh::finalize_topology() {
  if (tags.size() != triangles.size()) throw MeshError("tag count does not match triangle count");
  const int nn = num_nodes();
  for (const auto& tr : triangles)
    for (int v : tr)
      if (v < 0 || v >= nn) throw MeshError("triangle references node " + std::to_string(v) + " out of range");

  // Renumber so that nodes of Omega triangles come first, keeping relative order.
  std::vector<char> in_domain(nn, 0);
  for (int t = 0; t < num_triangles(); ++t)
    if (tags[t] != Subdomain::Exterior)
      for (int v : triangles[t]) in_domain[v] = 1;
  std::vector<int> perm(nn);
  int next = 0;
  for (int v = 0; v < nn; ++v)
    if (in_domain[v]) perm[v] = next++;
  num_domain_nodes = next;
  for (int v = 0; v < nn; ++v)
    if (!in_domain[v]) perm[v] = next++;
  std::vector<Point> renumbered(nn);
  for (int v = 0; v < nn; ++v) renumbered[perm[v]] = nodes[v];
  nodes = std::move(renumbered);
  for (auto& tr : triangles)
    for (int& v : tr) v = perm[v];

  // Edge audit: classify each edge by the tags of its (at most two) triangles.
  std::map<Edge, std::vector<Subdomain>> edges;
  for (int t = 0; t < num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) edges[make_edge(triangles[t][i], triangles[t][(i + 1) % 3])].push_back(tags[t]);
  std::vector<char> on_boundary(nn, 0);
  interface_edges.clear();
  for (const auto& [e, side] : edges) {
    const int n_dom = static_cast<int>(std::count_if(side.begin(), side.end(),
                                                     [](Subdomain s) { return s != Subdomain::Exterior; }));
    if (n_dom == 1) on_boundary[e[0]] = on_boundary[e[1]] = 1;
    if (side.size() == 2 && side[0] != side[1] && side[0] != Subdomain::Exterior && side[1] != Subdomain::Exterior)
      interface_edges.push_back(e);
  }
  boundary_nodes.clear();
  for (int v = 0; v < nn; ++v)
    if (on_boundary[v]) boundary_nodes.push_back(v);

  h_max = 0.0;
  for (int t = 0; t < num_triangles(); ++t)
    if (tags[t] != Subdomain::Exterior) h_max = std::max(h_max, diameter(t));
}

Mesh Mesh::domain_only() const {
  Mesh m;
  m.geometry = geometry;
  m.nodes.assign(nodes.begin(), nodes.begin() + num_domain_nodes);
  for (int t = 0; t < num_triangles(); ++t) {
    if (tags[t] == Subdomain::Exterior) continue;
    m.triangles.push_back(triangles[t]);
    m.tags.push_back(tags[t]);
  }
  m.finalize_topology();
  return m;
}

double triangle_inradius(Point a, Point b, Point c) {
  const double area = std::abs(signed_area(a, b, c));
  const double perimeter = distance(a, b) + distance(b, c) + distance(c, a);
  return 2.0 * area / perimeter;
}

double shape_regularity(const Mesh& mesh) {
  double sigma = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    const auto p = mesh.corners(t);
    if (!(signed_area(p[0], p[1], p[2]) > 0.0))
      throw MeshError("degenerate triangle " + std::to_string(t) + " in shape regularity computation");
    sigma = std::max(sigma, mesh.diameter(t) / (2.0 * triangle_inradius(p[0], p[1], p[2])));
  }
  return sigma;
}

ConformityReport check_mesh(const Mesh& mesh, double tol) {
  std::ostringstream msg;
  auto fail = [&](const std::string& what) {
    msg << what;
    return ConformityReport{false, msg.str()};
  };
  if (mesh.tags.size() != mesh.triangles.size()) return fail("tag count mismatch");
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (!(mesh.area(t) > 0.0)) return fail("triangle " + std::to_string(t) + " has nonpositive signed area");

  std::map<Edge, std::vector<int>> edges;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int i = 0; i < 3; ++i) edges[make_edge(mesh.triangles[t][i], mesh.triangles[t][(i + 1) % 3])].push_back(t);
  for (const auto& [e, ts] : edges) {
    if (ts.size() > 2) return fail("edge " + std::to_string(e[0]) + "-" + std::to_string(e[1]) + " has more than two triangles");
    if (ts.size() == 2) {
      // Neighbours across an edge must lie on opposite sides of it.
      const auto& t0 = mesh.triangles[ts[0]];
      const auto& t1 = mesh.triangles[ts[1]];
      auto apex = [&](const Triangle& tr) {
        for (int v : tr)
          if (v != e[0] && v != e[1]) return v;
        return -1;
      };
      const Point a = mesh.nodes[e[0]], b = mesh.nodes[e[1]];
      const double s0 = cross(b - a, mesh.nodes[apex(t0)] - a);
      const double s1 = cross(b - a, mesh.nodes[apex(t1)] - a);
      if (s0 * s1 >= 0.0) return fail("triangles " + std::to_string(ts[0]) + " and " + std::to_string(ts[1]) + " overlap");
    }
  }
  // Boundary of the whole triangulation: a single closed loop per component,
  // so every vertex on it has exactly two boundary edges.
  std::vector<int> hull_degree(mesh.num_nodes(), 0);
  for (const auto& [e, ts] : edges)
    if (ts.size() == 1) {
      ++hull_degree[e[0]];
      ++hull_degree[e[1]];
    }
  for (int v = 0; v < mesh.num_nodes(); ++v)
    if (hull_degree[v] != 0 && hull_degree[v] != 2) return fail("node " + std::to_string(v) + " is a nonmanifold hull vertex");

  for (const Edge& e : mesh.interface_edges) {
    const auto& ts = edges.at(e);
    if (ts.size() != 2) return fail("interface edge with a single triangle");
    const Subdomain a = mesh.tags[ts[0]], b = mesh.tags[ts[1]];
    const bool ok = (a == Subdomain::Omega1 && b == Subdomain::Omega2) || (a == Subdomain::Omega2 && b == Subdomain::Omega1);
    if (!ok) return fail("interface edge not shared by OMEGA1 and OMEGA2");
  }
  const double diam = mesh.geometry.diameter();
  for (int v : mesh.boundary_nodes) {
    const double d = mesh.geometry.distance_to_boundary(mesh.nodes[v]);
    if (d > tol * diam) {
      msg << "boundary node " << v << " at distance " << d << " from the boundary";
      return {false, msg.str()};
    }
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    if (mesh.geometry.classify(mesh.barycenter(t)) != mesh.tags[t])
      return fail("triangle " + std::to_string(t) + " tag disagrees with the barycenter rule");
  }
  return {};
}

}  // namespace nlfem
