#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlfem/assembly.hpp"
#include "nlfem/quadrature.hpp"

namespace nlfem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(Triplets& out, const IndexMap& map, const Triangle& t, const double (&ke)[3][3]) {
  for (int i = 0; i < 3; ++i) {
    const int r = map.node_to_row[t[i]];
    if (r < 0) continue;
    for (int j = 0; j < 3; ++j) {
      const int c = map.node_to_row[t[j]];
      if (c >= 0) out.emplace_back(r, c, ke[i][j]);
    }
  }
}

SparseMatrix from_triplets(int n, const Triplets& trip) {
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace

IndexMap interior_dofs(const Mesh& mesh) {
  IndexMap map;
  map.node_to_row.assign(mesh.num_nodes(), -1);
  std::vector<char> on_boundary(mesh.num_nodes(), 0);
  for (int b : mesh.boundary_nodes) on_boundary[b] = 1;
  for (int i = 0; i < mesh.num_domain_nodes; ++i)
    if (!on_boundary[i]) {
      map.node_to_row[i] = map.size();
      map.row_to_node.push_back(i);
    }
  return map;
}

IndexMap domain_nodes(const Mesh& mesh) {
  IndexMap map;
  map.node_to_row.assign(mesh.num_nodes(), -1);
  for (int i = 0; i < mesh.num_domain_nodes; ++i) {
    map.node_to_row[i] = i;
    map.row_to_node.push_back(i);
  }
  return map;
}

SparseMatrix assemble_local(const Mesh& mesh, const ScalarField& sigma_l, const IndexMap& map) {
  Triplets trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] != Subdomain::Omega1) continue;
    const auto p = mesh.corners(t);
    const double sigma = sigma_l ? sigma_l(mesh.barycenter(t)) : 1.0;
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      std::ostringstream os;
      os << "local diffusivity " << sigma << " is not positive on triangle " << t;
      throw std::invalid_argument(os.str());
    }
    const double det = cross(p[1] - p[0], p[2] - p[0]);
    // Gradient of the barycentric coordinate i is rot(edge opposite i) / det.
    Point g[3];
    for (int i = 0; i < 3; ++i) {
      const Point e = p[(i + 2) % 3] - p[(i + 1) % 3];
      g[i] = (1.0 / det) * Point{-e.y, e.x};
    }
    const double scale = sigma * 0.5 * std::abs(det);
    double ke[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ke[i][j] = scale * dot(g[i], g[j]);
    scatter(trip, map, mesh.triangles[t], ke);
  }
  return from_triplets(map.size(), trip);
}

SparseMatrix assemble_local(const Mesh& mesh, const ScalarField& sigma_l) {
  return assemble_local(mesh, sigma_l, domain_nodes(mesh));
}

SparseMatrix assemble_mass(const Mesh& mesh, const IndexMap& map) {
  Triplets trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    const double a = mesh.area(t);
    double ke[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ke[i][j] = a / 12.0 * (i == j ? 2.0 : 1.0);
    scatter(trip, map, mesh.triangles[t], ke);
  }
  return from_triplets(map.size(), trip);
}

SparseMatrix assemble_mass(const Mesh& mesh) { return assemble_mass(mesh, domain_nodes(mesh)); }

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f, const IndexMap& map) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(map.size());
  const TriangleRule& rule = triangle_rule(6);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    const auto p = mesh.corners(t);
    const double a = mesh.area(t);
    double be[3] = {0, 0, 0};
    for (int q = 0; q < rule.size(); ++q) {
      const auto& l = rule.bary[q];
      const double fv = f ? f(l[0] * p[0] + l[1] * p[1] + l[2] * p[2]) : 1.0;
      for (int i = 0; i < 3; ++i) be[i] += rule.w[q] * fv * l[i];
    }
    for (int i = 0; i < 3; ++i) {
      const int r = map.node_to_row[mesh.triangles[t][i]];
      if (r >= 0) b[r] += a * be[i];
    }
  }
  return b;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f) {
  return assemble_load(mesh, f, domain_nodes(mesh));
}

}  // namespace nlfem
