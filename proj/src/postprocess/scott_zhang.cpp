#include <algorithm>
#include <map>

#include "nlfem/postprocess.hpp"
#include "nlfem/quadrature.hpp"

namespace nlfem {

ScottZhang scott_zhang(const Mesh& mesh, const ScalarField& v) {
  // Edges of Omega triangles with their multiplicity (1 = boundary edge).
  std::map<Edge, int> edges;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Exterior) continue;
    const Triangle& tr = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) ++edges[make_edge(tr[k], tr[(k + 1) % 3])];
  }
  const int n = mesh.num_domain_nodes;
  std::vector<int> other(n, -1);
  std::vector<char> boundary_choice(n, 0);
  for (const auto& [e, count] : edges) {
    const bool on_boundary = count == 1;
    for (int side = 0; side < 2; ++side) {
      const int i = e[side], j = e[1 - side];
      // Boundary nodes take a boundary edge; otherwise the first edge in order.
      if (other[i] < 0 || (on_boundary && !boundary_choice[i])) {
        other[i] = j;
        boundary_choice[i] = on_boundary;
      }
    }
  }
  const LineRule& gl = gauss_legendre(5);
  ScottZhang sz;
  sz.edge.resize(n);
  sz.dual.resize(n);
  sz.interpolant.mesh = &mesh;
  sz.interpolant.values = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int i = 0; i < n; ++i) {
    const int j = other[i];
    if (j < 0) continue;
    const Point a = mesh.nodes[i], b = mesh.nodes[j];
    const double len = distance(a, b);
    sz.edge[i] = {i, j};
    sz.dual[i] = {4.0 / len, -2.0 / len};
    double value = 0.0;
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
      const double lj = gl.x[q], li = 1.0 - lj;
      value += gl.w[q] * v(li * a + lj * b) * (4.0 * li - 2.0 * lj);
    }
    sz.interpolant.values[i] = value;
  }
  return sz;
}

}  // namespace nlfem
