// Serial assembly, one pair_interaction call per triangle pair. Kept as the
// reference the parallel kernels are tested against.

#include "nonlocal_common.hpp"

namespace nlfem {

namespace {

Eigen::MatrixXd reference(const Mesh& mesh, double s, const KernelWeight& sigma, const QuadratureConfig& quad,
                          const IndexMap& map, bool full) {
  detail::check_inputs(mesh, s, map);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(map.size(), map.size());
  std::vector<char> omega2(mesh.num_triangles(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) omega2[t] = mesh.tags[t] == Subdomain::Omega2;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (!omega2[t]) continue;
    const TriangleRef rt = triangle_ref(mesh, t);
    for (int u = 0; u < mesh.num_triangles(); ++u) {
      double w;
      if (omega2[u]) {
        if (u < t) continue;
        w = u == t ? 1.0 : 2.0;
      } else {
        if (!full) continue;
        w = 2.0;
      }
      classify_pair(mesh, t, u);
      detail::scatter_upper(a, map, pair_interaction(rt, triangle_ref(mesh, u), s, sigma, quad), w);
    }
  }
  return a;
}

}  // namespace

Eigen::MatrixXd assemble_nonlocal_censored_reference(const Mesh& mesh, double s, const KernelWeight& sigma,
                                                     const QuadratureConfig& quad, const IndexMap& map) {
  Eigen::MatrixXd a = reference(mesh, s, sigma, quad, map, false);
  detail::mirror_upper(a);
  return a;
}

Eigen::MatrixXd assemble_nonlocal_full_reference(const Mesh& mesh, double s, const KernelWeight& sigma,
                                                 const TailConfig& tail, const QuadratureConfig& quad,
                                                 const IndexMap& map) {
  validate_tail(tail, mesh);
  Eigen::MatrixXd a = reference(mesh, s, sigma, quad, map, true);
  detail::add_far_field_mass(a, mesh, s, tail, map, 1);
  detail::mirror_upper(a);
  return a;
}

}  // namespace nlfem
