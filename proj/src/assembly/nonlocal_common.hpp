#pragma once

#include <cmath>
#include <vector>

#include "nlfem/assembly.hpp"

namespace nlfem::detail {

/// Adds w * block to the upper triangle of a (rows/cols through map).
inline void scatter_upper(Eigen::MatrixXd& a, const IndexMap& map, const PairBlock& blk, double w) {
  for (int i = 0; i < blk.n; ++i) {
    const int r = map.node_to_row[blk.nodes[i]];
    if (r < 0) continue;
    for (int j = 0; j < blk.n; ++j) {
      const int c = map.node_to_row[blk.nodes[j]];
      if (c >= r) a(r, c) += w * blk(i, j);
    }
  }
}

inline void mirror_upper(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = c + 1; r < n; ++r) a(r, c) = a(c, r);
}

/// Triangles whose pairs with OMEGA2 triangles enter the form, by role.
struct PairLists {
  std::vector<int> omega2;
  std::vector<int> others;  // OMEGA1 and auxiliary triangles (full form only)
};

inline PairLists pair_lists(const Mesh& mesh, bool full) {
  PairLists out;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.tags[t] == Subdomain::Omega2)
      out.omega2.push_back(t);
    else if (full)
      out.others.push_back(t);
  }
  return out;
}

void check_inputs(const Mesh& mesh, double s, const IndexMap& map);

/// C(2,s) sigma_tail int_{Omega2} phi_i phi_j w_far, added to the upper triangle.
void add_far_field_mass(Eigen::MatrixXd& a, const Mesh& mesh, double s, const TailConfig& tail, const IndexMap& map,
                        int workers);

}  // namespace nlfem::detail
