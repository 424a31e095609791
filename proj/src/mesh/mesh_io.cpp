#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlfem/mesh.hpp"

namespace nlfem {

// Text format:
//   NODES k TRIANGLES m
//   x y                 (k rows)
//   i j k tag           (m rows, 0-based, tag 0 = auxiliary, 1 = OMEGA1, 2 = OMEGA2)

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "NODES " << mesh.num_nodes() << " TRIANGLES " << mesh.num_triangles() << "\n";
  os << std::setprecision(17);
  for (const Point& p : mesh.nodes) os << p.x << " " << p.y << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    os << tr[0] << " " << tr[1] << " " << tr[2] << " " << static_cast<int>(mesh.tags[t]) << "\n";
  }
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw MeshError("cannot open '" + path + "' for writing");
  write_mesh(os, mesh);
  if (!os) throw MeshError("failed writing mesh to '" + path + "'");
}

Mesh read_mesh(std::istream& is, const GeometrySpec& geometry) {
  std::string w1, w2;
  long k = -1, m = -1;
  if (!(is >> w1 >> k >> w2 >> m) || w1 != "NODES" || w2 != "TRIANGLES" || k < 0 || m < 0)
    throw MeshError("mesh header must read 'NODES k TRIANGLES m'");
  Mesh mesh;
  mesh.geometry = geometry;
  mesh.nodes.resize(k);
  for (long i = 0; i < k; ++i)
    if (!(is >> mesh.nodes[i].x >> mesh.nodes[i].y)) throw MeshError("truncated node list at row " + std::to_string(i));
  mesh.triangles.resize(m);
  mesh.tags.resize(m);
  for (long i = 0; i < m; ++i) {
    int tag = -1;
    auto& tr = mesh.triangles[i];
    if (!(is >> tr[0] >> tr[1] >> tr[2] >> tag)) throw MeshError("truncated triangle list at row " + std::to_string(i));
    if (tag < 0 || tag > 2) throw MeshError("invalid subdomain tag " + std::to_string(tag) + " at triangle " + std::to_string(i));
    mesh.tags[i] = static_cast<Subdomain>(tag);
  }
  mesh.finalize_topology();
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (mesh.tags[t] == Subdomain::Exterior) {
      for (int v : mesh.triangles[t]) mesh.far_radius = std::max(mesh.far_radius, norm(mesh.nodes[v]));
    }
  return mesh;
}

Mesh read_mesh(const std::string& path, const GeometrySpec& geometry) {
  std::ifstream is(path);
  if (!is) throw MeshError("cannot open mesh file '" + path + "'");
  return read_mesh(is, geometry);
}

}  // namespace nlfem
