#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "nlfem/mesh.hpp"

using namespace nlfem;

namespace {

double tagged_area(const Mesh& m, Subdomain tag) {
  double a = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t)
    if (m.tags[t] == tag) a += m.area(t);
  return a;
}

struct Named {
  const char* name;
  GeometrySpec g;
};

std::vector<Named> geometries() {
  return {
      {"rect", GeometrySpec::rect({0.0, 1.0, 0.0, 2.0})},
      {"disk", GeometrySpec::disk({0.3, -0.2}, 1.0)},
      {"annular", GeometrySpec::annular_split_disk({0.0, 0.0}, 1.0, 2.0)},
      {"lshape", GeometrySpec::l_shape_split(0.5)},
      {"two_rects", GeometrySpec::two_rects({-0.75, -0.25, -0.5, 0.5}, {0.25, 0.75, -0.5, 0.5})},
      {"square_split", GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5}, 0.1)},
  };
}

}  // namespace

TEST(Geometry, ClassifyAndAreas) {
  const GeometrySpec l = GeometrySpec::l_shape_split(0.5);
  EXPECT_EQ(l.classify({0.2, 0.2}), Subdomain::Omega1);
  EXPECT_EQ(l.classify({0.2, -0.2}), Subdomain::Omega2);
  EXPECT_EQ(l.classify({-0.2, -0.2}), Subdomain::Exterior);
  EXPECT_NEAR(l.area(), 0.75, 1e-15);
  const GeometrySpec a = GeometrySpec::annular_split_disk({0, 0}, 1.0, 2.0);
  EXPECT_EQ(a.classify({0.5, 0.0}), Subdomain::Omega2);
  EXPECT_EQ(a.classify({1.5, 0.0}), Subdomain::Omega1);
  EXPECT_NEAR(a.interface_normal({0.0, 1.0}).y, 1.0, 1e-15);
  EXPECT_THROW(GeometrySpec::annular_split_disk({0, 0}, 2.0, 1.0).validate(), GeometryError);
}

TEST(Mesh, InvariantsForEveryGeometry) {
  for (const auto& [name, g] : geometries()) {
    const Mesh m = build_mesh(g, 0.15);
    const ConformityReport rep = check_mesh(m);
    EXPECT_TRUE(rep.ok) << name << ": " << rep.message;
    // Polygonal pieces are meshed exactly; arcs by inscribed chords.
    const double area = tagged_area(m, Subdomain::Omega1) + tagged_area(m, Subdomain::Omega2);
    const bool curved = g.kind == GeometryKind::Disk || g.kind == GeometryKind::AnnularSplitDisk;
    EXPECT_NEAR(area, g.area(), curved ? 0.02 * g.area() : 1e-12) << name;
    EXPECT_LE(area, g.area() + 1e-12) << name;
    for (int v : m.boundary_nodes) EXPECT_LT(g.distance_to_boundary(m.nodes[v]), 1e-12) << name;
    for (const Edge& e : m.interface_edges) {
      const Point mid = 0.5 * (m.nodes[e[0]] + m.nodes[e[1]]);
      EXPECT_LT(g.distance_to_interface(m.nodes[e[0]]), 1e-12) << name;
      EXPECT_LT(g.distance_to_interface(mid), curved ? 0.01 : 1e-12) << name;
    }
    for (int t = 0; t < m.num_triangles(); ++t) {
      if (m.tags[t] == Subdomain::Exterior) continue;
      EXPECT_EQ(g.classify(m.barycenter(t)), m.tags[t]) << name;
    }
    EXPECT_LT(shape_regularity(m), 6.0) << name;
    EXPECT_LE(m.h_max, 1.3 * 0.15 * 1.0001) << name;
  }
}

TEST(Mesh, DomainNodesComeFirst) {
  const Mesh m = build_mesh(GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5}), 0.2);
  ASSERT_TRUE(m.has_auxiliary());
  std::vector<char> used(m.num_nodes(), 0);
  for (int t = 0; t < m.num_triangles(); ++t)
    if (m.tags[t] != Subdomain::Exterior)
      for (int v : m.triangles[t]) used[v] = 1;
  for (int v = 0; v < m.num_nodes(); ++v) EXPECT_EQ(used[v] != 0, v < m.num_domain_nodes) << v;
}

TEST(Mesh, AuxiliaryLayerReachesTheFarCircle) {
  const GeometrySpec g = GeometrySpec::rect({-0.5, 0.5, -0.5, 0.5});
  const Mesh m = build_mesh(g, 0.2);
  const double R = 2.0 * g.bounding_radius();
  EXPECT_NEAR(m.far_radius, R, 1e-12);
  double rmax = 0.0;
  for (const Point& p : m.nodes) rmax = std::max(rmax, norm(p));
  EXPECT_NEAR(rmax, R, 1e-12);
  double total = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) total += m.area(t);
  EXPECT_NEAR(total, std::numbers::pi * R * R, 0.02 * std::numbers::pi * R * R);
  const Mesh bare = build_mesh(g, 0.2, MeshOptions{.auxiliary = false});
  EXPECT_FALSE(bare.has_auxiliary());
  EXPECT_EQ(bare.far_radius, 0.0);
}

TEST(Mesh, DeterministicAndDomainOnly) {
  const GeometrySpec g = GeometrySpec::annular_split_disk({0, 0}, 1.0, 2.0);
  const Mesh a = build_mesh(g, 0.25), b = build_mesh(g, 0.25);
  ASSERT_EQ(a.num_nodes(), b.num_nodes());
  ASSERT_EQ(a.triangles, b.triangles);
  for (int v = 0; v < a.num_nodes(); ++v) EXPECT_TRUE(a.nodes[v] == b.nodes[v]);
  const Mesh d = a.domain_only();
  EXPECT_EQ(d.count(Subdomain::Exterior), 0);
  EXPECT_EQ(d.count(Subdomain::Omega1), a.count(Subdomain::Omega1));
  EXPECT_EQ(d.num_nodes(), a.num_domain_nodes);
  EXPECT_TRUE(check_mesh(d).ok);
}

TEST(Mesh, GradedSizeFormula) {
  EXPECT_DOUBLE_EQ(graded_size(0.1, 1.0, 0.3), 0.1);
  EXPECT_NEAR(graded_size(0.1, 2.0, 0.25), 0.1 * 0.5, 1e-15);
  // Floor at h^mu.
  EXPECT_NEAR(graded_size(0.1, 2.0, 0.0), 0.1 * std::pow(0.01, 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(graded_size(0.1, 3.0, 2.0), 0.1);
}

TEST(Mesh, GradingTowardAPointReachesHToTheMu) {
  const GeometrySpec g = GeometrySpec::l_shape_split(0.5);
  const double h = 0.1, mu = 3.0;
  const Mesh m = grade_mesh(g, h, GradingSpec{mu, GradingTarget::Point, {0.0, 0.0}});
  EXPECT_TRUE(check_mesh(m).ok);
  double smallest = 1.0, far_smallest = 1.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.tags[t] == Subdomain::Exterior) continue;
    smallest = std::min(smallest, m.diameter(t));
    if (norm(m.barycenter(t)) > 0.2) far_smallest = std::min(far_smallest, m.diameter(t));
  }
  EXPECT_LT(smallest, 3.0 * std::pow(h, mu));
  EXPECT_GT(smallest, 0.1 * std::pow(h, mu));
  EXPECT_GT(far_smallest, 0.2 * h);
  const Mesh uniform = build_mesh(g, h);
  EXPECT_GT(m.num_triangles(), uniform.num_triangles());
}

TEST(Mesh, GradingTowardTheInterface) {
  const GeometrySpec g = GeometrySpec::annular_split_disk({0, 0}, 1.0, 2.0);
  const Mesh m = grade_mesh(g, 0.3, GradingSpec{2.5, GradingTarget::Interface, {}});
  EXPECT_TRUE(check_mesh(m).ok);
  // Within 0.05 of the circle the target size is at most 0.3 * 0.05^0.6 ~ 0.05.
  double near = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t)
    if (m.tags[t] != Subdomain::Exterior && std::abs(norm(m.barycenter(t)) - 1.0) < 0.05)
      near = std::max(near, m.diameter(t));
  EXPECT_GT(near, 0.0);
  EXPECT_LT(near, 0.1);
}

TEST(MeshIO, TextRoundTrip) {
  const GeometrySpec g = GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5});
  const Mesh m = build_mesh(g, 0.3);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss, g);
  ASSERT_EQ(r.num_nodes(), m.num_nodes());
  EXPECT_EQ(r.triangles, m.triangles);
  EXPECT_EQ(r.tags, m.tags);
  EXPECT_EQ(r.boundary_nodes, m.boundary_nodes);
  EXPECT_EQ(r.interface_edges, m.interface_edges);
  for (int v = 0; v < m.num_nodes(); ++v) EXPECT_TRUE(r.nodes[v] == m.nodes[v]);
}

TEST(MeshIO, RejectsMalformedInput) {
  std::stringstream ss("NODES 3 TRIANGLES 1\n0 0\n1 0\n0 1\n0 1 7 1\n");
  EXPECT_THROW(read_mesh(ss, GeometrySpec::rect({0, 1, 0, 1})), MeshError);
}

TEST(Mesh, CheckDetectsBrokenTopology) {
  Mesh m = build_mesh(GeometrySpec::rect({0.0, 1.0, 0.0, 1.0}), 0.3, MeshOptions{.auxiliary = false});
  std::swap(m.triangles[0][0], m.triangles[0][1]);  // flips orientation
  EXPECT_FALSE(check_mesh(m).ok);
}
