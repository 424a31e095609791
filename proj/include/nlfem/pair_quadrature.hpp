#pragma once

#include <array>
#include <functional>
#include <stdexcept>

#include "nlfem/geometry.hpp"
#include "nlfem/mesh.hpp"

namespace nlfem {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric, bounded, positive weight sigma(x, y) multiplying the kernel.
/// A default-constructed weight is the constant `value`.
struct KernelWeight {
  double value = 1.0;
  std::function<double(Point, Point)> fn;

  static KernelWeight constant(double c) { return KernelWeight{c, {}}; }
  bool is_constant() const { return !fn; }
  double operator()(Point x, Point y) const { return fn ? fn(x, y) : value; }
  /// Same weight multiplied by c.
  KernelWeight scaled(double c) const;
};

enum class PairClass { Identical, SharedEdge, SharedVertex, Disjoint };

const char* to_string(PairClass c);

/// Class from the number of shared vertex indices (3, 2, 1, 0).
PairClass classify_pair(const Triangle& t, const Triangle& u);
/// Same, plus a geometric check that vertex-disjoint triangles do not overlap.
PairClass classify_pair(const Mesh& mesh, int t, int u);

struct QuadratureConfig {
  /// Gauss points per dimension for touching pairs.
  int touching_order = 7;
  /// Triangle-rule degree for disjoint pairs closer than near_distance diameters.
  int near_degree = 3;
  /// Triangle-rule degree for the remaining disjoint pairs.
  int far_degree = 2;
  double near_distance = 1.0;
  /// Disjoint pairs closer than this many diameters are split recursively.
  double split_distance = 0.5;
  int max_split_depth = 16;
};

/// Vertex indices and coordinates of one triangle.
struct TriangleRef {
  std::array<int, 3> ids{};
  std::array<Point, 3> pts{};
};

TriangleRef triangle_ref(const Mesh& mesh, int t);

/// Local matrix over the union of the vertices of T and U (T's vertices
/// first, in order, then U's remaining ones).
struct PairBlock {
  int n = 0;
  std::array<int, 6> nodes{};
  std::array<double, 36> a{};
  double& operator()(int i, int j) { return a[6 * i + j]; }
  double operator()(int i, int j) const { return a[6 * i + j]; }
};

/// C(2,s)/2 times the integral over T x U of
/// sigma(x,y) (phi_i(x)-phi_i(y)) (phi_j(x)-phi_j(y)) |x-y|^{-2-2s}.
PairBlock pair_interaction(const TriangleRef& t, const TriangleRef& u, double s, const KernelWeight& sigma,
                           const QuadratureConfig& cfg = {});
PairBlock pair_interaction(const Mesh& mesh, int t, int u, double s, const KernelWeight& sigma,
                           const QuadratureConfig& cfg = {});

/// Minimum distance between two vertex-disjoint, non-overlapping triangles.
double triangle_distance(const std::array<Point, 3>& a, const std::array<Point, 3>& b);

/// Triangle-rule degree (or 0 when the pair must be split) that
/// pair_interaction uses for a vertex-disjoint pair.
int disjoint_degree(const std::array<Point, 3>& a, const std::array<Point, 3>& b, const QuadratureConfig& cfg);

/// Radial factor B(m - 2s, q + 1) = integral of r^{m-1-2s} (1-r)^q over [0, 1].
double radial_beta(int m, int q, double s);

}  // namespace nlfem
