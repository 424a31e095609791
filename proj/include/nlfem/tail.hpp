#pragma once

#include <vector>

#include "nlfem/mesh.hpp"
#include "nlfem/pair_quadrature.hpp"

namespace nlfem {

struct TailConfig {
  /// Radius of the far circle; 0 takes the mesh's own far radius, or
  /// 2 * max |node| when the mesh has no auxiliary layer.
  double far_radius = 0.0;
  /// Constant weight beyond the auxiliary layer.
  double sigma_tail = 1.0;
  /// Angular quadrature nodes over a full turn for the far field.
  int angular_order = 64;
  /// Triangle-rule degree on auxiliary (sub)triangles well separated from x.
  int aux_degree = 6;
  /// Auxiliary triangles closer than this many diameters to x are split.
  double aux_split_distance = 2.0;
  int aux_max_depth = 40;
};

/// Closed polygon bounding the whole mesh, as oriented edges (counter-
/// clockwise around the meshed region).
struct OuterBoundary {
  std::vector<Point> a, b;
};

/// Edges with a single adjacent triangle; for a mesh with an auxiliary layer
/// this is the inscribed polygon of the far circle, otherwise the boundary of
/// Omega.
OuterBoundary outer_boundary(const Mesh& mesh);

/// Integral of |x-y|^{-2-2s} over the exterior of the polygon, through the
/// signed edge-angle formula (valid for any polygon with x off its edges).
double far_field_polygon(Point x, const OuterBoundary& outer, double s, int angular_order);

/// Integral of |x-y|^{-2-2s} over |y| > R, trapezoidal in the angle of the
/// analytic radial integral rho^{-2s} / (2s).
double far_field_circle(Point x, double R, double s, int angular_order);

/// Integral over the auxiliary triangles of sigma(x,y) |x-y|^{-2-2s}.
double aux_weight(Point x, const Mesh& mesh, double s, const KernelWeight& sigma, const TailConfig& cfg);

/// Integral over the complement of Omega of sigma(x,y) |x-y|^{-2-2s}:
/// auxiliary layer plus sigma_tail times the far field. The kernel constant
/// C(2,s) is not included. x must lie inside Omega, off its boundary.
double tail_weight(Point x, const Mesh& mesh, const TailConfig& cfg, double s,
                   const KernelWeight& sigma = KernelWeight::constant(1.0));

/// Checks the configuration against the mesh and returns the effective far radius.
double validate_tail(const TailConfig& cfg, const Mesh& mesh);

}  // namespace nlfem
