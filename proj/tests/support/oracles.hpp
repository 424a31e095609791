#pragma once

// Test-only reference computations. None of these call into the quadrature,
// tail or eigen code of the library; they share only the Point type.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nlfem/geometry.hpp"

namespace oracle {

using nlfem::Point;
using Tri = std::array<Point, 3>;

/// C(n,s) from the Fourier-side identity
///   1 / C(n,s) = int_{R^n} (1 - cos xi_1) |xi|^{-n-2s} dxi,
/// evaluated in polar coordinates with the 1-d integral in closed form.
double cns_fourier(int n, double s);

/// 6x6 pair block of the kernel |x-y|^{-2-2s} (constant weight), with the
/// same node ordering and C(2,s)/2 normalization as the library's pair
/// blocks: for each x in T, rays from x are cut against U and the radial
/// integral of the affine differences is done in closed form; the angle is
/// integrated by Gauss-Legendre between vertex directions and x by a
/// subdivision of T graded toward the vertices shared with U.
std::array<double, 36> polar_pair(const Tri& t, const std::array<int, 3>& tid, const Tri& u,
                                  const std::array<int, 3>& uid, double s, int depth = 7);

/// polar_pair at depths depth-2, depth-1, depth with two Richardson steps.
/// The x-integrand is like dist^(2-2s) at the singular set, so the
/// subdivision error goes as 2^-(3-2s) per level for identical and
/// edge-sharing pairs, plus one for a shared vertex, with the next term one
/// order higher.
std::array<double, 36> polar_pair_extrapolated(const Tri& t, const std::array<int, 3>& tid, const Tri& u,
                                               const std::array<int, 3>& uid, double s, int depth = 3);

/// Vertex-disjoint pair by uniform subdivision of both triangles (degree-12
/// tensor products), refined until two levels agree.
std::array<double, 36> subdivided_pair(const Tri& t, const Tri& u, double s, int max_level = 3);

/// int over the exterior of a polygon star-shaped around x of
/// |x-y|^{-2-2s} dy = (1/2s) int rho(theta)^{-2s} dtheta, by ray casting.
double exterior_raycast(Point x, const std::vector<Point>& polygon, double s);

/// j_{m,k} from Boost.
double bessel_zero(int m, int k);

/// All eigenvalues of A v = lambda M v, ascending.
Eigen::VectorXd generalized_eigenvalues(const Eigen::MatrixXd& a, const Eigen::MatrixXd& m);

}  // namespace oracle
