#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "nlfem/assembly.hpp"
#include "nlfem/solver.hpp"

namespace nlfem {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bucket grid over the Omega triangles for point location.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  struct Hit {
    int triangle = -1;  // -1: outside Omega
    std::array<double, 3> bary{};
  };
  Hit locate(Point p) const;

 private:
  const Mesh* mesh_;
  double x0_ = 0, y0_ = 0, cell_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// P1 values at the points; zero outside Omega.
std::vector<double> evaluate(const Solution& sol, const std::vector<Point>& points);
double evaluate(const Solution& sol, Point p);

/// Area-weighted average over the triangles of `side` whose closure holds p
/// of grad u_h, dotted with the declared interface normal at p.
double normal_derivative_at(const Solution& sol, const Mesh& mesh, Point p, Subdomain side = Subdomain::Omega1);

struct SliceSample {
  double t = 0.0;
  double value = 0.0;
};

/// m equally spaced samples on the segment [a, b], t measured from a.
/// Default: t_i = i |b - a| / m, i = 1..m (the start point is excluded);
/// with include_start, t_i = i |b - a| / (m - 1), i = 0..m-1.
std::vector<SliceSample> slice(const Solution& sol, Point a, Point b, int m, bool include_start = false);

struct PowerFit {
  double C = 0.0;
  double gamma = 0.0;
  double residual = 0.0;  // RMS misfit in log space
  std::vector<SliceSample> samples;  // the samples actually used
};

/// Least squares of log u against log t over samples with t > 0, u > 0.
PowerFit fit_power(const std::vector<SliceSample>& samples);

/// ||u_h - ref||_{L2(Omega)} with a degree-8 element rule.
double l2_error(const Solution& sol, const ScalarField& ref);
/// |u_h - ref|_{H1(Omega1)} given grad ref.
double h1_seminorm_error_omega1(const Solution& sol, const std::function<Point(Point)>& ref_grad);
/// sqrt(u^T (A - A_local) u) on the DOFs of the system.
double vs_seminorm(const Solution& sol, const LinearSystem& system);

struct ScottZhang {
  /// Chosen edge K_i per node (boundary edge for boundary nodes), first
  /// entry is the node itself.
  std::vector<Edge> edge;
  /// psi_i = c[0] lambda_i + c[1] lambda_j on K_i, i.e. (4, -2) / |K_i|.
  std::vector<std::array<double, 2>> dual;
  Solution interpolant;
};

/// Scott-Zhang quasi-interpolant of v over the nodes of Omega (5-point
/// Gauss on each chosen edge).
ScottZhang scott_zhang(const Mesh& mesh, const ScalarField& v);

/// Zero j_{m,k} of the Bessel function J_m, m in [0, 10], k in [1, 10].
double bessel_zero(int m, int k);
/// Dirichlet eigenvalue j_{m,k}^2 / 4 of the Laplacian on B(0, 2).
double bessel_eigenvalue(int m, int k);
/// J_m(x) by the trapezoidal rule on its integral representation.
double bessel_j(int m, double x);

/// C(2,s) int_{Omega2} sigma(x,y) (u(x) - u(y)) |x-y|^{-2-2s} dy for x in
/// Omega1 at least one local element size away from Omega2.
double nonlocal_flux(const Solution& sol, Point x, double s, const KernelWeight& sigma = KernelWeight::constant(1.0));

}  // namespace nlfem
