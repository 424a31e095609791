#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "nlfem/constants.hpp"
#include "nlfem/postprocess.hpp"
#include "oracles.hpp"

using namespace nlfem;

namespace {

Solution nodal(const Mesh& m, const ScalarField& f) {
  Solution s;
  s.mesh = &m;
  s.values.resize(m.num_nodes());
  for (int v = 0; v < m.num_nodes(); ++v) s.values[v] = f(m.nodes[v]);
  return s;
}

}  // namespace

TEST(Bessel, ZerosAgainstBoost) {
  for (int m = 0; m <= 10; ++m)
    for (int k = 1; k <= 10; ++k)
      EXPECT_NEAR(bessel_zero(m, k), oracle::bessel_zero(m, k), 1e-12 * oracle::bessel_zero(m, k)) << m << "," << k;
  EXPECT_NEAR(bessel_eigenvalue(0, 1), std::pow(oracle::bessel_zero(0, 1), 2) / 4.0, 1e-12);
  EXPECT_THROW(bessel_zero(11, 1), std::invalid_argument);
  EXPECT_THROW(bessel_zero(0, 0), std::invalid_argument);
}

TEST(Bessel, FunctionAgainstBoost) {
  for (int m : {0, 1, 4, 10})
    for (double x : {0.0, 0.3, 2.5, 9.0, 31.0})
      EXPECT_NEAR(bessel_j(m, x), boost::math::cyl_bessel_j(m, x), 1e-13) << m << " " << x;
}

TEST(Fit, RecoversAnExactPowerLaw) {
  std::vector<SliceSample> s;
  for (int i = 1; i <= 10; ++i) s.push_back({1e-3 * i, 2.0 * std::pow(1e-3 * i, 0.7)});
  s.push_back({0.0, 0.0});
  s.push_back({0.02, -1.0});
  const PowerFit f = fit_power(s);
  EXPECT_NEAR(f.gamma, 0.7, 1e-12);
  EXPECT_NEAR(f.C, 2.0, 1e-11);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_EQ(f.samples.size(), 10u);
}

TEST(Evaluate, AffineFunctionsAreReproduced) {
  const Mesh m = build_mesh(GeometrySpec::l_shape_split(0.5), 0.15);
  const auto affine = [](Point p) { return 0.25 - 2.0 * p.x + 3.0 * p.y; };
  const Solution sol = nodal(m, affine);
  for (Point p : {Point{0.1, 0.3}, Point{0.4, -0.45}, Point{-0.3, 0.05}, Point{0.0, 0.0}})
    EXPECT_NEAR(evaluate(sol, p), affine(p), 1e-14);
  EXPECT_EQ(evaluate(sol, Point{-0.3, -0.3}), 0.0);
  EXPECT_EQ(evaluate(sol, Point{3.0, 0.0}), 0.0);

  const auto samples = slice(sol, {0.0, 0.0}, {0.0, 0.4}, 4);
  ASSERT_EQ(samples.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(samples[i].t, 0.1 * (i + 1), 1e-15);
    EXPECT_NEAR(samples[i].value, affine({0.0, 0.1 * (i + 1)}), 1e-14);
  }
  const auto with_start = slice(sol, {0.0, 0.0}, {0.0, 0.4}, 5, true);
  ASSERT_EQ(with_start.size(), 5u);
  EXPECT_EQ(with_start[0].t, 0.0);
  EXPECT_NEAR(with_start[4].t, 0.4, 1e-15);
}

TEST(Evaluate, NormalDerivativeUsesTheInterfaceNormal) {
  const GeometrySpec g = GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5}, 0.0);
  const Mesh m = build_mesh(g, 0.1);
  const Point n = g.interface_normal({0.0, 0.1});
  const Solution sol = nodal(m, [](Point p) { return 3.0 * p.x - p.y; });
  EXPECT_NEAR(normal_derivative_at(sol, m, {0.0, 0.1}), 3.0 * n.x - n.y, 1e-12);
  EXPECT_NEAR(normal_derivative_at(sol, m, {0.0, 0.1}, Subdomain::Omega2), 3.0 * n.x - n.y, 1e-12);
  EXPECT_THROW(normal_derivative_at(sol, m, {0.2, 0.1}), EvaluationError);
}

TEST(Errors, L2AndH1OfKnownDifferences) {
  const GeometrySpec g = GeometrySpec::square_split({0.0, 1.0, 0.0, 1.0}, 0.5);
  const Mesh m = build_mesh(g, 0.2);
  const Solution sol = nodal(m, [](Point p) { return p.x + p.y; });
  EXPECT_LT(l2_error(sol, [](Point p) { return p.x + p.y; }), 1e-14);
  EXPECT_NEAR(l2_error(sol, [](Point p) { return p.x + p.y + 2.0; }), 2.0, 1e-13);
  // int (x^2 - x)^2 over the unit square is 1/30.
  const Mesh fine = build_mesh(g, 0.02);
  const Solution quad = nodal(fine, [](Point p) { return p.x * p.x; });
  EXPECT_NEAR(l2_error(quad, [](Point p) { return p.x; }), std::sqrt(1.0 / 30.0), 1e-3);
  // Omega1 = {x < 0.5}: |grad (x+y) - (1,0)|^2 over it is 0.5.
  EXPECT_NEAR(h1_seminorm_error_omega1(sol, [](Point) { return Point{1.0, 0.0}; }), std::sqrt(0.5), 1e-13);
}

TEST(Errors, NonlocalSeminormIsTheNonlocalEnergy) {
  const GeometrySpec g = GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5});
  const Mesh m = build_mesh(g, 0.25);
  ProblemSpec ps;
  ps.geometry = g;
  ps.s = 0.5;
  const LinearSystem sys = build_system(ps, m);
  const Solution sol = solve(sys, m);
  Eigen::VectorXd u(sys.size());
  for (int i = 0; i < sys.size(); ++i) u[i] = sol.values[sys.dofs.row_to_node[i]];
  const Eigen::MatrixXd nl = sys.A - Eigen::MatrixXd(sys.local);
  EXPECT_NEAR(vs_seminorm(sol, sys), std::sqrt(u.dot(nl * u)), 1e-13);
}

TEST(ScottZhang, ReproducesAffineFunctions) {
  const Mesh m = build_mesh(GeometrySpec::annular_split_disk({0, 0}, 1.0, 2.0), 0.3);
  const auto v = [](Point p) { return 1.0 + 0.5 * p.x - 2.0 * p.y; };
  const ScottZhang sz = scott_zhang(m, v);
  ASSERT_EQ(static_cast<int>(sz.edge.size()), m.num_domain_nodes);
  for (int i = 0; i < m.num_domain_nodes; ++i) {
    EXPECT_NEAR(sz.interpolant.values[i], v(m.nodes[i]), 1e-12) << i;
    EXPECT_EQ(sz.edge[i][0], i);
  }
  for (int b : m.boundary_nodes) {
    const Point q = m.nodes[sz.edge[b][1]];
    EXPECT_LT(m.geometry.distance_to_boundary(q), 1e-12);
  }
}

TEST(Flux, MatchesDirectIntegrationOverASeparatedRectangle) {
  const Box left{-0.75, -0.25, -0.5, 0.5}, right{0.25, 0.75, -0.5, 0.5};
  const Mesh m = build_mesh(GeometrySpec::two_rects(left, right), 0.1);
  // u = 1 on OMEGA2 nodes, 0 on OMEGA1 nodes; the subdomains share none.
  const Solution sol = nodal(m, [&](Point p) { return p.x > 0.0 ? 1.0 : 0.0; });
  const Point x{-0.5, 0.1};
  for (double s : {0.3, 0.8}) {
    using boost::math::quadrature::gauss_kronrod;
    const double inner = gauss_kronrod<double, 31>::integrate(
        [&](double y1) {
          return gauss_kronrod<double, 31>::integrate(
              [&](double y2) { return std::pow((x.x - y1) * (x.x - y1) + (x.y - y2) * (x.y - y2), -1.0 - s); },
              right.y0, right.y1, 10, 1e-14);
        },
        right.x0, right.x1, 10, 1e-14);
    EXPECT_NEAR(nonlocal_flux(sol, x, s), -cns(2, s) * inner, 1e-8 * cns(2, s) * inner) << s;
  }
  EXPECT_THROW(nonlocal_flux(sol, {0.5, 0.0}, 0.5), EvaluationError);
}
