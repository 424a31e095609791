#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nlfem/constants.hpp"
#include "nlfem/pair_quadrature.hpp"
#include "nlfem/quadrature.hpp"
#include "nlfem/tail.hpp"
#include "oracles.hpp"

using namespace nlfem;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// int over the reference triangle of x^a y^b.
double monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double rel_block_diff(const PairBlock& blk, const std::array<double, 36>& ref) {
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i < 36; ++i) {
    diff = std::max(diff, std::abs(blk.a[i] - ref[i]));
    scale = std::max(scale, std::abs(ref[i]));
  }
  return diff / scale;
}

const std::array<Point, 3> kT{{{0.0, 0.0}, {1.0, 0.1}, {0.3, 0.8}}};

}  // namespace

TEST(GaussRules, LegendreIsExactUpToDegree2nMinus1) {
  for (int n : {1, 3, 8, 20}) {
    const LineRule& r = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (std::size_t k = 0; k < r.x.size(); ++k) sum += r.w[k] * std::pow(r.x[k], p);
      EXPECT_NEAR(sum, 1.0 / (p + 1), 1e-14) << "n=" << n << " p=" << p;
    }
  }
}

TEST(GaussRules, JacobiIntegratesItsWeight) {
  for (double p : {-0.6, 0.0, 1.4}) {
    for (double q : {0.0, 2.0, 0.5}) {
      const LineRule r = gauss_jacobi(6, p, q);
      for (int m = 0; m <= 11; ++m) {
        double sum = 0.0;
        for (std::size_t k = 0; k < r.x.size(); ++k) sum += r.w[k] * std::pow(r.x[k], m);
        EXPECT_NEAR(sum, std::beta(p + m + 1.0, q + 1.0), 1e-13 * std::beta(p + m + 1.0, q + 1.0))
            << p << " " << q << " " << m;
      }
    }
  }
}

TEST(TriangleRules, ExactForAllMonomialsUpToTheirDegree) {
  for (int d = 1; d <= kMaxTriangleDegree; ++d) {
    const TriangleRule& r = triangle_rule(d);
    EXPECT_EQ(r.degree, d);
    for (int a = 0; a <= d; ++a)
      for (int b = 0; a + b <= d; ++b) {
        double sum = 0.0;
        for (int k = 0; k < r.size(); ++k) sum += r.w[k] * std::pow(r.bary[k][1], a) * std::pow(r.bary[k][2], b);
        EXPECT_NEAR(0.5 * sum, monomial(a, b), 2e-15) << "degree " << d << " x^" << a << " y^" << b;
      }
  }
  EXPECT_THROW(triangle_rule(0), std::invalid_argument);
  EXPECT_THROW(triangle_rule(kMaxTriangleDegree + 1), std::invalid_argument);
}

TEST(Constants, CnsMatchesFourierSideIdentity) {
  for (int n : {1, 2})
    for (double s : {0.01, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.99})
      EXPECT_NEAR(cns(n, s), oracle::cns_fourier(n, s), 1e-12 * oracle::cns_fourier(n, s)) << n << " " << s;
  EXPECT_NEAR(cns(2, 0.5), 0.5 / std::numbers::pi, 1e-15);
}

TEST(Constants, BallAmplitudeAtOneHalf) {
  // c(2, 1/2) = Gamma(1) / (2 Gamma(3/2)^2) = 2 / pi.
  EXPECT_NEAR(ball_solution_constant(2, 0.5), 2.0 / std::numbers::pi, 1e-15);
}

TEST(PairQuadrature, RadialBeta) {
  for (int m : {2, 3, 4})
    for (int q : {0, 1, 2})
      for (double s : {0.1, 0.5, 0.9}) EXPECT_NEAR(radial_beta(m, q, s), std::beta(m - 2.0 * s, q + 1.0), 1e-14);
}

TEST(PairQuadrature, Classification) {
  EXPECT_EQ(classify_pair(Triangle{0, 1, 2}, Triangle{2, 0, 1}), PairClass::Identical);
  EXPECT_EQ(classify_pair(Triangle{0, 1, 2}, Triangle{1, 3, 2}), PairClass::SharedEdge);
  EXPECT_EQ(classify_pair(Triangle{0, 1, 2}, Triangle{2, 3, 4}), PairClass::SharedVertex);
  EXPECT_EQ(classify_pair(Triangle{0, 1, 2}, Triangle{3, 4, 5}), PairClass::Disjoint);
}

// Opposite corners of a split-square mesh: one edge of each lies on y = -x,
// where the crossing test sees only rounding noise.
TEST(PairQuadrature, DistanceOfCollinearEdges) {
  const double c = 0.45461309523809523;
  const std::array<Point, 3> a{{{0.5, -0.5}, {0.5, -0.4375}, {c, -c}}};
  const std::array<Point, 3> b{{{-0.5, 0.5}, {-0.5, 0.4375}, {-c, c}}};
  EXPECT_NEAR(triangle_distance(a, b), 2.0 * std::sqrt(2.0) * c, 1e-14);
  const std::array<Point, 3> e{{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}};
  const std::array<Point, 3> f{{{3.0, 0.0}, {4.0, 0.0}, {4.0, 1.0}}};
  EXPECT_NEAR(triangle_distance(e, f), 1.0, 1e-15);
  const std::array<Point, 3> g{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  const std::array<Point, 3> h{{{0.4, -0.2}, {0.6, -0.2}, {0.5, 0.3}}};
  EXPECT_EQ(triangle_distance(g, h), 0.0);
}

struct TouchingCase {
  const char* name;
  std::array<Point, 3> u;
  std::array<int, 3> uid;
};

class TouchingPairs : public ::testing::TestWithParam<double> {};

// Against the polar ray-cast oracle, for the three touching configurations.
TEST_P(TouchingPairs, MatchPolarOracle) {
  const double s = GetParam();
  const TouchingCase cases[] = {
      {"identical", kT, {0, 1, 2}},
      {"shared edge", {kT[2], kT[1], Point{1.2, 0.9}}, {2, 1, 3}},
      {"shared vertex", {kT[1], Point{1.7, 0.2}, Point{1.4, 0.9}}, {1, 3, 4}},
  };
  for (const auto& c : cases) {
    const TriangleRef t{{0, 1, 2}, kT}, u{c.uid, c.u};
    const auto ref = oracle::polar_pair_extrapolated(kT, {0, 1, 2}, c.u, c.uid, s);
    QuadratureConfig fine;
    fine.touching_order = 16;
    EXPECT_LT(rel_block_diff(pair_interaction(t, u, s, KernelWeight::constant(1.0)), ref), 1e-6) << c.name;
    EXPECT_LT(rel_block_diff(pair_interaction(t, u, s, KernelWeight::constant(1.0), fine), ref), 1e-11) << c.name;
  }
}

INSTANTIATE_TEST_SUITE_P(S, TouchingPairs, ::testing::Values(0.2, 0.5, 0.8, 0.95));

TEST(PairQuadrature, DisjointPairsAgainstSubdivision) {
  QuadratureConfig q;
  q.near_degree = q.far_degree = 16;
  const std::array<Point, 3> u{{{1.5, 0.4}, {2.2, 0.5}, {1.8, 1.3}}};
  for (double s : {0.3, 0.7}) {
    const auto ref = oracle::subdivided_pair(kT, u, s);
    const PairBlock blk = pair_interaction(TriangleRef{{0, 1, 2}, kT}, TriangleRef{{3, 4, 5}, u}, s,
                                           KernelWeight::constant(1.0), q);
    EXPECT_LT(rel_block_diff(blk, ref), 1e-8) << s;
    // Default low-degree rules are only meant for the assembly.
    const PairBlock coarse =
        pair_interaction(TriangleRef{{0, 1, 2}, kT}, TriangleRef{{3, 4, 5}, u}, s, KernelWeight::constant(1.0));
    EXPECT_LT(rel_block_diff(coarse, ref), 1e-2) << s;
  }
}

TEST(PairQuadrature, BlockInvariants) {
  const std::array<Point, 3> u{{kT[2], kT[1], Point{1.2, 0.9}}};
  const PairBlock b = pair_interaction(TriangleRef{{0, 1, 2}, kT}, TriangleRef{{2, 1, 3}, u}, 0.6,
                                       KernelWeight::constant(1.0));
  ASSERT_EQ(b.n, 4);
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = b(i, j);
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-15 * m.cwiseAbs().maxCoeff());
  // Constants are in the kernel: the differences of sum_i phi_i vanish.
  EXPECT_LT(m.rowwise().sum().cwiseAbs().maxCoeff(), 1e-13 * m.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-13 * m.cwiseAbs().maxCoeff());
}

TEST(PairQuadrature, WeightLinearity) {
  const std::array<Point, 3> u{{kT[1], Point{1.7, 0.2}, Point{1.4, 0.9}}};
  const TriangleRef t{{0, 1, 2}, kT}, ur{{1, 3, 4}, u};
  const KernelWeight w1{0.0, [](Point x, Point y) { return 1.0 + x.x * y.x; }};
  const KernelWeight w2{0.0, [](Point x, Point y) { return 2.0 + std::sin(x.y + y.y); }};
  const KernelWeight mix{0.0, [&](Point x, Point y) { return 2.0 * w1(x, y) + 0.25 * w2(x, y); }};
  const PairBlock a = pair_interaction(t, ur, 0.4, w1), b = pair_interaction(t, ur, 0.4, w2),
                  c = pair_interaction(t, ur, 0.4, mix);
  for (int i = 0; i < 36; ++i) EXPECT_NEAR(c.a[i], 2.0 * a.a[i] + 0.25 * b.a[i], 1e-13 * std::abs(c.a[0]) + 1e-16);
  // A constant given as a function goes through the variable-weight path.
  const KernelWeight one_fn{0.0, [](Point, Point) { return 1.0; }};
  const PairBlock d = pair_interaction(t, ur, 0.4, KernelWeight::constant(3.0)),
                  e = pair_interaction(t, ur, 0.4, one_fn);
  for (int i = 0; i < 36; ++i) EXPECT_NEAR(d.a[i], 3.0 * e.a[i], 1e-8 * std::abs(d.a[0]));
}

TEST(Tail, FarFieldCircleClosedFormAtCenter) {
  for (double s : {0.2, 0.5, 0.8})
    for (double R : {1.0, 2.0, 3.5})
      EXPECT_NEAR(far_field_circle({0.0, 0.0}, R, s, 64), std::numbers::pi * std::pow(R, -2.0 * s) / s,
                  1e-13 * std::pow(R, -2.0 * s) / s);
}

TEST(Tail, FarFieldOffCenterAgainstRaycastOfFinePolygon) {
  // A regular 4096-gon stands in for the circle; its exterior differs by O(m^-2).
  std::vector<Point> poly;
  const int m = 4096;
  for (int k = 0; k < m; ++k) {
    const double a = 2.0 * std::numbers::pi * k / m;
    poly.push_back({2.0 * std::cos(a), 2.0 * std::sin(a)});
  }
  for (Point x : {Point{0.5, 0.0}, Point{1.2, -0.7}}) {
    const double ref = oracle::exterior_raycast(x, poly, 0.5);
    EXPECT_NEAR(far_field_circle(x, 2.0, 0.5, 256), ref, 1e-5 * ref);
  }
}

TEST(Tail, PolygonFormulaAgainstRaycast) {
  const Mesh mesh = build_mesh(GeometrySpec::rect({-0.5, 0.5, -0.5, 0.5}), 0.25);
  const OuterBoundary outer = outer_boundary(mesh);
  // Edges come unordered; chain them into a vertex loop for the oracle.
  std::vector<Point> poly{outer.a[0]};
  Point next = outer.b[0];
  while (!(next == outer.a[0])) {
    poly.push_back(next);
    std::size_t k = 0;
    while (!(outer.a[k] == next)) ++k;
    next = outer.b[k];
  }
  ASSERT_EQ(poly.size(), outer.a.size());
  for (Point x : {Point{0.0, 0.0}, Point{0.3, -0.2}, Point{-0.45, 0.45}})
    for (double s : {0.25, 0.75}) {
      const double ref = oracle::exterior_raycast(x, poly, s);
      EXPECT_NEAR(far_field_polygon(x, outer, s, 256), ref, 1e-12 * ref) << s;
      EXPECT_NEAR(far_field_polygon(x, outer, s, TailConfig{}.angular_order), ref, 1e-6 * ref) << s;
    }
}

TEST(Tail, TailWeightEqualsExteriorOfTheDomainPolygon) {
  // Auxiliary layer plus far field together cover the complement of Omega_h.
  const Mesh mesh = build_mesh(GeometrySpec::rect({-0.5, 0.5, -0.5, 0.5}), 0.2);
  const std::vector<Point> square{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  for (Point x : {Point{0.0, 0.0}, Point{0.31, -0.12}, Point{0.45, 0.4}})
    for (double s : {0.25, 0.5, 0.75}) {
      const double ref = oracle::exterior_raycast(x, square, s);
      EXPECT_NEAR(tail_weight(x, mesh, TailConfig{}, s), ref, 1e-6 * ref) << x.x << "," << x.y << " s=" << s;
    }
}

TEST(Tail, RejectsPointsOutsideOmega) {
  const Mesh mesh = build_mesh(GeometrySpec::rect({-0.5, 0.5, -0.5, 0.5}), 0.25);
  EXPECT_THROW(tail_weight({0.8, 0.0}, mesh, TailConfig{}, 0.5), QuadratureError);
}
