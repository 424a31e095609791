#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nlfem/assembly.hpp"
#include "nlfem/solver.hpp"
#include "oracles.hpp"

using namespace nlfem;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::uint32_t seed, double shift) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = d(gen);
  Eigen::MatrixXd s = 0.5 * (a + a.transpose());
  s.diagonal().array() += shift;
  return s;
}

double dense_condition(const Eigen::MatrixXd& a) {
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
  return ev.cwiseAbs().maxCoeff() / ev.cwiseAbs().minCoeff();
}

}  // namespace

TEST(Factorization, CholeskyForPositiveDefinite) {
  const Eigen::MatrixXd a = random_symmetric(40, 1, 40.0);
  const SymmetricFactorization f(a);
  EXPECT_TRUE(f.positive_definite());
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(40, -1.0, 2.0);
  EXPECT_LT((a * f.solve(b) - b).norm(), 1e-12 * b.norm());
}

TEST(Factorization, IndefiniteFallsBackToLuOrThrows) {
  const Eigen::MatrixXd a = random_symmetric(30, 2, 0.0);
  const SymmetricFactorization f(a);
  EXPECT_FALSE(f.positive_definite());
  EXPECT_FALSE(f.singular());
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(30);
  EXPECT_LT((a * f.solve(b) - b).norm(), 1e-9 * b.norm());
  EXPECT_THROW(SymmetricFactorization(a, false), SolverError);
}

TEST(Factorization, SingularIsReported) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  const SymmetricFactorization f(a);
  EXPECT_TRUE(f.singular());
  EXPECT_THROW(f.solve(Eigen::VectorXd::Ones(3)), SolverError);
  EXPECT_THROW(SymmetricFactorization(random_symmetric(4, 3, 9.0)).solve(Eigen::VectorXd::Ones(5)), SolverError);
}

TEST(Solve, DirectAndIterativeAgree) {
  const GeometrySpec g = GeometrySpec::square_split({-0.5, 0.5, -0.5, 0.5});
  const Mesh m = build_mesh(g, 0.2);
  ProblemSpec ps;
  ps.geometry = g;
  ps.s = 0.6;
  const LinearSystem sys = build_system(ps, m);
  SolveInfo direct, cg;
  const Eigen::VectorXd u = solve_dofs(sys, &direct);
  SolveOptions it;
  it.direct_limit = 0;
  const Eigen::VectorXd v = solve_dofs(sys, &cg, it);
  EXPECT_EQ(direct.method, "cholesky");
  EXPECT_EQ(cg.method, "cg");
  EXPECT_GT(cg.iterations, 0);
  EXPECT_LE(direct.residual, direct.residual_bound);
  EXPECT_LT((u - v).norm(), 1e-9 * u.norm());
  const Solution sol = solve(sys, m);
  for (int v2 : m.boundary_nodes) EXPECT_EQ(sol.values[v2], 0.0);
  for (int k = m.num_domain_nodes; k < m.num_nodes(); ++k) EXPECT_EQ(sol.values[k], 0.0);
}

TEST(Lanczos, ConditionNumberMatchesDenseEigenvalues) {
  for (double shift : {30.0, 0.3}) {
    const Eigen::MatrixXd a = random_symmetric(80, 5, shift);
    const ConditionEstimate c = condition_number(a, LanczosOptions{300, 1e-10});
    EXPECT_NEAR(c.value, dense_condition(a), 1e-6 * dense_condition(a)) << shift;
    EXPECT_FALSE(c.singular);
  }
  int it = 0;
  const Eigen::MatrixXd a = random_symmetric(60, 6, 0.0);
  const double lmax = lanczos_max_abs(
      60, [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a * v); }, LanczosOptions{300, 1e-12}, &it);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
  EXPECT_NEAR(lmax, ev.cwiseAbs().maxCoeff(), 1e-9 * lmax);
  EXPECT_GT(it, 0);
}

TEST(Lanczos, SingularMatrixGivesInfiniteCondition) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(5, 5);
  a(2, 2) = 0.0;
  const ConditionEstimate c = condition_number(a);
  EXPECT_TRUE(c.singular);
  EXPECT_TRUE(std::isinf(c.value));
}

TEST(Eigen, ShiftInvertLanczosAgainstDenseGeneralizedSolver) {
  const GeometrySpec g = GeometrySpec::annular_split_disk({0, 0}, 1.0, 2.0);
  const Mesh m = build_mesh(g, 0.3);
  for (double s : {0.25, 0.95}) {
    ProblemSpec ps;
    ps.geometry = g;
    ps.s = s;
    BuildOptions bo;
    bo.with_mass = true;
    const LinearSystem sys = build_system(ps, m, bo);
    ASSERT_TRUE(sys.M.has_value());
    const Eigen::VectorXd ref = oracle::generalized_eigenvalues(sys.A, Eigen::MatrixXd(*sys.M));
    const EigenResult r = generalized_eigs(sys.A, *sys.M, 6);
    ASSERT_EQ(r.values.size(), 6u);
    for (int k = 0; k < 6; ++k) {
      EXPECT_NEAR(r.values[k], ref[k], 1e-7 * ref[k]) << "s=" << s << " k=" << k;
      EXPECT_LT(r.residuals[k], 1e-6);
    }
    // cond(A - w^2 M) blows up at an eigenvalue.
    const double near = condition_number(shifted_system(sys, *sys.M, ref[0] + 1e-6).A).value;
    const double away = condition_number(shifted_system(sys, *sys.M, 0.5 * ref[0]).A).value;
    EXPECT_GT(near, 1e3 * away);
  }
}

TEST(Eigen, ShiftedSystemSubtractsTheMass) {
  const GeometrySpec g = GeometrySpec::rect({0, 1, 0, 1});
  const Mesh m = build_mesh(g, 0.3);
  ProblemSpec ps;
  ps.geometry = g;
  BuildOptions bo;
  bo.with_mass = true;
  const LinearSystem sys = build_system(ps, m, bo);
  const LinearSystem sh = shifted_system(sys, *sys.M, 2.5);
  EXPECT_LT((sh.A - (sys.A - 2.5 * Eigen::MatrixXd(*sys.M))).cwiseAbs().maxCoeff(), 1e-15);
}
