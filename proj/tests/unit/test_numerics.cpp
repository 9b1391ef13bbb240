#include "oracles.hpp"
#include "swarm/numerics.hpp"

#include <gtest/gtest.h>

using namespace swarm;

TEST(EulerStep, Examples) {
  AgentState s{Vec3::Zero(), Vec3(1, 0, 0)};
  AgentState n = euler_step(s, Vec3::Zero(), 0.005);
  EXPECT_DOUBLE_EQ(n.p.x(), 0.005);
  EXPECT_DOUBLE_EQ(n.v.x(), 1.0);
  n = euler_step({Vec3::Zero(), Vec3::Zero()}, Vec3(2, 0, 0), 0.1);
  EXPECT_DOUBLE_EQ(n.p.x(), 0.0);
  EXPECT_DOUBLE_EQ(n.v.x(), 0.2);
  const AgentState any{Vec3(3, -1, 2), Vec3(0.4, 0.5, -0.6)};
  EXPECT_EQ(euler_step(any, Vec3::Zero(), 0.3).v, any.v);
}

TEST(ForwardDifference, Examples) {
  const Matrix D = forward_difference_matrix(3, 0.15, 1);
  Vector x(3);
  x << 0, 0.15, 0.45;
  const Vector dx = D * x;
  ASSERT_EQ(dx.size(), 2);
  EXPECT_NEAR(dx(0), 1.0, 1e-12);
  EXPECT_NEAR(dx(1), 2.0, 1e-12);
  EXPECT_LE((D * Vector::Constant(3, 4.2)).norm(), 1e-12);
  const Matrix D3 = forward_difference_matrix(5, 0.5, 3);
  Vector ramp(15);
  for (int k = 0; k < 5; ++k)
    for (int d = 0; d < 3; ++d) ramp(3 * k + d) = 0.7 * 0.5 * k;
  EXPECT_LE((D3 * ramp - Vector::Constant(12, 0.7)).norm(), 1e-12);
}

TEST(Eigenvalues, Examples) {
  EXPECT_EQ(sym_eigenvalues(Matrix::Identity(3, 3)), Vector::Ones(3));
  Matrix m(2, 2);
  m << 2, -1, -1, 1;
  const Vector ev = sym_eigenvalues(m);
  const auto [lo, hi] = oracle::eig2x2(m);
  EXPECT_NEAR(ev(0), lo, 1e-14);
  EXPECT_NEAR(ev(1), hi, 1e-14);
  EXPECT_NEAR(lo, (3 - std::sqrt(5.0)) / 2, 1e-14);
  Matrix L(2, 2);
  L << 1, -1, -1, 1;
  const Vector evl = sym_eigenvalues(L);
  EXPECT_NEAR(evl(0), 0.0, 1e-14);
  EXPECT_NEAR(evl(1), 2.0, 1e-14);
  Matrix asym(2, 2);
  asym << 1, 2, 0, 1;
  EXPECT_THROW(sym_eigenvalues(asym), InvalidArgument);
}

TEST(Eigenvalues, RoundoffZeroIsNotPositive) {
  // Laplacian of a weighted path: exact zero eigenvalue plus roundoff.
  Matrix L(3, 3);
  L << 0.7, -0.7, 0, -0.7, 1.9, -1.2, 0, -1.2, 1.2;
  EXPECT_FALSE(has_positive_spectrum(L));
  L(0, 0) += 1e-3;
  EXPECT_TRUE(has_positive_spectrum(L));
}

TEST(Qp, HalfspaceProjectionClosedForm) {
  for (QpMethod method : {QpMethod::active_set, QpMethod::admm}) {
    QpProblem p = QpProblem::with_size(2);
    p.Q = 2.0 * Matrix::Identity(2, 2);
    p.q = Vector(2);
    p.q << -4, 0;
    p.A_in = Matrix(1, 2);
    p.A_in << 1, 0;
    p.b_in = Vector::Ones(1);
    QpSettings s;
    s.method = method;
    const auto sol = solve_qp(p, s);
    ASSERT_TRUE(sol.ok());
    EXPECT_NEAR(sol.x(0), 1.0, 1e-6);
    EXPECT_NEAR(sol.x(1), 0.0, 1e-6);
  }
}

TEST(Qp, EqualityOnlySymmetry) {
  QpProblem p = QpProblem::with_size(2);
  p.Q = 2.0 * Matrix::Identity(2, 2);
  p.A_eq = Matrix::Ones(1, 2);
  p.b_eq = Vector::Constant(1, 2.0);
  const auto sol = solve_qp(p);
  ASSERT_TRUE(sol.ok());
  EXPECT_NEAR(sol.x(0), 1.0, 1e-10);
  EXPECT_NEAR(sol.x(1), 1.0, 1e-10);
}

TEST(Qp, InfeasibleIsReported) {
  for (QpMethod method : {QpMethod::active_set, QpMethod::admm}) {
    QpProblem p = QpProblem::with_size(1);
    p.Q = Matrix::Identity(1, 1);
    p.A_in = Matrix(2, 1);
    p.A_in << 1, -1;
    p.b_in = Vector(2);
    p.b_in << -1, -1;  // x <= -1 and x >= 1
    QpSettings s;
    s.method = method;
    EXPECT_EQ(solve_qp(p, s).status, QpStatus::infeasible);
  }
}

TEST(Qp, SixVarsThreeEqFourInMatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 40; ++c) {
    const QpProblem p = oracle::random_qp(6, 3, 4, rng);
    const auto ref = oracle::enumerate_active_sets(p);
    ASSERT_TRUE(ref.feasible);
    for (QpMethod method : {QpMethod::active_set, QpMethod::admm}) {
      QpSettings s;
      s.method = method;
      const auto sol = solve_qp(p, s);
      ASSERT_TRUE(sol.ok()) << "case " << c;
      EXPECT_NEAR(sol.objective, ref.value, 1e-6 * (1 + std::abs(ref.value))) << "case " << c;
      EXPECT_LE((sol.x - ref.x).lpNorm<Eigen::Infinity>(), 1e-5) << "case " << c;
    }
  }
}

TEST(Qp, SemidefiniteMatchesEnumerationValue) {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 30; ++c) {
    const QpProblem p = oracle::random_qp(5, 1, 5, rng, true);
    const auto ref = oracle::enumerate_active_sets(p);
    ASSERT_TRUE(ref.feasible);
    const auto sol = solve_qp(p);
    ASSERT_TRUE(sol.ok()) << "case " << c;
    EXPECT_NEAR(sol.objective, ref.value, 1e-6 * (1 + std::abs(ref.value))) << "case " << c;
    EXPECT_LE(constraint_violation(p, sol.x), 1e-6);
  }
}

TEST(Projection, Examples) {
  QpProblem set = QpProblem::with_size(2);
  set.A_in = Matrix(1, 2);
  set.A_in << -1, 0;
  set.b_in = Vector::Constant(1, -1.0);  // x1 >= 1
  auto sol = project_onto(set, Vector::Zero(2));
  ASSERT_TRUE(sol.ok());
  EXPECT_NEAR(sol.x(0), 1.0, 1e-8);
  EXPECT_NEAR(sol.x(1), 0.0, 1e-8);

  Vector inside(2);
  inside << 3, -7;
  sol = project_onto(set, inside);
  EXPECT_LE((sol.x - inside).norm(), 1e-8);

  QpProblem box = QpProblem::with_size(2);
  box.A_in = Matrix(4, 2);
  box.A_in << 1, 0, 0, 1, -1, 0, 0, -1;
  box.b_in = Vector(4);
  box.b_in << 1, 1, 0, 0;
  Vector x0(2);
  x0 << 2, -1;
  sol = project_onto(box, x0);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-8);
  EXPECT_NEAR(sol.x(1), 0.0, 1e-8);
}

TEST(Qp, RejectsMalformedInput) {
  QpProblem p = QpProblem::with_size(2);
  p.Q(0, 1) = 1.0;  // asymmetric
  EXPECT_THROW(solve_qp(p), InvalidArgument);
}
