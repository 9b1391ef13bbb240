#include "oracles.hpp"
#include "swarm/estimation.hpp"

#include <gtest/gtest.h>

using namespace swarm;
using namespace swarm::estimation;

namespace {

std::vector<Vec3> square() {
  return {Vec3(0.5, 0.5, 1), Vec3(-0.5, 0.5, 1), Vec3(-0.5, -0.5, 1), Vec3(0.5, -0.5, 1)};
}

}  // namespace

TEST(ObserverGains, Schedule) {
  const WeightedGraph g = WeightedGraph::path(3);  // node 1 (0-based) has two neighbors
  const auto gains = default_observer_gains(g, LeaderSet({1}, 3));
  EXPECT_NEAR(gains.k_rp(1, 0), 0.8 / 3, 1e-15);
  EXPECT_NEAR(gains.k_gp(1), 0.8 / 3, 1e-15);
  EXPECT_NEAR(gains.k_rv(1, 2), 20.0 / 3, 1e-14);
  EXPECT_NEAR(gains.k_rp(0, 1), 0.8, 1e-15);
  EXPECT_EQ(gains.k_gp(0), 0.0);
  EXPECT_THROW(default_observer_gains(WeightedGraph::empty(2), LeaderSet({0}, 2)), InvalidArgument);
}

TEST(Observer, ExactEstimatesHaveZeroInnovation) {
  const WeightedGraph g = WeightedGraph::ring(4);
  const LeaderSet leaders({0}, 4);
  const auto gains = default_observer_gains(g, leaders);
  const auto p = square();
  ObserverState st(4);
  for (int i = 0; i < 4; ++i) st[i] = {p[i], Vec3(0.1 * i, 0, 0)};
  const std::vector<Vec3> u(4, Vec3(0, 0, 0.5));
  const auto step = observer_step(st, ideal_measurements(p, g, leaders), u, gains, 0.01);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LE(step.innovation[i].norm(), 1e-15);
    EXPECT_LE((step.state[i].p - (p[i] + 0.01 * st[i].v)).norm(), 1e-15);
    EXPECT_LE((step.state[i].v - (st[i].v + 0.01 * u[i])).norm(), 1e-15);
  }
}

TEST(Observer, MissingMeasurementThrows) {
  const WeightedGraph g = WeightedGraph::path(2);
  const LeaderSet leaders({0}, 2);
  const auto gains = default_observer_gains(g, leaders);
  MeasurementBundle meas = ideal_measurements({Vec3::Zero(), Vec3::UnitX()}, g, leaders);
  meas.relative.erase(meas.relative.begin(), meas.relative.begin() + 1);
  ObserverState st(2);
  EXPECT_THROW(observer_step(st, meas, {Vec3::Zero(), Vec3::Zero()}, gains, 0.01), InvalidArgument);
}

TEST(ObserverStability, TwoNodeCharacteristicPolynomial) {
  const WeightedGraph g = WeightedGraph::path(2);
  const LeaderSet leaders({0}, 2);
  const auto gains = observer_gains_from_weights(g, leaders, 1.0);
  const Matrix T = observer_T(gains);
  Matrix expected(2, 2);
  expected << 2, -1, -1, 1;
  EXPECT_LE((T - expected).norm(), 1e-15);
  const auto [lo, hi] = oracle::eig2x2(T);
  const auto r = check_observer_stability(g, leaders, gains);
  EXPECT_TRUE(r.stable);
  EXPECT_NEAR(r.min_eigenvalue, lo, 1e-12);
  EXPECT_NEAR(hi, (3 + std::sqrt(5.0)) / 2, 1e-12);
}

TEST(ObserverStability, NoLeaderOrLeaderlessComponent) {
  const WeightedGraph g = WeightedGraph::ring(5);
  const auto r = check_observer_stability(g, LeaderSet({}, 5), default_observer_gains(g, LeaderSet({}, 5)));
  EXPECT_FALSE(r.stable);
  EXPECT_NEAR(r.min_eigenvalue, 0.0, 1e-12);

  const WeightedGraph split(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  const LeaderSet one({0}, 4);
  const auto r2 = check_observer_stability(split, one, observer_gains_from_weights(split, one, 1.0));
  EXPECT_NEAR(r2.min_eigenvalue, 0.0, 1e-12);
  EXPECT_FALSE(r2.stable);
}

TEST(ObserverStability, NoLeaderErrorAlongOnesNeverDecays) {
  const WeightedGraph g = WeightedGraph::ring(4);
  const LeaderSet none({}, 4);
  const auto gains = default_observer_gains(g, none);
  const auto p = square();
  ObserverState st(4);
  for (int i = 0; i < 4; ++i) st[i].p = p[i] + Vec3(0.3, 0, 0);
  const auto meas = ideal_measurements(p, g, none);
  const std::vector<Vec3> u(4, Vec3::Zero());
  for (int k = 0; k < 2000; ++k) st = observer_step(st, meas, u, gains, 0.005).state;
  // A common offset is invisible to relative measurements.
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(st[i].p.x() - p[i].x(), 0.3, 1e-12);
}

TEST(ObserverDynamics, MatchesMatrixExponential) {
  // Simulated estimation error against exp(O' t) e0 for the error matrix O'.
  const WeightedGraph g = WeightedGraph::ring(4);
  const LeaderSet leaders({0}, 4);
  const auto gains = default_observer_gains(g, leaders);
  const auto p = square();
  const double dt = 0.0005;
  const int steps = 4000;
  ObserverState st(4);
  st[0].p = p[0];
  const auto meas = ideal_measurements(p, g, leaders);
  const std::vector<Vec3> u(4, Vec3::Zero());
  Vector e0(8);
  for (int i = 0; i < 4; ++i) {
    e0(i) = p[i].x() - st[i].p.x();
    e0(4 + i) = 0.0;
  }
  for (int k = 0; k < steps; ++k) st = observer_step(st, meas, u, gains, dt).state;
  const Vector ref = oracle::expm_apply(observer_error_matrix(gains), steps * dt, e0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p[i].x() - st[i].p.x(), ref(i), 5e-3 * e0.lpNorm<Eigen::Infinity>());
}

TEST(ScaleEstimator, FixedPoint) {
  const WeightedGraph g = WeightedGraph::ring(4);
  const auto st = default_scale_estimator(g, LeaderSet({0}, 4), 1.7);
  EXPECT_LE(scale_rate(st, 1.7).norm(), 1e-15);
}

TEST(ScaleEstimator, SingleLeaderConstantScale) {
  auto st = default_scale_estimator(WeightedGraph::empty(1), LeaderSet({0}, 1), 1.0);
  for (int k = 0; k < 1000; ++k) st = scale_step(st, 1.5, 0.01);
  EXPECT_NEAR(st.s_est(0), 1.5, 1e-4);
}

TEST(ScaleEstimator, MatchesEigendecompositionSolution) {
  const WeightedGraph g = WeightedGraph::ring(4);
  auto st = default_scale_estimator(g, LeaderSet({0}, 4), 1.0);
  const Matrix M = st.system_matrix();
  Eigen::EigenSolver<Matrix> es(M);
  const Eigen::MatrixXcd V = es.eigenvectors();
  const Eigen::VectorXcd lam = es.eigenvalues();
  const Eigen::VectorXcd c = V.partialPivLu().solve(Eigen::VectorXcd(Vector::Constant(4, 1.0 - 1.5)));
  const double dt = 0.001;
  const int steps = 10000;
  for (int k = 0; k < steps; ++k) st = scale_step(st, 1.5, dt);
  const Eigen::VectorXcd ref = V * (c.array() * (-lam.array() * (steps * dt)).exp()).matrix();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(st.s_est(i) - 1.5, ref(i).real(), 2e-4);
}

TEST(ScaleEstimator, DecayRateMatchesSlowestEigenvalue) {
  std::mt19937_64 rng(12);
  for (int c = 0; c < 10; ++c) {
    const int n = 2 + c % 5;
    const WeightedGraph g = oracle::random_connected_graph(n, rng, false);
    auto st = default_scale_estimator(g, LeaderSet({c % n}, n), 0.5);
    const double lam = min_real_eigenvalue(st.system_matrix());
    const double dt = 0.005;
    const double t1 = 6.0 / lam, t2 = 12.0 / lam;
    double e1 = 0.0;
    for (long k = 0; k * dt < t2; ++k) {
      if (std::abs(k * dt - t1) < dt / 2) e1 = (st.s_est.array() - 2.0).matrix().norm();
      st = scale_step(st, 2.0, dt);
    }
    const double e2 = (st.s_est.array() - 2.0).matrix().norm();
    const double rate = std::log(e1 / e2) / (t2 - t1);
    EXPECT_GE(rate, 0.9 * lam) << "n=" << n;
    EXPECT_LE(rate, 1.1 * lam) << "n=" << n;
  }
}

TEST(DesiredTrajectory, UnitAndDoubleScale) {
  const WeightedGraph g = WeightedGraph::ring(4);
  const LeaderSet leaders({0}, 4);
  std::vector<Vec3> shape = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
  const Vec3 pc(0, 0, 1), vc(0.2, 0, 0);
  auto st = default_scale_estimator(g, leaders, 1.0);
  auto d = desired_trajectory_from_scale(pc, vc, shape, st, 1.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LE((d.p[i] - (pc + shape[i])).norm(), 1e-15);
    EXPECT_LE((d.v[i] - vc).norm(), 1e-15);
  }
  st = default_scale_estimator(g, leaders, 2.0);
  d = desired_trajectory_from_scale(pc, vc, shape, st, 2.0);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LE((d.p[i] - (pc + 2.0 * shape[i])).norm(), 1e-15);
    EXPECT_LE((d.v[i] - vc).norm(), 1e-15);
  }
  shape[0] = Vec3(2, 0, 0);
  EXPECT_THROW(desired_trajectory_from_scale(pc, vc, shape, st, 2.0), InvalidArgument);
}

TEST(DesiredTrajectory, VelocityMatchesFiniteDifference) {
  const WeightedGraph g = WeightedGraph::ring(4);
  const LeaderSet leaders({0}, 4);
  const std::vector<Vec3> shape = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
  auto st = default_scale_estimator(g, leaders, 1.0);
  for (int k = 0; k < 300; ++k) st = scale_step(st, 2.0, 0.01);
  const double dt = 1e-4;
  const auto d0 = desired_trajectory_from_scale(Vec3::Zero(), Vec3::Zero(), shape, st, 2.0);
  const auto d1 = desired_trajectory_from_scale(Vec3::Zero(), Vec3::Zero(), shape, scale_step(st, 2.0, dt), 2.0);
  for (int i = 0; i < 4; ++i) EXPECT_LE(((d1.p[i] - d0.p[i]) / dt - d0.v[i]).norm(), 1e-3);
}
