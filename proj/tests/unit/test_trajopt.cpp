#include "oracles.hpp"
#include "swarm/trajopt.hpp"

#include <gtest/gtest.h>

using namespace swarm;
using namespace swarm::trajopt;

namespace {

/// Rest-to-rest minimum-jerk QP on one axis, built from scratch.
swarm::QpProblem scalar_min_jerk(int K, double h, double p0, double pf) {
  swarm::QpProblem p = swarm::QpProblem::with_size(K);
  Matrix D = Matrix::Zero(K - 1, K);
  for (int k = 0; k + 1 < K; ++k) {
    D(k, k) = -1.0 / h;
    D(k, k + 1) = 1.0 / h;
  }
  p.Q = 2.0 * D.transpose() * D;
  p.A_eq = Matrix::Zero(2, K);
  for (int t = 0; t < K; ++t) {
    p.A_eq(0, t) = h * h * (K - t - 0.5);  // p[K]
    p.A_eq(1, t) = h;                      // v[K]
  }
  p.b_eq = Vector(2);
  p.b_eq << pf - p0, 0.0;
  return p;
}

RunScenario head_on() {
  RunScenario sc;
  sc.bcs = {{Vec3(-2, 0.05, 0), Vec3::Zero(), Vec3(2, 0.05, 0), Vec3::Zero()},
            {Vec3(2, -0.05, 0), Vec3::Zero(), Vec3(-2, -0.05, 0), Vec3::Zero()}};
  sc.g_comm = WeightedGraph::complete(2);
  return sc;
}

// Same exchange, but the second agent starts further out so the two reach the
// ring at different samples.
RunScenario staggered() {
  RunScenario sc = head_on();
  sc.bcs[1] = {Vec3(2.5, -0.05, 0), Vec3::Zero(), Vec3(-1.5, -0.05, 0), Vec3::Zero()};
  return sc;
}

double scan_min_distance(const std::vector<Trajectory>& t) {
  double d = 1e300;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) d = std::min(d, oracle::min_distance_scan(t[i].pos, t[j].pos));
  return d;
}

}  // namespace

TEST(StraightLine, HoverIsZeroAcceleration) {
  BoundaryConditions bc{Vec3(1, 2, 3), Vec3::Zero(), Vec3(1, 2, 3), Vec3::Zero()};
  const auto t = straight_line(bc, Horizon{});
  EXPECT_LE(t.accel.lpNorm<Eigen::Infinity>(), 1e-10);
  for (int k = 0; k <= t.K(); ++k) EXPECT_LE((t.position(k) - bc.p0).norm(), 1e-10);
}

TEST(StraightLine, MatchesEnumeratedQpAndIsSymmetric) {
  const Horizon H{8, 0.15};
  BoundaryConditions bc{Vec3::Zero(), Vec3::Zero(), Vec3(1, 0, 0), Vec3::Zero()};
  const auto t = straight_line(bc, H);
  const auto ref = oracle::enumerate_active_sets(scalar_min_jerk(8, 0.15, 0.0, 1.0));
  ASSERT_TRUE(ref.feasible);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(t.accel(k, 0), ref.x(k), 1e-8);
  EXPECT_NEAR(t.position(8).x(), 1.0, 1e-8);
  EXPECT_NEAR(t.velocity(8).x(), 0.0, 1e-8);
  EXPECT_NEAR(t.position(4).x(), 0.5, 1e-6);
}

TEST(CrossingTime, Cases) {
  const Horizon H{10, 0.2};
  const RingPose ring;
  BoundaryConditions bc{Vec3(-1, 0, 0), Vec3::Zero(), Vec3(1, 0, 0), Vec3::Zero()};
  const auto line = straight_line(bc, H);
  int best = 0;
  for (int k = 1; k <= H.K; ++k)
    if (line.position(k).norm() < line.position(best).norm()) best = k;
  EXPECT_EQ(crossing_time(line, ring), best);

  BoundaryConditions hover{Vec3(0, 2, 0), Vec3::Zero(), Vec3(0, 2, 0), Vec3::Zero()};
  EXPECT_EQ(crossing_time(straight_line(hover, H), ring), 0);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int c = 0; c < 20; ++c) {
    Vector x(3 * H.K);
    for (int i = 0; i < x.size(); ++i) x(i) = g(rng);
    const auto t = Trajectory::from_decision(x, Vec3(g(rng), g(rng), g(rng)), Vec3::Zero(), H.h);
    int scan = 0;
    for (int k = 1; k <= H.K; ++k)
      if ((t.position(k) - ring.center).norm() < (t.position(scan) - ring.center).norm()) scan = k;
    EXPECT_EQ(crossing_time(t, ring), scan);
  }
}

TEST(CrossingCenter, CostNotLowerThanStraightLine) {
  const Horizon H{20, 0.15};
  const RingPose ring;
  BoundaryConditions bc{Vec3(-1.5, 0.2, 0.1), Vec3::Zero(), Vec3(1.5, -0.1, 0.2), Vec3::Zero()};
  const auto line = straight_line(bc, H);
  const int kc = crossing_time(line, ring);
  const auto cc = crossing_center(bc, H, ring, kc, default_crossing_speed(bc, H, ring));
  const Matrix Q = jerk_cost_matrix(H);
  const Vector xl = line.decision(), xc = cc.decision();
  EXPECT_GE(xc.dot(Q * xc), xl.dot(Q * xl) - 1e-12);
  EXPECT_LE((cc.position(kc) - ring.center).norm(), 1e-8);
  EXPECT_LE((cc.position(H.K) - bc.pf).norm(), 1e-8);
}

TEST(RingConstraints, CenterPassageWrongSideAndTube) {
  const Horizon H{10, 0.1};
  const RingPose ring;
  const int kc = 5;
  const Vector zero = Vector::Zero(3 * H.K);
  auto min_slack = [&](const ConstraintSet& cs, const Vector& x, RowKind kind) {
    const Vector s = cs.in_slack(x);
    double m = 1e300;
    for (int r = 0; r < cs.num_in(); ++r)
      if (cs.in_tags()[r].kind == kind) m = std::min(m, s(r));
    return m;
  };

  BoundaryConditions pass{-kc * H.h * Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3::Zero(), Vec3::Zero()};
  pass.pf = pass.p0 + H.K * H.h * Vec3(1, 0, 0);
  const auto cs = ring_constraints(ring, kc, pass, H, approach_side(ring, pass.p0));
  const Vector s = cs.in_slack(zero);
  EXPECT_GE(s.minCoeff(), -1e-12);

  BoundaryConditions off{0.4 * ring.ry, Vec3::Zero(), 0.4 * ring.ry, Vec3::Zero()};
  const auto cs2 = ring_constraints(ring, kc, off, H, 1);
  EXPECT_NEAR(min_slack(cs2, zero, RowKind::tube), -0.1, 1e-12);

  BoundaryConditions wrong{-1.0 * ring.rx, Vec3::Zero(), -1.0 * ring.rx, Vec3::Zero()};
  const auto cs3 = ring_constraints(ring, kc, wrong, H, 1);
  EXPECT_LT(min_slack(cs3, zero, RowKind::left_cone), 0.0);
}

TEST(Convexify, SingleRowExample) {
  const auto row = convexify_pair(Vec3::Zero(), Vec3(1, 0, 0), ConvexMode::single_i, 0.3);
  EXPECT_LE(row.coef_j.norm(), 0.0);
  EXPECT_NEAR(row.eval(Vec3(0.7, 0, 0), Vec3::Zero()), 0.0, 1e-15);
  EXPECT_GT(row.eval(Vec3(0.71, 0, 0), Vec3::Zero()), 0.0);
  EXPECT_LT(row.eval(Vec3(0.69, 0, 0), Vec3::Zero()), 0.0);
  EXPECT_THROW(convexify_pair(Vec3::Ones(), Vec3::Ones(), ConvexMode::joint, 0.3), InvalidArgument);
}

TEST(Convexify, SingleModeRowsAreConservative) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int c = 0; c < 2000; ++c) {
    const Vec3 pi(u(rng), u(rng), u(rng)), pj(u(rng), u(rng), u(rng));
    const auto ri = convexify_pair(pi, pj, ConvexMode::single_i, 0.3);
    const auto rj = convexify_pair(pi, pj, ConvexMode::single_j, 0.3);
    // Distance from the frozen point to the feasible halfspace.
    EXPECT_GE((ri.coef_i.dot(pj) - ri.rhs) / ri.coef_i.norm(), 0.3 - 1e-12);
    EXPECT_GE((rj.coef_j.dot(pi) - rj.rhs) / rj.coef_j.norm(), 0.3 - 1e-12);
  }
}

TEST(Convexify, JointRegionContainsSingleRegionOnGrid) {
  // 1-step toy: agents move along the line through their previous points.
  const Vec3 pi(0, 0, 0), pj(0.25, 0, 0);
  const auto joint = convexify_pair(pi, pj, ConvexMode::joint, 0.3);
  const auto single = convexify_pair(pi, pj, ConvexMode::single_i, 0.3);
  bool strictly_larger = false;
  for (int a = -100; a <= 100; ++a) {
    const Vec3 xi = pi + Vec3(0.01 * a, 0, 0);
    bool in_joint = false;
    for (int b = -100; b <= 100 && !in_joint; ++b) in_joint = joint.eval(xi, pj + Vec3(0.01 * b, 0, 0)) <= 1e-12;
    const bool in_single = single.eval(xi, pj) <= 1e-12;
    if (in_single) EXPECT_TRUE(in_joint) << "x_i=" << xi.x();
    if (in_joint && !in_single) strictly_larger = true;
  }
  EXPECT_TRUE(strictly_larger);
}

TEST(Centralized, SingleAgentReducesToCrossingCenter) {
  const Horizon H{20, 0.15};
  const RingPose ring;
  BoundaryConditions bc{Vec3(-1.5, 0, 0), Vec3::Zero(), Vec3(1.5, 0, 0), Vec3::Zero()};
  AlgParams params;
  const auto res = solve_centralized({bc}, H, ring, params);
  ASSERT_TRUE(res.collision_free);
  const int kc = crossing_time(straight_line(bc, H), ring);
  const auto cc = crossing_center(bc, H, ring, kc, default_crossing_speed(bc, H, ring));
  EXPECT_LE((res.trajectories[0].pos - cc.pos).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Centralized, TwoCrossingAgentsStaySeparated) {
  const Horizon H{40, 0.15};
  const auto sc = staggered();
  AlgParams params;
  const auto res = solve_centralized(sc.bcs, H, RingPose{}, params);
  EXPECT_EQ(res.status, QpStatus::optimal);
  EXPECT_TRUE(res.collision_free);
  EXPECT_GE(scan_min_distance(res.trajectories), 0.3 - 1e-6);
}

TEST(Consensus, ScalarToyConverges) {
  QpProblem x1 = QpProblem::with_size(1), x2 = QpProblem::with_size(1);
  x1.A_in = Matrix::Ones(1, 1);
  x1.b_in = Vector::Ones(1);
  x2.A_in = -Matrix::Ones(1, 1);
  x2.b_in = Vector::Zero(1);
  std::vector<Vector> x = {Vector::Constant(1, 3.0), Vector::Constant(1, -2.0)};
  const auto g = WeightedGraph::complete(2);
  AlgParams params;
  // Reference: scalar iteration written out by hand.
  double a = 3.0, b = -2.0;
  for (int it = 0; it < 100; ++it) {
    const auto r = consensus_step(x, g, {x1, x2}, params);
    ASSERT_TRUE(r.ok);
    x = r.x;
    const double m = 0.5 * (a + b);
    a = std::min(m, 1.0);
    b = std::max(m, 0.0);
    EXPECT_NEAR(x[0](0), a, 1e-7);
    EXPECT_NEAR(x[1](0), b, 1e-7);
  }
  EXPECT_GE(x[0](0), -1e-7);
  EXPECT_LE(x[0](0), 1.0 + 1e-7);
  EXPECT_LE(disagreement(x), 1e-6);
}

TEST(Consensus, FeasibleAgreementIsFixedPoint) {
  QpProblem s = QpProblem::with_size(2);
  s.A_in = Matrix::Identity(2, 2);
  s.b_in = Vector::Ones(2);
  const Vector v = Vector::Constant(2, 0.5);
  const auto r = consensus_step({v, v, v}, WeightedGraph::path(3), {s, s, s}, AlgParams{});
  for (const auto& x : r.x) EXPECT_LE((x - v).norm(), 1e-8);
}

TEST(Alg1, StaggeredExchangeIsCollisionFree) {
  AlgParams params;
  const auto res = alg1_run(staggered(), params);
  EXPECT_FALSE(res.solver_failure);
  EXPECT_FALSE(res.convergence_failure);
  EXPECT_GT(res.reoptimizations, 0);
  EXPECT_GE(scan_min_distance(res.trajectories), 0.3 - 1e-6);
  EXPECT_LE(boundary_residual(res.trajectories, staggered().bcs), 1e-6);
}

// Both initial plans pass the ring center at the same sample; single-agent
// rows cannot separate them, and the run must say so rather than succeed.
TEST(Alg1, SimultaneousCenterPassageIsFlagged) {
  AlgParams params;
  params.M1 = 4;
  const auto res = alg1_run(head_on(), params);
  EXPECT_TRUE(res.convergence_failure);
  EXPECT_LT(scan_min_distance(res.trajectories), 0.3);
}

TEST(Alg1, SingleAgentNeedsNoReoptimization) {
  RunScenario sc;
  sc.bcs = {{Vec3(-2, 0, 0), Vec3::Zero(), Vec3(2, 0, 0), Vec3::Zero()}};
  sc.g_comm = WeightedGraph::complete(1);
  const auto res = alg1_run(sc, AlgParams{});
  EXPECT_EQ(res.reoptimizations, 0);
  EXPECT_LE((res.trajectories[0].pos - res.initial[0].pos).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Alg2, HeadOnReachesConsensus) {
  AlgParams params;
  params.R_active = 5.0;
  const auto res = alg2_run(head_on(), params);
  EXPECT_FALSE(res.solver_failure);
  EXPECT_FALSE(res.convergence_failure);
  EXPECT_GE(scan_min_distance(res.trajectories), 0.3 - 1e-6);
}

TEST(Alg2, NoCollisionMatchesAlg1) {
  RunScenario sc;
  sc.bcs = {{Vec3(-1.5, 0, 0), Vec3::Zero(), Vec3(2.5, 0, 0), Vec3::Zero()},
            {Vec3(-2.5, 0, 0), Vec3::Zero(), Vec3(1.5, 0, 0), Vec3::Zero()}};
  sc.g_comm = WeightedGraph::complete(2);
  const auto a1 = alg1_run(sc, AlgParams{});
  const auto a2 = alg2_run(sc, AlgParams{});
  ASSERT_EQ(a1.reoptimizations, 0);
  EXPECT_EQ(a2.reoptimizations, 0);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(a1.trajectories[i].pos, a2.trajectories[i].pos);
}

TEST(Metrics, LayeredScenarioIsReproducible) {
  const auto a = layered_scenario(8, 42), b = layered_scenario(8, 42);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(a.bcs[i].p0, b.bcs[i].p0);
  const auto res = alg1_run(a, AlgParams{});
  EXPECT_GE(min_pairwise_distance(res.trajectories), 0.3 - 1e-6);
  const auto dist = pairwise_distances(res.trajectories);
  ASSERT_EQ(dist.size(), 28u);
  EXPECT_NEAR(*std::min_element(dist[0].begin(), dist[0].end()),
              oracle::min_distance_scan(res.trajectories[0].pos, res.trajectories[1].pos), 1e-15);
}
