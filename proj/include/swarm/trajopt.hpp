#pragma once

#include "swarm/graph.hpp"
#include "swarm/numerics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace swarm::trajopt {

/// Discretization of the planning horizon: K acceleration steps of h seconds.
struct Horizon {
  int K = 40;
  double h = 0.15;

  int num_vars() const { return 3 * K; }
  double duration() const { return K * h; }
};

/// Initial and final state of one agent.
struct BoundaryConditions {
  Vec3 p0 = Vec3::Zero();
  Vec3 v0 = Vec3::Zero();
  Vec3 pf = Vec3::Zero();
  Vec3 vf = Vec3::Zero();
};

/// Piecewise-constant acceleration plan and its integrated samples.
///
/// The decision vector stacks accelerations per step, x[3k + d]. Samples use
/// exact zero-order-hold kinematics:
///   p[k+1] = p[k] + h v[k] + h^2/2 a[k],   v[k+1] = v[k] + h a[k].
struct Trajectory {
  Matrix accel;  ///< K x 3
  Matrix pos;    ///< (K+1) x 3
  Matrix vel;    ///< (K+1) x 3
  double h = 0.0;

  static Trajectory from_decision(const Vector& x, const Vec3& p0, const Vec3& v0, double h);

  int K() const { return static_cast<int>(accel.rows()); }
  Vector decision() const;
  Vec3 position(int k) const { return pos.row(k).transpose(); }
  Vec3 velocity(int k) const { return vel.row(k).transpose(); }
};

/// Linear map from the decision vector to sampled positions and velocities.
class IntegrationMap {
 public:
  explicit IntegrationMap(const Horizon& horizon);

  /// Coefficient of a[t] in p[k] (scalar, same on every axis).
  double pos_coeff(int k, int t) const;
  /// Coefficient of a[t] in v[k].
  double vel_coeff(int k, int t) const;
  /// Part of p[k] not depending on the accelerations.
  Vec3 pos_offset(int k, const Vec3& p0, const Vec3& v0) const;

  /// Row vector c (length 3K) with dir' p[k] = c x + dir' pos_offset(k).
  Eigen::RowVectorXd position_row(int k, const Vec3& dir) const;
  Eigen::RowVectorXd velocity_row(int k, const Vec3& dir) const;

  const Horizon& horizon() const { return horizon_; }

 private:
  Horizon horizon_;
};

/// Reference frame attached to an opening: r_x is the passage normal.
struct RingPose {
  Vec3 center = Vec3::Zero();
  Vec3 rx = Vec3::UnitX();
  Vec3 ry = Vec3::UnitY();
  Vec3 rz = Vec3::UnitZ();
  double R_ring = 0.6;
  double R_tube = 0.3;

  /// Builds an orthonormal frame around the given normal.
  static RingPose from_normal(const Vec3& center, const Vec3& normal, double R_ring, double R_tube);
  void validate() const;
};

enum class RowKind { boundary, crossing, executed, tube, left_cone, right_cone, collision, actuator };
std::string to_string(RowKind kind);

struct RowTag {
  RowKind kind = RowKind::boundary;
  int agent = -1;
  int other = -1;
  int k = -1;
};

/// Linear constraint rows over a decision vector of fixed size, one tag per row.
class ConstraintSet {
 public:
  explicit ConstraintSet(int num_vars = 0) : n_(num_vars) {}

  int num_vars() const { return n_; }
  int num_eq() const { return static_cast<int>(eq_rows_.size()); }
  int num_in() const { return static_cast<int>(in_rows_.size()); }
  int count(RowKind kind) const;

  void add_eq(const Eigen::RowVectorXd& row, double rhs, RowTag tag);
  /// row x <= rhs
  void add_in(const Eigen::RowVectorXd& row, double rhs, RowTag tag);
  /// Appends rows of `other` with its columns shifted by `col_offset`.
  void append(const ConstraintSet& other, int col_offset = 0);

  const std::vector<RowTag>& eq_tags() const { return eq_tags_; }
  const std::vector<RowTag>& in_tags() const { return in_tags_; }

  /// Constraint block with the given cost.
  QpProblem to_qp(const Matrix& Q, const Vector& q) const;
  /// Per-row slack b - A x of the inequality block.
  Vector in_slack(const Vector& x) const;

 private:
  int n_;
  std::vector<Eigen::RowVectorXd> eq_rows_;
  std::vector<double> eq_rhs_;
  std::vector<RowTag> eq_tags_;
  std::vector<Eigen::RowVectorXd> in_rows_;
  std::vector<double> in_rhs_;
  std::vector<RowTag> in_tags_;
};

/// Least-violating point for re-linearization: minimizes
/// ||x - target||^2 + weight ||s||^2 with every non-actuator inequality
/// row relaxed to  row x - s <= rhs  (equalities and the box stay hard).
Vector elastic_point(const ConstraintSet& cs, const Vector& target, double weight, const QpSettings& settings = {});

/// Quadratic form 2 D'D of the squared forward-difference (jerk) cost.
Matrix jerk_cost_matrix(const Horizon& horizon);

/// Final position and velocity equalities (6 rows).
ConstraintSet boundary_constraints(const BoundaryConditions& bc, const Horizon& horizon, int agent = -1);

/// Per-axis acceleration box on steps first_step..K-1 (6 rows per step).
ConstraintSet actuator_constraints(const Horizon& horizon, double a_min, double a_max, int first_step = 0,
                                   int agent = -1);

/// Equalities freezing steps 0..num_steps-1 at the given plan.
ConstraintSet executed_constraints(const Trajectory& plan, int num_steps, int agent = -1);

/// Minimum-jerk plan meeting only the boundary equalities.
Trajectory straight_line(const BoundaryConditions& bc, const Horizon& horizon);

/// Index of the sample nearest the ring center; ties resolve to the smallest index.
int crossing_time(const Trajectory& traj, const RingPose& ring);

/// Minimum-jerk plan that also passes r_o at k_c with velocity v_cross * r_x.
Trajectory crossing_center(const BoundaryConditions& bc, const Horizon& horizon, const RingPose& ring, int k_c,
                           double v_cross);

/// Signed crossing speed along r_x: mean straight-line speed, oriented with the travel direction.
double default_crossing_speed(const BoundaryConditions& bc, const Horizon& horizon, const RingPose& ring);

/// +1 when p lies on the +r_x side of the ring plane, -1 otherwise.
int approach_side(const RingPose& ring, const Vec3& p);

/// Tube rows at k_c and cone rows at k_c -/+ 1 over one agent's 3K block.
/// `approach_sign` = +1 means the agent arrives from the +r_x side (cone
/// before the crossing opens toward +r_x). Rows on samples below
/// `first_free_sample` are omitted since they cannot be changed.
ConstraintSet ring_constraints(const RingPose& ring, int k_c, const BoundaryConditions& bc, const Horizon& horizon,
                               int approach_sign = 1, int first_free_sample = 1, int agent = -1);

enum class ConvexMode { joint, single_i, single_j };

/// coef_i' p_i + coef_j' p_j <= rhs
struct HalfspaceRow {
  Vec3 coef_i = Vec3::Zero();
  Vec3 coef_j = Vec3::Zero();
  double rhs = 0.0;

  double eval(const Vec3& p_i, const Vec3& p_j) const { return coef_i.dot(p_i) + coef_j.dot(p_j) - rhs; }
};

/// Linearized collision constraint around previous positions. Throws when the
/// previous points coincide.
HalfspaceRow convexify_pair(const Vec3& p_i_prev, const Vec3& p_j_prev, ConvexMode mode, double R_collision);

/// Separation direction of agents i and j at sample k of their plans. When the
/// positions coincide the nearest sample with distinct positions is used, and
/// if the plans coincide everywhere a fixed lateral axis signed by id.
Vec3 separation_direction(const Trajectory& ti, const Trajectory& tj, int k, int i, int j, const Vec3& lateral);

struct AlgParams {
  double R_collision = 0.3;
  double R_active = 1.0;
  int M = 200;   ///< consensus iteration cap for consensus_step drivers
  int M1 = 10;   ///< alg1 repetition cap per flight step
  int M2 = 50;   ///< alg2 consensus cap per flight step
  double eps = 1e-3;
  double a_min = -5.0;
  double a_max = 5.0;
  double alpha_m = 0.0;
  std::optional<double> v_cross;        ///< signed crossing speed; per-agent default when unset
  double detection_slack = 1e-7;        ///< collision predicate uses R_collision - slack
  int reconvexify = 2;                  ///< extra linearizations after an infeasible projection
  double elastic_weight = 1e3;          ///< slack penalty of the elastic re-linearization point
  bool record_transcript = false;       ///< keep the JSONL message transcript in the result
  int threads = 1;                      ///< worker threads for per-agent solves within a round
  QpSettings qp;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Centralized problem
// ---------------------------------------------------------------------------

struct CentralizedOptions {
  bool crossing_equalities = true;
  bool include_collisions = true;
};

struct CentralizedProblem {
  QpProblem qp;
  ConstraintSet constraints{0};
  std::vector<int> crossing_samples;
};

/// Stacked problem over all agents (3NK variables): jerk cost, boundary and
/// crossing equalities, joint collision rows for every ordered pair and every
/// sample, ring rows and the actuator box. `previous` supplies the
/// convexification points and crossing samples.
CentralizedProblem build_centralized(const std::vector<BoundaryConditions>& bcs, const Horizon& horizon,
                                     const std::optional<RingPose>& ring, const AlgParams& params,
                                     const std::vector<Trajectory>& previous, const CentralizedOptions& options = {});

/// Sequential convex iteration of build_centralized until collision free
/// (or `max_rounds` solves). Returns the last solution.
struct CentralizedResult {
  std::vector<Trajectory> trajectories;
  int rounds = 0;
  bool collision_free = false;
  QpStatus status = QpStatus::max_iter;
};
CentralizedResult solve_centralized(const std::vector<BoundaryConditions>& bcs, const Horizon& horizon,
                                    const std::optional<RingPose>& ring, const AlgParams& params,
                                    const CentralizedOptions& options = {}, int max_rounds = 10);

// ---------------------------------------------------------------------------
// Distributed projected consensus
// ---------------------------------------------------------------------------

enum class WeightRule { neighbors_plus_one, metropolis };

/// Row-stochastic averaging weights over N_i plus self.
Matrix consensus_weights(const WeightedGraph& g, WeightRule rule = WeightRule::neighbors_plus_one);

struct ConsensusStepResult {
  std::vector<Vector> x;
  bool ok = true;
  int failed_agent = -1;  ///< agent whose projection was infeasible
};

/// x_i <- P_{X_i}[ sum_j a_ij x_j - alpha d_i ] for every agent. `subgradients`
/// may be empty (alpha = 0).
ConsensusStepResult consensus_step(const std::vector<Vector>& x_locals, const WeightedGraph& g_comm,
                                   const std::vector<QpProblem>& sets, const AlgParams& params,
                                   WeightRule rule = WeightRule::neighbors_plus_one,
                                   const std::vector<Vector>& subgradients = {});

/// max_{i,j} ||x_i - x_j||.
double disagreement(const std::vector<Vector>& x_locals);

// ---------------------------------------------------------------------------
// Algorithms 1 and 2
// ---------------------------------------------------------------------------

enum class EventKind { reopt, accept, consensus_iter, failure };
std::string to_string(EventKind kind);

struct AlgEvent {
  int step = 0;
  int agent = 0;  ///< 0-based
  EventKind kind = EventKind::reopt;
  int constraint_count = 0;
  int partners = 0;
  int solve_iters = 0;
  double solve_time = 0.0;  ///< wall seconds; not part of deterministic output
};

struct AlgResult {
  std::vector<Trajectory> trajectories;  ///< executed plans
  std::vector<Trajectory> initial;       ///< crossing-center initial solutions
  std::vector<AlgEvent> events;
  std::vector<int> crossing_samples;
  bool convergence_failure = false;
  bool solver_failure = false;
  int reoptimizations = 0;
  int rounds = 0;
  std::uint64_t transcript_hash = 0;
  std::uint64_t messages = 0;
  double total_solve_time = 0.0;
  double time_normalizer = 1.0;  ///< M1 * N for alg1, N for the baseline
  std::string transcript;        ///< JSONL, only when AlgParams::record_transcript

  /// Mean obstacle-set size over re-optimizations (0 if none).
  double mean_partners() const;
  /// Per-agent average optimization time, T_total / time_normalizer.
  double mean_solve_time() const { return total_solve_time / time_normalizer; }
};

struct RunScenario {
  std::vector<BoundaryConditions> bcs;
  Horizon horizon;
  RingPose ring;
  WeightedGraph g_comm;
};

/// Initial solutions: straight line, crossing sample, crossing-center refinement.
std::vector<Trajectory> initial_solutions(const RunScenario& scenario, const AlgParams& params,
                                          std::vector<int>* crossing_samples = nullptr);

AlgResult alg1_run(const RunScenario& scenario, const AlgParams& params);
AlgResult alg2_run(const RunScenario& scenario, const AlgParams& params);

/// Pre-flight decentralized baseline: every agent re-plans against all N-1
/// other trajectories until collision free or the repetition cap.
AlgResult baseline_run(const RunScenario& scenario, const AlgParams& params);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Minimum pairwise distance over all samples.
double min_pairwise_distance(const std::vector<Trajectory>& trajs);
/// Pairwise distance series d_ij[k] for i < j, in lexicographic pair order.
std::vector<std::vector<double>> pairwise_distances(const std::vector<Trajectory>& trajs);
/// Largest boundary-condition residual over agents.
double boundary_residual(const std::vector<Trajectory>& trajs, const std::vector<BoundaryConditions>& bcs);
/// Ring-plane lateral offsets |r_y'(p - r_o)|, |r_z'(p - r_o)| of each agent's crossing sample.
struct CrossingCheck {
  int agent = 0;
  int k_c = 0;
  double lateral_y = 0.0;
  double lateral_z = 0.0;
  double radial = 0.0;
};
std::vector<CrossingCheck> crossing_checks(const std::vector<Trajectory>& trajs, const RingPose& ring);

struct CompareRow {
  int N = 0;
  double baseline_partners = 0.0;
  double alg1_partners = 0.0;
  double baseline_time = 0.0;
  double alg1_time = 0.0;
  int alg1_failures = 0;
  int baseline_failures = 0;
};

/// Generates the layered crossing scenario used by the compare mode.
RunScenario layered_scenario(int N, std::uint64_t seed, double jitter = 0.05);

/// Runs baseline and alg1 `repetitions` times per agent count.
std::vector<CompareRow> compare_runs(const std::vector<int>& agent_counts, int repetitions, std::uint64_t seed,
                                     const AlgParams& params);

}  // namespace swarm::trajopt
