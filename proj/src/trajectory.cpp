#include "swarm/trajopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarm::trajopt {

Trajectory Trajectory::from_decision(const Vector& x, const Vec3& p0, const Vec3& v0, double h) {
  if (x.size() % 3 != 0) throw InvalidArgument("Trajectory: decision length must be a multiple of 3");
  if (!(h > 0.0)) throw InvalidArgument("Trajectory: h must be positive");
  const int K = static_cast<int>(x.size() / 3);
  Trajectory t;
  t.h = h;
  t.accel.resize(K, 3);
  t.pos.resize(K + 1, 3);
  t.vel.resize(K + 1, 3);
  Vec3 p = p0;
  Vec3 v = v0;
  t.pos.row(0) = p.transpose();
  t.vel.row(0) = v.transpose();
  for (int k = 0; k < K; ++k) {
    const Vec3 a = x.segment<3>(3 * k);
    t.accel.row(k) = a.transpose();
    p = p + h * v + 0.5 * h * h * a;
    v = v + h * a;
    t.pos.row(k + 1) = p.transpose();
    t.vel.row(k + 1) = v.transpose();
  }
  return t;
}

Vector Trajectory::decision() const {
  Vector x(3 * K());
  for (int k = 0; k < K(); ++k) x.segment<3>(3 * k) = accel.row(k).transpose();
  return x;
}

IntegrationMap::IntegrationMap(const Horizon& horizon) : horizon_(horizon) {
  if (horizon.K < 1 || !(horizon.h > 0.0)) throw InvalidArgument("IntegrationMap: invalid horizon");
}

double IntegrationMap::pos_coeff(int k, int t) const {
  if (t >= k) return 0.0;
  const double h = horizon_.h;
  return h * h * (static_cast<double>(k - t) - 0.5);
}

double IntegrationMap::vel_coeff(int k, int t) const { return t < k ? horizon_.h : 0.0; }

Vec3 IntegrationMap::pos_offset(int k, const Vec3& p0, const Vec3& v0) const {
  return p0 + static_cast<double>(k) * horizon_.h * v0;
}

Eigen::RowVectorXd IntegrationMap::position_row(int k, const Vec3& dir) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(horizon_.num_vars());
  for (int t = 0; t < k; ++t) row.segment<3>(3 * t) = pos_coeff(k, t) * dir.transpose();
  return row;
}

Eigen::RowVectorXd IntegrationMap::velocity_row(int k, const Vec3& dir) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(horizon_.num_vars());
  for (int t = 0; t < k; ++t) row.segment<3>(3 * t) = horizon_.h * dir.transpose();
  return row;
}

RingPose RingPose::from_normal(const Vec3& center, const Vec3& normal, double R_ring, double R_tube) {
  RingPose r;
  r.center = center;
  r.rx = normal.normalized();
  const Vec3 helper = std::abs(r.rx.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  r.ry = helper.cross(r.rx).normalized();
  r.rz = r.rx.cross(r.ry);
  r.R_ring = R_ring;
  r.R_tube = R_tube;
  r.validate();
  return r;
}

void RingPose::validate() const {
  Mat3 R;
  R << rx, ry, rz;
  if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("RingPose: axes must be orthonormal");
  if (!(R_tube > 0.0) || R_tube > R_ring) throw InvalidArgument("RingPose: require 0 < R_tube <= R_ring");
}

std::string to_string(RowKind kind) {
  switch (kind) {
    case RowKind::boundary: return "boundary";
    case RowKind::crossing: return "crossing";
    case RowKind::executed: return "executed";
    case RowKind::tube: return "tube";
    case RowKind::left_cone: return "leftCone";
    case RowKind::right_cone: return "rightCone";
    case RowKind::collision: return "collision";
    case RowKind::actuator: return "actuator";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

int ConstraintSet::count(RowKind kind) const {
  auto pred = [kind](const RowTag& t) { return t.kind == kind; };
  return static_cast<int>(std::count_if(eq_tags_.begin(), eq_tags_.end(), pred) +
                          std::count_if(in_tags_.begin(), in_tags_.end(), pred));
}

void ConstraintSet::add_eq(const Eigen::RowVectorXd& row, double rhs, RowTag tag) {
  if (row.size() != n_) throw InvalidArgument("ConstraintSet: row has wrong width");
  eq_rows_.push_back(row);
  eq_rhs_.push_back(rhs);
  eq_tags_.push_back(tag);
}

void ConstraintSet::add_in(const Eigen::RowVectorXd& row, double rhs, RowTag tag) {
  if (row.size() != n_) throw InvalidArgument("ConstraintSet: row has wrong width");
  in_rows_.push_back(row);
  in_rhs_.push_back(rhs);
  in_tags_.push_back(tag);
}

void ConstraintSet::append(const ConstraintSet& other, int col_offset) {
  if (col_offset < 0 || col_offset + other.n_ > n_) throw InvalidArgument("ConstraintSet: block out of range");
  auto lift = [&](const Eigen::RowVectorXd& r) {
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(n_);
    out.segment(col_offset, other.n_) = r;
    return out;
  };
  for (int r = 0; r < other.num_eq(); ++r) add_eq(lift(other.eq_rows_[r]), other.eq_rhs_[r], other.eq_tags_[r]);
  for (int r = 0; r < other.num_in(); ++r) add_in(lift(other.in_rows_[r]), other.in_rhs_[r], other.in_tags_[r]);
}

QpProblem ConstraintSet::to_qp(const Matrix& Q, const Vector& q) const {
  if (Q.rows() != n_ || Q.cols() != n_ || q.size() != n_) throw InvalidArgument("ConstraintSet: cost size mismatch");
  QpProblem p;
  p.Q = Q;
  p.q = q;
  p.A_eq.resize(num_eq(), n_);
  p.b_eq.resize(num_eq());
  for (int r = 0; r < num_eq(); ++r) {
    p.A_eq.row(r) = eq_rows_[r];
    p.b_eq(r) = eq_rhs_[r];
  }
  p.A_in.resize(num_in(), n_);
  p.b_in.resize(num_in());
  for (int r = 0; r < num_in(); ++r) {
    p.A_in.row(r) = in_rows_[r];
    p.b_in(r) = in_rhs_[r];
  }
  return p;
}

Vector ConstraintSet::in_slack(const Vector& x) const {
  Vector s(num_in());
  for (int r = 0; r < num_in(); ++r) s(r) = in_rhs_[r] - in_rows_[r].dot(x);
  return s;
}

Vector elastic_point(const ConstraintSet& cs, const Vector& target, double weight, const QpSettings& settings) {
  const int n = cs.num_vars();
  if (target.size() != n) throw InvalidArgument("elastic_point: target has wrong dimension");
  if (!(weight > 0.0)) throw InvalidArgument("elastic_point: weight must be positive");
  const QpProblem base = cs.to_qp(Matrix::Zero(n, n), Vector::Zero(n));
  std::vector<int> soft;
  for (int r = 0; r < cs.num_in(); ++r)
    if (cs.in_tags()[r].kind != RowKind::actuator) soft.push_back(r);
  const int ns = static_cast<int>(soft.size());
  QpProblem p = QpProblem::with_size(n + ns);
  p.Q.topLeftCorner(n, n) = 2.0 * Matrix::Identity(n, n);
  p.Q.bottomRightCorner(ns, ns) = 2.0 * weight * Matrix::Identity(ns, ns);
  p.q.head(n) = -2.0 * target;
  p.A_eq = Matrix::Zero(base.num_eq(), n + ns);
  p.A_eq.leftCols(n) = base.A_eq;
  p.b_eq = base.b_eq;
  p.A_in = Matrix::Zero(base.num_in(), n + ns);
  p.A_in.leftCols(n) = base.A_in;
  p.b_in = base.b_in;
  for (int s = 0; s < ns; ++s) p.A_in(soft[s], n + s) = -1.0;
  const QpSolution sol = solve_qp(p, settings);
  if (sol.status == QpStatus::infeasible) throw std::runtime_error("elastic_point: hard rows are infeasible");
  return sol.x.head(n);
}

// ---------------------------------------------------------------------------

Matrix jerk_cost_matrix(const Horizon& horizon) {
  const Matrix D = forward_difference_matrix(horizon.K, horizon.h, 3);
  return 2.0 * D.transpose() * D;
}

ConstraintSet boundary_constraints(const BoundaryConditions& bc, const Horizon& horizon, int agent) {
  const IntegrationMap map(horizon);
  ConstraintSet cs(horizon.num_vars());
  const int K = horizon.K;
  const Vec3 off = map.pos_offset(K, bc.p0, bc.v0);
  for (int d = 0; d < 3; ++d) {
    const Vec3 e = Vec3::Unit(d);
    cs.add_eq(map.position_row(K, e), bc.pf(d) - off(d), {RowKind::boundary, agent, -1, K});
  }
  for (int d = 0; d < 3; ++d) {
    const Vec3 e = Vec3::Unit(d);
    cs.add_eq(map.velocity_row(K, e), bc.vf(d) - bc.v0(d), {RowKind::boundary, agent, -1, K});
  }
  return cs;
}

ConstraintSet actuator_constraints(const Horizon& horizon, double a_min, double a_max, int first_step, int agent) {
  ConstraintSet cs(horizon.num_vars());
  for (int t = std::max(first_step, 0); t < horizon.K; ++t) {
    for (int d = 0; d < 3; ++d) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(horizon.num_vars());
      row(3 * t + d) = 1.0;
      cs.add_in(row, a_max, {RowKind::actuator, agent, -1, t});
      cs.add_in(-row, -a_min, {RowKind::actuator, agent, -1, t});
    }
  }
  return cs;
}

ConstraintSet executed_constraints(const Trajectory& plan, int num_steps, int agent) {
  const int n = 3 * plan.K();
  ConstraintSet cs(n);
  for (int t = 0; t < std::min(num_steps, plan.K()); ++t) {
    for (int d = 0; d < 3; ++d) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
      row(3 * t + d) = 1.0;
      cs.add_eq(row, plan.accel(t, d), {RowKind::executed, agent, -1, t});
    }
  }
  return cs;
}

namespace {

Trajectory solve_equality_plan(const ConstraintSet& cs, const BoundaryConditions& bc, const Horizon& horizon,
                               const char* what) {
  const QpProblem qp = cs.to_qp(jerk_cost_matrix(horizon), Vector::Zero(horizon.num_vars()));
  const QpSolution sol = solve_qp(qp);
  if (!sol.ok()) throw std::runtime_error(std::string(what) + ": equality-constrained plan is infeasible");
  return Trajectory::from_decision(sol.x, bc.p0, bc.v0, horizon.h);
}

}  // namespace

Trajectory straight_line(const BoundaryConditions& bc, const Horizon& horizon) {
  return solve_equality_plan(boundary_constraints(bc, horizon), bc, horizon, "straight_line");
}

int crossing_time(const Trajectory& traj, const RingPose& ring) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= traj.K(); ++k) {
    const double d = (traj.position(k) - ring.center).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

Trajectory crossing_center(const BoundaryConditions& bc, const Horizon& horizon, const RingPose& ring, int k_c,
                           double v_cross) {
  if (k_c < 1 || k_c > horizon.K - 1) throw InvalidArgument("crossing_center: k_c must lie in [1, K-1]");
  const IntegrationMap map(horizon);
  ConstraintSet cs = boundary_constraints(bc, horizon);
  const Vec3 off = map.pos_offset(k_c, bc.p0, bc.v0);
  const Vec3 v_target = v_cross * ring.rx;
  for (int d = 0; d < 3; ++d) {
    const Vec3 e = Vec3::Unit(d);
    cs.add_eq(map.position_row(k_c, e), ring.center(d) - off(d), {RowKind::crossing, -1, -1, k_c});
  }
  for (int d = 0; d < 3; ++d) {
    const Vec3 e = Vec3::Unit(d);
    cs.add_eq(map.velocity_row(k_c, e), v_target(d) - bc.v0(d), {RowKind::crossing, -1, -1, k_c});
  }
  return solve_equality_plan(cs, bc, horizon, "crossing_center");
}

double default_crossing_speed(const BoundaryConditions& bc, const Horizon& horizon, const RingPose& ring) {
  const Vec3 travel = bc.pf - bc.p0;
  const double speed = travel.norm() / horizon.duration();
  return ring.rx.dot(travel) >= 0.0 ? speed : -speed;
}

int approach_side(const RingPose& ring, const Vec3& p) { return ring.rx.dot(p - ring.center) >= 0.0 ? 1 : -1; }

ConstraintSet ring_constraints(const RingPose& ring, int k_c, const BoundaryConditions& bc, const Horizon& horizon,
                               int approach_sign, int first_free_sample, int agent) {
  if (k_c < 1 || k_c > horizon.K - 1) throw InvalidArgument("ring_constraints: k_c must lie in [1, K-1]");
  const IntegrationMap map(horizon);
  ConstraintSet cs(horizon.num_vars());
  const double s = approach_sign >= 0 ? 1.0 : -1.0;

  // w'(p[k] - r_o) <= bound, expressed over the decision vector.
  auto add = [&](int k, const Vec3& w, double bound, RowKind kind) {
    if (k < first_free_sample) return;
    const Vec3 off = map.pos_offset(k, bc.p0, bc.v0);
    cs.add_in(map.position_row(k, w), bound + w.dot(ring.center - off), {kind, agent, -1, k});
  };

  for (const Vec3& a : {ring.ry, ring.rz}) {
    add(k_c, a, ring.R_tube, RowKind::tube);
    add(k_c, -a, ring.R_tube, RowKind::tube);
  }
  for (const Vec3& a : {ring.ry, ring.rz}) {
    add(k_c - 1, a - s * ring.rx, 0.0, RowKind::left_cone);
    add(k_c - 1, -a - s * ring.rx, 0.0, RowKind::left_cone);
  }
  for (const Vec3& a : {ring.ry, ring.rz}) {
    add(k_c + 1, a + s * ring.rx, 0.0, RowKind::right_cone);
    add(k_c + 1, -a + s * ring.rx, 0.0, RowKind::right_cone);
  }
  return cs;
}

namespace {

HalfspaceRow halfspace_from_direction(const Vec3& eta, const Vec3& p_i_prev, const Vec3& p_j_prev, ConvexMode mode,
                                      double R) {
  HalfspaceRow row;
  switch (mode) {
    case ConvexMode::joint:  // eta'(p_i - p_j) >= R
      row.coef_i = -eta;
      row.coef_j = eta;
      row.rhs = -R;
      break;
    case ConvexMode::single_i:  // eta'(p_i - p_j_prev) >= R
      row.coef_i = -eta;
      row.rhs = -R - eta.dot(p_j_prev);
      break;
    case ConvexMode::single_j:  // eta'(p_i_prev - p_j) >= R
      row.coef_j = eta;
      row.rhs = eta.dot(p_i_prev) - R;
      break;
  }
  return row;
}

}  // namespace

HalfspaceRow convexify_pair(const Vec3& p_i_prev, const Vec3& p_j_prev, ConvexMode mode, double R_collision) {
  const Vec3 d = p_i_prev - p_j_prev;
  const double norm = d.norm();
  if (!(norm > 1e-12)) throw InvalidArgument("convexify_pair: previous positions coincide");
  return halfspace_from_direction(d / norm, p_i_prev, p_j_prev, mode, R_collision);
}

Vec3 separation_direction(const Trajectory& ti, const Trajectory& tj, int k, int i, int j, const Vec3& lateral) {
  const int K = std::min(ti.K(), tj.K());
  for (int off = 0; off <= K; ++off) {
    for (int kk : {k - off, k + off}) {
      if (kk < 0 || kk > K) continue;
      const Vec3 d = ti.position(kk) - tj.position(kk);
      const double n = d.norm();
      if (n > 1e-9) return d / n;
    }
  }
  return (i < j ? 1.0 : -1.0) * lateral.normalized();
}

void AlgParams::validate() const {
  if (!(R_collision > 0.0)) throw InvalidArgument("AlgParams: R_collision must be positive");
  if (!(R_active > R_collision)) throw InvalidArgument("AlgParams: R_active must exceed R_collision");
  if (M < 1 || M1 < 1 || M2 < 1) throw InvalidArgument("AlgParams: iteration caps must be >= 1");
  if (!(eps > 0.0)) throw InvalidArgument("AlgParams: eps must be positive");
  if (!(a_max > a_min)) throw InvalidArgument("AlgParams: a_max must exceed a_min");
}

// ---------------------------------------------------------------------------
// Centralized problem
// ---------------------------------------------------------------------------

namespace {

/// Adds `row` at sample k between blocks bi and bj (bj < 0 when the other
/// agent is frozen) into a stacked constraint set.
void add_halfspace(ConstraintSet& cs, const HalfspaceRow& row, int k, const IntegrationMap& map, int bi,
                   const BoundaryConditions& bc_i, int bj, const BoundaryConditions* bc_j, RowTag tag) {
  const int nk = map.horizon().num_vars();
  Eigen::RowVectorXd full = Eigen::RowVectorXd::Zero(cs.num_vars());
  double rhs = row.rhs;
  full.segment(bi * nk, nk) += map.position_row(k, row.coef_i);
  rhs -= row.coef_i.dot(map.pos_offset(k, bc_i.p0, bc_i.v0));
  if (bj >= 0 && bc_j != nullptr) {
    full.segment(bj * nk, nk) += map.position_row(k, row.coef_j);
    rhs -= row.coef_j.dot(map.pos_offset(k, bc_j->p0, bc_j->v0));
  }
  cs.add_in(full, rhs, tag);
}

}  // namespace

CentralizedProblem build_centralized(const std::vector<BoundaryConditions>& bcs, const Horizon& horizon,
                                     const std::optional<RingPose>& ring, const AlgParams& params,
                                     const std::vector<Trajectory>& previous, const CentralizedOptions& options) {
  params.validate();
  const int N = static_cast<int>(bcs.size());
  if (static_cast<int>(previous.size()) != N) throw InvalidArgument("build_centralized: need one previous plan per agent");
  const int nk = horizon.num_vars();
  const IntegrationMap map(horizon);
  CentralizedProblem out;
  out.constraints = ConstraintSet(N * nk);
  ConstraintSet& cs = out.constraints;

  for (int i = 0; i < N; ++i) cs.append(boundary_constraints(bcs[i], horizon, i), i * nk);

  if (ring) {
    for (int i = 0; i < N; ++i) {
      const int kc = std::clamp(crossing_time(previous[i], *ring), 1, horizon.K - 1);
      out.crossing_samples.push_back(kc);
      if (options.crossing_equalities) {
        const Vec3 off = map.pos_offset(kc, bcs[i].p0, bcs[i].v0);
        const double v_cross = params.v_cross.value_or(default_crossing_speed(bcs[i], horizon, *ring));
        const Vec3 vt = v_cross * ring->rx;
        for (int d = 0; d < 3; ++d) {
          Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(N * nk);
          row.segment(i * nk, nk) = map.position_row(kc, Vec3::Unit(d));
          cs.add_eq(row, ring->center(d) - off(d), {RowKind::crossing, i, -1, kc});
        }
        for (int d = 0; d < 3; ++d) {
          Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(N * nk);
          row.segment(i * nk, nk) = map.velocity_row(kc, Vec3::Unit(d));
          cs.add_eq(row, vt(d) - bcs[i].v0(d), {RowKind::crossing, i, -1, kc});
        }
      }
    }
  }

  if (options.include_collisions) {
    const Vec3 lateral = ring ? ring->ry : Vec3::UnitY();
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (i == j) continue;
        for (int k = 0; k <= horizon.K; ++k) {
          const Vec3 eta = separation_direction(previous[i], previous[j], k, i, j, lateral);
          const HalfspaceRow row =
              halfspace_from_direction(eta, previous[i].position(k), previous[j].position(k), ConvexMode::joint,
                                       params.R_collision);
          add_halfspace(cs, row, k, map, i, bcs[i], j, &bcs[j], {RowKind::collision, i, j, k});
        }
      }
    }
  }

  if (ring) {
    for (int i = 0; i < N; ++i) {
      const int kc = out.crossing_samples[i];
      cs.append(ring_constraints(*ring, kc, bcs[i], horizon, approach_side(*ring, bcs[i].p0), 1, i), i * nk);
    }
  }

  for (int i = 0; i < N; ++i) cs.append(actuator_constraints(horizon, params.a_min, params.a_max, 0, i), i * nk);

  Matrix Q = Matrix::Zero(N * nk, N * nk);
  const Matrix Qi = jerk_cost_matrix(horizon);
  for (int i = 0; i < N; ++i) Q.block(i * nk, i * nk, nk, nk) = Qi;
  out.qp = cs.to_qp(Q, Vector::Zero(N * nk));
  return out;
}

CentralizedResult solve_centralized(const std::vector<BoundaryConditions>& bcs, const Horizon& horizon,
                                    const std::optional<RingPose>& ring, const AlgParams& params,
                                    const CentralizedOptions& options, int max_rounds) {
  const int N = static_cast<int>(bcs.size());
  const int nk = horizon.num_vars();
  std::vector<Trajectory> prev;
  for (int i = 0; i < N; ++i) {
    Trajectory t = straight_line(bcs[i], horizon);
    if (ring && options.crossing_equalities) {
      const int kc = std::clamp(crossing_time(t, *ring), 1, horizon.K - 1);
      t = crossing_center(bcs[i], horizon, *ring, kc,
                          params.v_cross.value_or(default_crossing_speed(bcs[i], horizon, *ring)));
    }
    prev.push_back(std::move(t));
  }
  CentralizedResult res;
  for (int round = 0; round < max_rounds; ++round) {
    const CentralizedProblem prob = build_centralized(bcs, horizon, ring, params, prev, options);
    Vector warm(N * nk);
    for (int i = 0; i < N; ++i) warm.segment(i * nk, nk) = prev[i].decision();
    const QpSolution sol = solve_qp(prob.qp, params.qp, warm);
    res.status = sol.status;
    res.rounds = round + 1;
    for (int i = 0; i < N; ++i)
      prev[i] = Trajectory::from_decision(sol.x.segment(i * nk, nk), bcs[i].p0, bcs[i].v0, horizon.h);
    if (!sol.ok() && sol.status != QpStatus::infeasible) break;
    res.collision_free = min_pairwise_distance(prev) >= params.R_collision - params.detection_slack;
    if (sol.ok() && res.collision_free) break;
  }
  res.trajectories = std::move(prev);
  return res;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double min_pairwise_distance(const std::vector<Trajectory>& trajs) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trajs.size(); ++i)
    for (std::size_t j = i + 1; j < trajs.size(); ++j)
      for (int k = 0; k <= std::min(trajs[i].K(), trajs[j].K()); ++k)
        best = std::min(best, (trajs[i].position(k) - trajs[j].position(k)).norm());
  return best;
}

std::vector<std::vector<double>> pairwise_distances(const std::vector<Trajectory>& trajs) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < trajs.size(); ++i)
    for (std::size_t j = i + 1; j < trajs.size(); ++j) {
      std::vector<double> series;
      for (int k = 0; k <= std::min(trajs[i].K(), trajs[j].K()); ++k)
        series.push_back((trajs[i].position(k) - trajs[j].position(k)).norm());
      out.push_back(std::move(series));
    }
  return out;
}

double boundary_residual(const std::vector<Trajectory>& trajs, const std::vector<BoundaryConditions>& bcs) {
  double r = 0.0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const int K = trajs[i].K();
    r = std::max({r, (trajs[i].position(0) - bcs[i].p0).cwiseAbs().maxCoeff(),
                  (trajs[i].velocity(0) - bcs[i].v0).cwiseAbs().maxCoeff(),
                  (trajs[i].position(K) - bcs[i].pf).cwiseAbs().maxCoeff(),
                  (trajs[i].velocity(K) - bcs[i].vf).cwiseAbs().maxCoeff()});
  }
  return r;
}

std::vector<CrossingCheck> crossing_checks(const std::vector<Trajectory>& trajs, const RingPose& ring) {
  std::vector<CrossingCheck> out;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    CrossingCheck c;
    c.agent = static_cast<int>(i);
    c.k_c = crossing_time(trajs[i], ring);
    const Vec3 d = trajs[i].position(c.k_c) - ring.center;
    c.lateral_y = std::abs(ring.ry.dot(d));
    c.lateral_z = std::abs(ring.rz.dot(d));
    c.radial = std::hypot(c.lateral_y, c.lateral_z);
    out.push_back(c);
  }
  return out;
}

}  // namespace swarm::trajopt
