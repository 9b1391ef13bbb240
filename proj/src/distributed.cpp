#include "swarm/simnet.hpp"
#include "swarm/trajopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

namespace swarm::trajopt {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::reopt: return "reopt";
    case EventKind::accept: return "accept";
    case EventKind::consensus_iter: return "consensus_iter";
    case EventKind::failure: return "failure";
  }
  return "unknown";
}

double AlgResult::mean_partners() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : events)
    if (e.kind == EventKind::reopt) {
      sum += e.partners;
      ++n;
    }
  return n == 0 ? 0.0 : sum / n;
}

Matrix consensus_weights(const WeightedGraph& g, WeightRule rule) {
  const int n = g.num_nodes();
  Matrix W = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (rule == WeightRule::neighbors_plus_one) {
      const double w = 1.0 / (g.degree(i) + 1);
      W(i, i) = w;
      for (int j : g.neighbors(i)) W(i, j) = w;
    } else {
      double off = 0.0;
      for (int j : g.neighbors(i)) {
        W(i, j) = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
        off += W(i, j);
      }
      W(i, i) = 1.0 - off;
    }
  }
  return W;
}

ConsensusStepResult consensus_step(const std::vector<Vector>& x_locals, const WeightedGraph& g_comm,
                                   const std::vector<QpProblem>& sets, const AlgParams& params, WeightRule rule,
                                   const std::vector<Vector>& subgradients) {
  const int n = static_cast<int>(x_locals.size());
  if (g_comm.num_nodes() != n || static_cast<int>(sets.size()) != n)
    throw InvalidArgument("consensus_step: one copy and one set per agent required");
  if (!subgradients.empty() && static_cast<int>(subgradients.size()) != n)
    throw InvalidArgument("consensus_step: subgradient count mismatch");
  const Matrix W = consensus_weights(g_comm, rule);
  ConsensusStepResult out;
  out.x.resize(n);
  for (int i = 0; i < n; ++i) {
    Vector avg = W(i, i) * x_locals[i];
    for (int j : g_comm.neighbors(i)) avg += W(i, j) * x_locals[j];
    if (!subgradients.empty()) avg -= params.alpha_m * subgradients[i];
    const QpSolution sol = project_onto(sets[i], avg, params.qp);
    if (!sol.ok()) {
      if (out.ok) out.failed_agent = i;
      out.ok = false;
      out.x[i] = x_locals[i];
    } else {
      out.x[i] = sol.x;
    }
  }
  return out;
}

double disagreement(const std::vector<Vector>& x_locals) {
  double d = 0.0;
  for (std::size_t i = 0; i < x_locals.size(); ++i)
    for (std::size_t j = i + 1; j < x_locals.size(); ++j) d = std::max(d, (x_locals[i] - x_locals[j]).norm());
  return d;
}

std::vector<Trajectory> initial_solutions(const RunScenario& scenario, const AlgParams& params,
                                          std::vector<int>* crossing_samples) {
  std::vector<Trajectory> out;
  if (crossing_samples) crossing_samples->clear();
  for (const auto& bc : scenario.bcs) {
    const Trajectory line = straight_line(bc, scenario.horizon);
    const int kc = std::clamp(crossing_time(line, scenario.ring), 1, scenario.horizon.K - 1);
    const double v = params.v_cross.value_or(default_crossing_speed(bc, scenario.horizon, scenario.ring));
    out.push_back(crossing_center(bc, scenario.horizon, scenario.ring, kc, v));
    if (crossing_samples) crossing_samples->push_back(kc);
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Runs fn(idx) for idx in [0, n) over `threads` workers. Each index writes
/// only its own output slot, so the result does not depend on the schedule.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

/// Each agent's own plan and its view of everyone else's, kept consistent
/// through versioned blocks relayed over the network.
class Fleet {
 public:
  Fleet(const RunScenario& sc, const std::vector<Trajectory>& initial, std::vector<AlgEvent>* events, bool record)
      : sc_(sc), net_(sc.g_comm, record), events_(events) {
    const int N = size();
    if (sc.g_comm.num_nodes() != N) throw InvalidArgument("scenario: communication graph size mismatch");
    stores_.assign(N, simnet::VersionStore(N));
    views_.assign(N, std::vector<Trajectory>(N));
    frontier_.assign(N, {});
    for (int i = 0; i < N; ++i) publish(i, initial[i]);
  }

  int size() const { return static_cast<int>(sc_.bcs.size()); }
  const Trajectory& own(int i) const { return views_[i][i]; }
  const Trajectory& view(int i, int j) const { return views_[i][j]; }
  bool knows(int i, int j) const { return stores_[i].has(j); }
  simnet::Network& net() { return net_; }

  void publish(int i, const Trajectory& plan) {
    simnet::TrajectoryBlock b{i, i, stores_[i].version(i) + 1, plan.decision()};
    stores_[i].offer(b);
    views_[i][i] = plan;
    frontier_[i].push_back(i);
  }

  /// Floods pending blocks until no agent adopts anything new. Returns rounds used.
  int disseminate(int step) {
    int rounds = 0;
    const int N = size();
    while (std::any_of(frontier_.begin(), frontier_.end(), [](const auto& f) { return !f.empty(); })) {
      for (int i = 0; i < N; ++i) {
        for (int origin : frontier_[i]) {
          simnet::TrajectoryBlock b = stores_[i].get(origin);
          b.holder = i;
          net_.broadcast_to_neighbors(i, b);
        }
        frontier_[i].clear();
      }
      net_.seal_all();
      net_.advance_round();
      ++rounds;
      for (int i = 0; i < N; ++i) {
        for (const auto& msg : net_.inbox(i)) {
          const auto& b = std::get<simnet::TrajectoryBlock>(msg.payload);
          if (b.origin == i || !stores_[i].offer(b)) continue;
          const auto& bc = sc_.bcs[b.origin];
          views_[i][b.origin] = Trajectory::from_decision(b.accel, bc.p0, bc.v0, sc_.horizon.h);
          frontier_[i].push_back(b.origin);
          if (events_ && step >= 0) events_->push_back({step, i, EventKind::accept, 0, 0, 0, 0.0});
        }
      }
    }
    return rounds;
  }

 private:
  const RunScenario& sc_;
  simnet::Network net_;
  std::vector<AlgEvent>* events_;
  std::vector<simnet::VersionStore> stores_;
  std::vector<std::vector<Trajectory>> views_;
  std::vector<std::vector<int>> frontier_;
};

bool predicts_collision(const Trajectory& a, const Trajectory& b, int first_sample, const AlgParams& params) {
  const double limit = params.R_collision - params.detection_slack;
  for (int k = std::max(first_sample, 0); k <= std::min(a.K(), b.K()); ++k)
    if ((a.position(k) - b.position(k)).norm() < limit) return true;
  return false;
}

struct ReoptOutcome {
  Trajectory plan;
  bool ok = false;
  bool infeasible = false;  ///< local set empty: keep the old plan, retry next iteration
  int collision_rows = 0;
  int total_rows = 0;
  int iterations = 0;
  double seconds = 0.0;
};

/// Projects agent i's plan onto its local set: boundary and executed
/// equalities, ring rows on free samples, single-mode rows against frozen
/// obstacle plans on samples after `step`, and the actuator box.
ReoptOutcome reoptimize(const RunScenario& sc, const AlgParams& params, int i, int step, const Trajectory& prev,
                        const std::vector<std::pair<int, const Trajectory*>>& obstacles) {
  const Horizon& H = sc.horizon;
  const BoundaryConditions& bc = sc.bcs[i];
  const IntegrationMap map(H);
  const int side = approach_side(sc.ring, bc.p0);
  ReoptOutcome out;
  out.plan = prev;
  Trajectory lin = prev;  // linearization point
  const auto t0 = Clock::now();
  for (int attempt = 0; attempt <= params.reconvexify; ++attempt) {
    ConstraintSet cs = boundary_constraints(bc, H, i);
    cs.append(executed_constraints(prev, step, i));
    const int kc = std::clamp(crossing_time(lin, sc.ring), 1, H.K - 1);
    cs.append(ring_constraints(sc.ring, kc, bc, H, side, step + 1, i));
    for (const auto& [j, other] : obstacles) {
      for (int k = step + 1; k <= H.K; ++k) {
        const Vec3 eta = separation_direction(lin, *other, k, i, j, sc.ring.ry);
        // eta'(p_i[k] - p_j_prev[k]) >= R
        const Vec3 off = map.pos_offset(k, bc.p0, bc.v0);
        cs.add_in(map.position_row(k, -eta), -params.R_collision - eta.dot(other->position(k)) + eta.dot(off),
                  {RowKind::collision, i, j, k});
      }
    }
    cs.append(actuator_constraints(H, params.a_min, params.a_max, step, i));
    const Vector x_prev = prev.decision();
    const QpSolution sol = project_onto(cs.to_qp(Matrix::Zero(H.num_vars(), H.num_vars()), Vector::Zero(H.num_vars())),
                                        x_prev, params.qp);
    out.collision_rows = cs.count(RowKind::collision);
    out.total_rows = cs.num_eq() + cs.num_in();
    out.iterations += sol.iterations;
    out.infeasible = sol.status == QpStatus::infeasible;
    if (sol.ok()) {
      out.plan = Trajectory::from_decision(sol.x, bc.p0, bc.v0, H.h);
      out.ok = true;
      break;
    }
    // Re-linearize around the least-violating point of the current rows.
    const Vector xr = elastic_point(cs, x_prev, params.elastic_weight, params.qp);
    lin = Trajectory::from_decision(xr, bc.p0, bc.v0, H.h);
  }
  out.seconds = seconds_since(t0);
  return out;
}

}  // namespace

AlgResult alg1_run(const RunScenario& scenario, const AlgParams& params) {
  params.validate();
  const int N = static_cast<int>(scenario.bcs.size());
  const int K = scenario.horizon.K;
  AlgResult res;
  res.initial = initial_solutions(scenario, params, &res.crossing_samples);
  res.time_normalizer = static_cast<double>(params.M1) * std::max(N, 1);
  Fleet fleet(scenario, res.initial, &res.events, params.record_transcript);
  res.rounds += fleet.disseminate(-1);

  for (int k = 0; k < K; ++k) {
    for (int m = 0;; ++m) {
      std::vector<std::vector<int>> obstacles(N);
      std::vector<int> colliding;
      for (int i = 0; i < N; ++i) {
        bool hit = false;
        for (int j = 0; j < N; ++j) {
          if (j == i || !fleet.knows(i, j)) continue;
          if ((fleet.own(i).position(k) - fleet.view(i, j).position(k)).norm() > params.R_active) continue;
          obstacles[i].push_back(j);
          hit = hit || predicts_collision(fleet.own(i), fleet.view(i, j), k + 1, params);
        }
        if (hit) colliding.push_back(i);
      }
      if (colliding.empty()) break;
      if (m == params.M1) {
        res.convergence_failure = true;
        for (int i : colliding)
          res.events.push_back({k, i, EventKind::failure, 0, static_cast<int>(obstacles[i].size()), 0, 0.0});
        break;
      }
      std::vector<ReoptOutcome> outcomes(colliding.size());
      parallel_for(static_cast<int>(colliding.size()), params.threads, [&](int idx) {
        const int i = colliding[idx];
        std::vector<std::pair<int, const Trajectory*>> obs;
        for (int j : obstacles[i]) obs.emplace_back(j, &fleet.view(i, j));
        outcomes[idx] = reoptimize(scenario, params, i, k, fleet.own(i), obs);
      });
      for (std::size_t idx = 0; idx < colliding.size(); ++idx) {
        const int i = colliding[idx];
        const ReoptOutcome& o = outcomes[idx];
        ++res.reoptimizations;
        res.total_solve_time += o.seconds;
        res.events.push_back({k, i, o.ok ? EventKind::reopt : EventKind::failure, o.collision_rows,
                              static_cast<int>(obstacles[i].size()), o.iterations, o.seconds});
        if (o.ok) fleet.publish(i, o.plan);
        else if (!o.infeasible) res.solver_failure = true;
      }
      res.rounds += fleet.disseminate(k);
    }
  }
  for (int i = 0; i < N; ++i) res.trajectories.push_back(fleet.own(i));
  res.transcript_hash = fleet.net().transcript_hash();
  res.messages = fleet.net().messages_delivered();
  if (params.record_transcript) {
    std::ostringstream os;
    fleet.net().write_transcript(os);
    res.transcript = os.str();
  }
  return res;
}

namespace {

/// Local joint problem of agent i in one consensus episode.
struct JointLocal {
  std::vector<int> blocks;  ///< agent ids, ascending, includes i
  QpProblem set;
  Vector x;

  int slot(int agent) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), agent);
    return (it != blocks.end() && *it == agent) ? static_cast<int>(it - blocks.begin()) : -1;
  }
};

JointLocal build_joint(const RunScenario& sc, const AlgParams& params, int i, int step, const std::vector<int>& partners,
                       const std::vector<int>& frozen, const std::function<const Trajectory&(int)>& view) {
  const Horizon& H = sc.horizon;
  const int nk = H.num_vars();
  const IntegrationMap map(H);
  JointLocal jl;
  jl.blocks = partners;
  jl.blocks.push_back(i);
  std::sort(jl.blocks.begin(), jl.blocks.end());
  const int nb = static_cast<int>(jl.blocks.size());
  ConstraintSet cs(nb * nk);
  jl.x.resize(nb * nk);
  for (int s = 0; s < nb; ++s) {
    const int b = jl.blocks[s];
    const Trajectory& tb = view(b);
    jl.x.segment(s * nk, nk) = tb.decision();
    cs.append(boundary_constraints(sc.bcs[b], H, b), s * nk);
    cs.append(executed_constraints(tb, step, b), s * nk);
    cs.append(actuator_constraints(H, params.a_min, params.a_max, step, b), s * nk);
  }
  const int si = jl.slot(i);
  const Trajectory& ti = view(i);
  const BoundaryConditions& bci = sc.bcs[i];
  const int kc = std::clamp(crossing_time(ti, sc.ring), 1, H.K - 1);
  cs.append(ring_constraints(sc.ring, kc, bci, H, approach_side(sc.ring, bci.p0), step + 1, i), si * nk);
  for (int j : partners) {
    const int sj = jl.slot(j);
    const Trajectory& tj = view(j);
    const BoundaryConditions& bcj = sc.bcs[j];
    for (int k = step + 1; k <= H.K; ++k) {
      const Vec3 eta = separation_direction(ti, tj, k, i, j, sc.ring.ry);
      // eta'(p_i[k] - p_j[k]) >= R
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nb * nk);
      row.segment(si * nk, nk) = map.position_row(k, -eta);
      row.segment(sj * nk, nk) = map.position_row(k, eta);
      const double rhs = -params.R_collision + eta.dot(map.pos_offset(k, bci.p0, bci.v0)) -
                         eta.dot(map.pos_offset(k, bcj.p0, bcj.v0));
      cs.add_in(row, rhs, {RowKind::collision, i, j, k});
    }
  }
  for (int j : frozen) {
    const Trajectory& tj = view(j);
    for (int k = step + 1; k <= H.K; ++k) {
      const Vec3 eta = separation_direction(ti, tj, k, i, j, sc.ring.ry);
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nb * nk);
      row.segment(si * nk, nk) = map.position_row(k, -eta);
      cs.add_in(row, -params.R_collision - eta.dot(tj.position(k)) + eta.dot(map.pos_offset(k, bci.p0, bci.v0)),
                {RowKind::collision, i, j, k});
    }
  }
  jl.set = cs.to_qp(Matrix::Zero(nb * nk, nb * nk), Vector::Zero(nb * nk));
  return jl;
}

}  // namespace

AlgResult alg2_run(const RunScenario& scenario, const AlgParams& params) {
  params.validate();
  const int N = static_cast<int>(scenario.bcs.size());
  const int K = scenario.horizon.K;
  const int nk = scenario.horizon.num_vars();
  AlgResult res;
  res.initial = initial_solutions(scenario, params, &res.crossing_samples);
  res.time_normalizer = static_cast<double>(params.M1) * std::max(N, 1);
  Fleet fleet(scenario, res.initial, &res.events, params.record_transcript);
  res.rounds += fleet.disseminate(-1);

  for (int k = 0; k < K; ++k) {
    for (int rep = 0;; ++rep) {
      std::vector<std::vector<int>> obstacles(N);
      std::vector<bool> colliding(N, false);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          if (j == i || !fleet.knows(i, j)) continue;
          if ((fleet.own(i).position(k) - fleet.view(i, j).position(k)).norm() > params.R_active) continue;
          obstacles[i].push_back(j);
          if (predicts_collision(fleet.own(i), fleet.view(i, j), k + 1, params)) colliding[i] = true;
        }
      std::vector<int> involved;
      for (int i = 0; i < N; ++i)
        if (colliding[i]) involved.push_back(i);
      if (involved.empty()) break;
      if (rep == params.M1) {
        res.convergence_failure = true;
        for (int i : involved)
          res.events.push_back({k, i, EventKind::failure, 0, static_cast<int>(obstacles[i].size()), 0, 0.0});
        break;
      }

      // Joint partners are colliding obstacles we can talk to; the rest stay frozen.
      std::vector<JointLocal> locals(N);
      std::vector<std::vector<int>> partners(N);
      std::vector<std::uint8_t> proj_ok(N, 1);
      std::vector<int> iters(N, 0);
      std::vector<double> secs(N, 0.0);
      for (int i : involved) {
        std::vector<int> frozen;
        for (int j : obstacles[i]) {
          if (colliding[j] && scenario.g_comm.has_edge(i, j)) partners[i].push_back(j);
          else frozen.push_back(j);
        }
        locals[i] = build_joint(scenario, params, i, k, partners[i], frozen,
                                [&](int b) -> const Trajectory& { return fleet.view(i, b); });
      }

      auto project_all = [&](const std::vector<Vector>& targets) {
        parallel_for(static_cast<int>(involved.size()), params.threads, [&](int idx) {
          const int i = involved[idx];
          const auto t0 = Clock::now();
          const QpSolution sol = project_onto(locals[i].set, targets[i], params.qp);
          secs[i] += seconds_since(t0);
          iters[i] += sol.iterations;
          if (sol.ok()) locals[i].x = sol.x;
          else proj_ok[i] = 0;
        });
      };

      std::vector<Vector> targets(N);
      for (int i : involved) targets[i] = locals[i].x;
      project_all(targets);

      bool converged = false;
      for (int m = 0; m < params.M2; ++m) {
        // Exchange: every involved agent sends its copy of each shared block.
        simnet::Network& net = fleet.net();
        for (int i : involved) {
          for (int j : partners[i])
            for (int b : locals[j].blocks) {
              const int s = locals[i].slot(b);
              if (s < 0) continue;
              net.send(i, j, simnet::TrajectoryBlock{b, i, 0, locals[i].x.segment(s * nk, nk)});
            }
        }
        net.seal_all();
        net.advance_round();
        ++res.rounds;

        double change = 0.0;
        for (int i : involved) {
          JointLocal& jl = locals[i];
          const double w = 1.0 / (partners[i].size() + 1);
          Vector avg = Vector::Zero(jl.x.size());
          for (std::size_t s = 0; s < jl.blocks.size(); ++s) {
            const int b = jl.blocks[s];
            Vector acc = jl.x.segment(s * nk, nk);
            for (const auto& msg : net.inbox(i)) {
              const auto& blk = std::get<simnet::TrajectoryBlock>(msg.payload);
              if (blk.origin != b) continue;
              acc += blk.accel;
            }
            // Partners without a copy of b contribute their stale view.
            for (int j : partners[i])
              if (locals[j].slot(b) < 0) {
                acc += fleet.view(j, b).decision();
                }
            avg.segment(s * nk, nk) = w * acc;
          }
          targets[i] = avg;
        }
        std::vector<Vector> before(N);
        for (int i : involved) before[i] = locals[i].x;
        project_all(targets);
        for (int i : involved) {
          for (std::size_t s = 0; s < locals[i].blocks.size(); ++s)
            change = std::max(change, (locals[i].x.segment(s * nk, nk) - before[i].segment(s * nk, nk)).norm());
          res.events.push_back({k, i, EventKind::consensus_iter, locals[i].set.num_in(),
                                static_cast<int>(partners[i].size()), 0, 0.0});
        }
        if (change <= params.eps) {
          converged = true;
          break;
        }
      }

      for (int i : involved) {
        ++res.reoptimizations;
        res.total_solve_time += secs[i];
        const bool ok = proj_ok[i] != 0;
        res.events.push_back({k, i, ok ? EventKind::reopt : EventKind::failure, locals[i].set.num_in(),
                              static_cast<int>(obstacles[i].size()), iters[i], secs[i]});
        if (!ok) {
          res.solver_failure = true;
          continue;
        }
        const int s = locals[i].slot(i);
        const auto& bc = scenario.bcs[i];
        fleet.publish(i, Trajectory::from_decision(locals[i].x.segment(s * nk, nk), bc.p0, bc.v0, scenario.horizon.h));
      }
      if (!converged) res.convergence_failure = true;
      res.rounds += fleet.disseminate(k);
    }
  }
  for (int i = 0; i < N; ++i) res.trajectories.push_back(fleet.own(i));
  res.transcript_hash = fleet.net().transcript_hash();
  res.messages = fleet.net().messages_delivered();
  if (params.record_transcript) {
    std::ostringstream os;
    fleet.net().write_transcript(os);
    res.transcript = os.str();
  }
  return res;
}

AlgResult baseline_run(const RunScenario& scenario, const AlgParams& params) {
  params.validate();
  const int N = static_cast<int>(scenario.bcs.size());
  AlgResult res;
  res.initial = initial_solutions(scenario, params, &res.crossing_samples);
  res.time_normalizer = std::max(N, 1);
  Fleet fleet(scenario, res.initial, &res.events, params.record_transcript);
  res.rounds += fleet.disseminate(-1);

  for (int rep = 0;; ++rep) {
    std::vector<int> active;
    for (int i = 0; i < N; ++i) {
      bool hit = rep == 0;  // the pre-flight solve includes everyone
      for (int j = 0; j < N && !hit; ++j)
        if (j != i && predicts_collision(fleet.own(i), fleet.view(i, j), 1, params)) hit = true;
      if (hit) active.push_back(i);
    }
    if (active.empty()) break;
    if (rep == params.M1) {
      res.convergence_failure = true;
      for (int i : active) res.events.push_back({0, i, EventKind::failure, 0, N - 1, 0, 0.0});
      break;
    }
    std::vector<ReoptOutcome> outcomes(active.size());
    parallel_for(static_cast<int>(active.size()), params.threads, [&](int idx) {
      const int i = active[idx];
      std::vector<std::pair<int, const Trajectory*>> obs;
      for (int j = 0; j < N; ++j)
        if (j != i) obs.emplace_back(j, &fleet.view(i, j));
      outcomes[idx] = reoptimize(scenario, params, i, 0, fleet.own(i), obs);
    });
    for (std::size_t idx = 0; idx < active.size(); ++idx) {
      const int i = active[idx];
      const ReoptOutcome& o = outcomes[idx];
      ++res.reoptimizations;
      res.total_solve_time += o.seconds;
      res.events.push_back(
          {0, i, o.ok ? EventKind::reopt : EventKind::failure, o.collision_rows, N - 1, o.iterations, o.seconds});
      if (o.ok) fleet.publish(i, o.plan);
      else if (!o.infeasible) res.solver_failure = true;
    }
    res.rounds += fleet.disseminate(0);
  }
  for (int i = 0; i < N; ++i) res.trajectories.push_back(fleet.own(i));
  res.transcript_hash = fleet.net().transcript_hash();
  res.messages = fleet.net().messages_delivered();
  if (params.record_transcript) {
    std::ostringstream os;
    fleet.net().write_transcript(os);
    res.transcript = os.str();
  }
  return res;
}

// ---------------------------------------------------------------------------

RunScenario layered_scenario(int N, std::uint64_t seed, double jitter) {
  if (N < 1) throw InvalidArgument("layered_scenario: N must be positive");
  RunScenario sc;
  const int layers = (N + 3) / 4;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  // Same-layer agents start inside each other's active region (diagonal 0.85 m).
  const double slots[4][2] = {{0.3, 0.3}, {-0.3, 0.3}, {-0.3, -0.3}, {0.3, -0.3}};
  const double spacing = 0.9;
  for (int a = 0; a < N; ++a) {
    const int d = a / 4;
    const int s = a % 4;
    BoundaryConditions bc;
    const double y = slots[s][0];
    const double z = slots[s][1];
    bc.p0 = Vec3(-1.5 - spacing * d + u(rng), y + u(rng), z + u(rng));
    bc.pf = Vec3(1.5 + spacing * (layers - 1 - d) + u(rng), y + u(rng), z + u(rng));
    sc.bcs.push_back(bc);
  }
  sc.ring = RingPose{};
  sc.g_comm = WeightedGraph::complete(N);
  return sc;
}

std::vector<CompareRow> compare_runs(const std::vector<int>& agent_counts, int repetitions, std::uint64_t seed,
                                     const AlgParams& params) {
  if (agent_counts.empty()) throw InvalidArgument("compare_runs: no agent counts");
  if (repetitions < 1) throw InvalidArgument("compare_runs: repetitions must be >= 1");
  std::vector<CompareRow> rows;
  for (int N : agent_counts) {
    CompareRow row;
    row.N = N;
    for (int r = 0; r < repetitions; ++r) {
      simnet::Fnv1a h;
      h.u64(seed);
      h.i64(N);
      h.i64(r);
      const RunScenario sc = layered_scenario(N, h.value());
      const AlgResult base = baseline_run(sc, params);
      const AlgResult a1 = alg1_run(sc, params);
      row.baseline_partners += base.mean_partners();
      row.alg1_partners += a1.mean_partners();
      row.baseline_time += base.mean_solve_time();
      row.alg1_time += a1.mean_solve_time();
      row.baseline_failures += (base.convergence_failure || base.solver_failure) ? 1 : 0;
      row.alg1_failures += (a1.convergence_failure || a1.solver_failure) ? 1 : 0;
    }
    row.baseline_partners /= repetitions;
    row.alg1_partners /= repetitions;
    row.baseline_time /= repetitions;
    row.alg1_time /= repetitions;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace swarm::trajopt
