#include "swarm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swarm::estimation {

namespace {

std::string agent_label(int i) { return "agent " + std::to_string(i + 1); }

// Row-weighted Laplacian plus diagonal injection.
Matrix gain_laplacian(const Matrix& k, const Vector& g) {
  const int n = static_cast<int>(g.size());
  Matrix T = -k;
  for (int i = 0; i < n; ++i) T(i, i) = k.row(i).sum() - k(i, i) + g(i);
  return T;
}

void require_undirected(const WeightedGraph& g, const char* who) {
  if (g.directed()) throw InvalidArgument(std::string(who) + ": measurement graph must be undirected");
}

}  // namespace

void ObserverGains::validate(const WeightedGraph& g, const LeaderSet& leaders) const {
  const int n = g.num_nodes();
  if (k_gp.size() != n || k_rp.rows() != n || k_rp.cols() != n)
    throw InvalidArgument("observer gains: size does not match the graph");
  if (!(k_p > 0.0) || !(k_v > 0.0)) throw InvalidArgument("observer gains: k_p and k_v must be positive");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool edge = g.has_edge(i, j);
      if (edge && !(k_rp(i, j) > 0.0))
        throw InvalidArgument("observer gains: k_rp must be positive on edge " + std::to_string(i + 1) + "-" +
                              std::to_string(j + 1));
      if (!edge && k_rp(i, j) != 0.0)
        throw InvalidArgument("observer gains: k_rp set on a non-edge " + std::to_string(i + 1) + "-" +
                              std::to_string(j + 1));
    }
    if (leaders.contains(i) ? !(k_gp(i) > 0.0) : k_gp(i) != 0.0)
      throw InvalidArgument("observer gains: k_gp must be positive exactly on leaders (" + agent_label(i) + ")");
  }
}

ObserverGains default_observer_gains(const WeightedGraph& g, const LeaderSet& leaders, double k_p, double k_v) {
  require_undirected(g, "default_observer_gains");
  const int n = g.num_nodes();
  ObserverGains out;
  out.k_p = k_p;
  out.k_v = k_v;
  out.k_rp = Matrix::Zero(n, n);
  out.k_rv = Matrix::Zero(n, n);
  out.k_gp = Vector::Zero(n);
  out.k_gv = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int Ni = g.degree(i);
    const bool leader = leaders.contains(i);
    if (!leader && Ni == 0) throw InvalidArgument("default_observer_gains: " + agent_label(i) + " is isolated");
    const double denom = leader ? Ni + 1.0 : Ni;
    for (int j : g.neighbors(i)) {
      out.k_rp(i, j) = k_p / denom;
      out.k_rv(i, j) = k_v / denom;
    }
    if (leader) {
      out.k_gp(i) = k_p / denom;
      out.k_gv(i) = k_v / denom;
    }
  }
  return out;
}

ObserverGains observer_gains_from_weights(const WeightedGraph& g, const LeaderSet& leaders, double leader_gain,
                                          double k_p, double k_v) {
  require_undirected(g, "observer_gains_from_weights");
  const int n = g.num_nodes();
  ObserverGains out;
  out.k_p = k_p;
  out.k_v = k_v;
  out.k_rp = adjacency_matrix(g);
  out.k_rv = out.k_rp;
  out.k_gp = Vector::Zero(n);
  for (int i : leaders.ids()) out.k_gp(i) = leader_gain;
  out.k_gv = out.k_gp;
  return out;
}

MeasurementBundle ideal_measurements(const std::vector<Vec3>& p, const WeightedGraph& g, const LeaderSet& leaders) {
  MeasurementBundle m;
  for (int i = 0; i < g.num_nodes(); ++i)
    for (int j : g.neighbors(i)) m.relative.push_back({i, j, p[j] - p[i], sensing::Frame::global});
  for (int i : leaders.ids()) m.global[i] = p[i];
  return m;
}

Vec3 agent_innovation(int i, const Vec3& p_i, const std::map<int, Vec3>& neighbor_p, const MeasurementBundle& meas,
                      const ObserverGains& gains) {
  const int n = gains.num_agents();
  Vec3 nu = Vec3::Zero();
  std::vector<bool> seen(n, false);
  for (const auto& m : meas.relative) {
    if (m.observer != i) continue;
    if (m.frame != sensing::Frame::global)
      throw InvalidArgument("observer: relative measurement of " + agent_label(i) + " is not in the global frame");
    const int j = m.target;
    const double k = gains.k_rp(i, j);
    if (k == 0.0) continue;
    auto it = neighbor_p.find(j);
    if (it == neighbor_p.end())
      throw InvalidArgument("observer: " + agent_label(i) + " has no estimate of " + agent_label(j));
    const Vec3 z_ij = -m.value;
    nu += k * (z_ij - (p_i - it->second));
    seen[j] = true;
  }
  for (int j = 0; j < n; ++j)
    if (gains.k_rp(i, j) != 0.0 && !seen[j])
      throw InvalidArgument("observer: missing relative measurement " + std::to_string(i + 1) + "->" +
                            std::to_string(j + 1));
  if (gains.k_gp(i) != 0.0) {
    auto it = meas.global.find(i);
    if (it == meas.global.end()) throw InvalidArgument("observer: missing global fix of " + agent_label(i));
    nu += gains.k_gp(i) * (it->second - p_i);
  }
  return nu;
}

AgentState agent_observer_step(const AgentState& own, const Vec3& innovation, const Vec3& u,
                               const ObserverGains& gains, double dt) {
  AgentState out;
  out.p = own.p + dt * (own.v + gains.k_p * innovation);
  out.v = own.v + dt * (u + gains.k_v * innovation);
  return out;
}

ObserverStep observer_step(const ObserverState& state, const MeasurementBundle& meas, const std::vector<Vec3>& u,
                           const ObserverGains& gains, double dt) {
  const int n = gains.num_agents();
  if (static_cast<int>(state.size()) != n || static_cast<int>(u.size()) != n)
    throw InvalidArgument("observer_step: state/input size mismatch");
  if (!(dt > 0.0)) throw InvalidArgument("observer_step: dt must be positive");
  ObserverStep out;
  out.state.resize(n);
  out.innovation.resize(n);
  for (int i = 0; i < n; ++i) {
    std::map<int, Vec3> nb;
    for (int j = 0; j < n; ++j)
      if (gains.k_rp(i, j) != 0.0) nb[j] = state[j].p;
    out.innovation[i] = agent_innovation(i, state[i].p, nb, meas, gains);
    out.state[i] = agent_observer_step(state[i], out.innovation[i], u[i], gains, dt);
  }
  return out;
}

Matrix observer_T(const ObserverGains& gains) { return gain_laplacian(gains.k_rp, gains.k_gp); }

Matrix observer_error_matrix(const ObserverGains& gains) {
  const Matrix T = observer_T(gains);
  const int n = static_cast<int>(T.rows());
  Matrix O = Matrix::Zero(2 * n, 2 * n);
  O.topLeftCorner(n, n) = -gains.k_p * T;
  O.topRightCorner(n, n) = Matrix::Identity(n, n);
  O.bottomLeftCorner(n, n) = -gains.k_v * T;
  return O;
}

StabilityReport check_observer_stability(const WeightedGraph& g, const LeaderSet& leaders,
                                         const ObserverGains& gains) {
  gains.validate(g, leaders);
  StabilityReport r;
  const Matrix T = observer_T(gains);
  r.min_eigenvalue = min_real_eigenvalue(T);
  r.stable = has_positive_spectrum(T);
  return r;
}

// ---------------------------------------------------------------------------

Matrix ScaleEstimatorState::system_matrix() const { return gain_laplacian(a, g); }

ScaleEstimatorState default_scale_estimator(const WeightedGraph& g, const LeaderSet& leaders, double s0) {
  require_undirected(g, "default_scale_estimator");
  const int n = g.num_nodes();
  ScaleEstimatorState st;
  st.s_est = Vector::Constant(n, s0);
  st.a = Matrix::Zero(n, n);
  st.g = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int Ni = g.degree(i);
    const bool leader = leaders.contains(i);
    if (!leader && Ni == 0) throw InvalidArgument("default_scale_estimator: " + agent_label(i) + " is isolated");
    const double w = leader ? 1.0 / (Ni + 1) : 1.0 / Ni;
    for (int j : g.neighbors(i)) st.a(i, j) = w;
    if (leader) st.g(i) = w;
  }
  return st;
}

ScaleEstimatorState scale_estimator_from_weights(const WeightedGraph& g, const LeaderSet& leaders,
                                                 double leader_gain, double s0) {
  require_undirected(g, "scale_estimator_from_weights");
  ScaleEstimatorState st;
  st.s_est = Vector::Constant(g.num_nodes(), s0);
  st.a = adjacency_matrix(g);
  st.g = Vector::Zero(g.num_nodes());
  for (int i : leaders.ids()) st.g(i) = leader_gain;
  return st;
}

Vector scale_rate(const ScaleEstimatorState& state, double s_true) {
  return -state.system_matrix() * state.s_est + s_true * state.g;
}

double agent_scale_rate(int i, double s_i, const std::map<int, double>& neighbor_s, const ScaleEstimatorState& state,
                        double s_true) {
  double rate = 0.0;
  for (int j = 0; j < state.num_agents(); ++j) {
    const double a = state.a(i, j);
    if (a == 0.0) continue;
    auto it = neighbor_s.find(j);
    if (it == neighbor_s.end())
      throw InvalidArgument("scale estimator: " + agent_label(i) + " has no estimate of " + agent_label(j));
    rate -= a * (s_i - it->second);
  }
  rate -= state.g(i) * (s_i - s_true);
  return rate;
}

ScaleEstimatorState scale_step(const ScaleEstimatorState& state, double s_true, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("scale_step: dt must be positive");
  ScaleEstimatorState out = state;
  out.s_est = state.s_est + dt * scale_rate(state, s_true);
  return out;
}

void require_zero_mean(const std::vector<Vec3>& base_shape) {
  Vec3 sum = Vec3::Zero();
  double scale = 1.0;
  for (const auto& p : base_shape) {
    sum += p;
    scale = std::max(scale, p.norm());
  }
  if (sum.norm() > 1e-9 * scale * std::max<std::size_t>(base_shape.size(), 1))
    throw InvalidArgument("formation base shape must be zero-mean");
}

DesiredState desired_trajectory_from_scale(const Vec3& p_c, const Vec3& v_c, const std::vector<Vec3>& base_shape,
                                           const ScaleEstimatorState& state, double s_true) {
  if (static_cast<int>(base_shape.size()) != state.num_agents())
    throw InvalidArgument("desired_trajectory_from_scale: shape size mismatch");
  require_zero_mean(base_shape);
  const Vector rate = scale_rate(state, s_true);
  DesiredState d;
  for (int i = 0; i < state.num_agents(); ++i) {
    d.p.push_back(p_c + state.s_est(i) * base_shape[i]);
    d.v.push_back(v_c + rate(i) * base_shape[i]);
  }
  return d;
}

}  // namespace swarm::estimation
