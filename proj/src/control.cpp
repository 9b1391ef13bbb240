#include "swarm/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swarm::control {

void ControlGains::validate(const WeightedGraph& g, const LeaderSet& leaders) const {
  const int n = g.num_nodes();
  if (k_gp.size() != n || k_gv.size() != n || k_rp.rows() != n || k_rp.cols() != n || k_rv.rows() != n ||
      k_rv.cols() != n)
    throw InvalidArgument("control gains: size does not match the graph");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool edge = g.has_edge(i, j);
      if (edge && !(k_rp(i, j) > 0.0 && k_rv(i, j) > 0.0))
        throw InvalidArgument("control gains: relative gains must be positive on edge " + std::to_string(i + 1) +
                              "-" + std::to_string(j + 1));
      if (!edge && (k_rp(i, j) != 0.0 || k_rv(i, j) != 0.0))
        throw InvalidArgument("control gains: relative gain on a non-edge " + std::to_string(i + 1) + "-" +
                              std::to_string(j + 1));
      if (edge && std::abs(k_rp(i, j) - alpha * k_rv(i, j)) > 1e-10 * std::max(1.0, k_rp(i, j)))
        throw InvalidArgument("control gains: k_rp / k_rv differs from alpha");
    }
    const bool leader = leaders.contains(i);
    if (leader ? !(k_gp(i) > 0.0 && k_gv(i) > 0.0) : (k_gp(i) != 0.0 || k_gv(i) != 0.0))
      throw InvalidArgument("control gains: global gains must be positive exactly on leaders (agent " +
                            std::to_string(i + 1) + ")");
    if (std::abs(k_gp(i) - alpha * k_gv(i)) > 1e-10 * std::max(1.0, k_gp(i)))
      throw InvalidArgument("control gains: k_gp / k_gv differs from alpha");
  }
}

ControlGains default_control_gains(const WeightedGraph& g, const LeaderSet& leaders, double k_pos, double k_vel) {
  if (g.directed()) throw InvalidArgument("default_control_gains: graph must be undirected");
  const int n = g.num_nodes();
  ControlGains out;
  out.alpha = k_pos / k_vel;
  out.k_rp = Matrix::Zero(n, n);
  out.k_rv = Matrix::Zero(n, n);
  out.k_gp = Vector::Zero(n);
  out.k_gv = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int Ni = g.degree(i);
    const bool leader = leaders.contains(i);
    if (!leader && Ni == 0)
      throw InvalidArgument("default_control_gains: agent " + std::to_string(i + 1) + " is isolated");
    const double denom = leader ? Ni + 1.0 : Ni;
    for (int j : g.neighbors(i)) {
      out.k_rp(i, j) = k_pos / denom;
      out.k_rv(i, j) = k_vel / denom;
    }
    if (leader) {
      out.k_gp(i) = k_pos / denom;
      out.k_gv(i) = k_vel / denom;
    }
  }
  return out;
}

ControlGains control_gains_from_weights(const WeightedGraph& g, const LeaderSet& leaders, double leader_gain,
                                        double alpha) {
  const int n = g.num_nodes();
  ControlGains out;
  out.alpha = alpha;
  out.k_rv = adjacency_matrix(g);
  out.k_rp = alpha * out.k_rv;
  out.k_gv = Vector::Zero(n);
  for (int i : leaders.ids()) out.k_gv(i) = leader_gain;
  out.k_gp = alpha * out.k_gv;
  return out;
}

FormationSpec FormationSpec::fixed(std::vector<Vec3> p_star) {
  FormationSpec s;
  s.v_star.assign(p_star.size(), Vec3::Zero());
  s.p_star = std::move(p_star);
  return s;
}

Vec3 agent_control(int i, const AgentState& own, const std::map<int, AgentState>& neighbors, const FormationSpec& spec,
                   const ControlGains& gains) {
  const int n = gains.num_agents();
  Vec3 u = Vec3::Zero();
  for (int j = 0; j < n; ++j) {
    if (gains.k_rp(i, j) == 0.0 && gains.k_rv(i, j) == 0.0) continue;
    auto it = neighbors.find(j);
    if (it == neighbors.end())
      throw InvalidArgument("control: agent " + std::to_string(i + 1) + " has no state of agent " +
                            std::to_string(j + 1));
    const AgentState& nb = it->second;
    u -= gains.k_rp(i, j) * (own.p - nb.p - (spec.p_star[i] - spec.p_star[j]));
    u -= gains.k_rv(i, j) * (own.v - nb.v - (spec.v_star[i] - spec.v_star[j]));
  }
  u -= gains.k_gp(i) * (own.p - spec.p_star[i]);
  u -= gains.k_gv(i) * (own.v - spec.v_star[i]);
  return u;
}

Vec3 control_law(int i, const std::vector<AgentState>& state, const FormationSpec& spec, const ControlGains& gains) {
  std::map<int, AgentState> nb;
  for (int j = 0; j < gains.num_agents(); ++j)
    if (j != i && (gains.k_rp(i, j) != 0.0 || gains.k_rv(i, j) != 0.0)) nb[j] = state[j];
  return agent_control(i, state[i], nb, spec, gains);
}

Vec3 saturate(const Vec3& u, double a_max) { return u.cwiseMax(-a_max).cwiseMin(a_max); }

Matrix gamma_matrix(const ControlGains& gains) {
  const int n = gains.num_agents();
  Matrix G = -gains.k_rv;
  for (int i = 0; i < n; ++i) G(i, i) = gains.k_rv.row(i).sum() - gains.k_rv(i, i) + gains.k_gv(i);
  return G;
}

Matrix closed_loop_matrix(const ControlGains& gains) {
  const Matrix G = gamma_matrix(gains);
  const int n = static_cast<int>(G.rows());
  Matrix M = Matrix::Zero(2 * n, 2 * n);
  M.topRightCorner(n, n) = Matrix::Identity(n, n);
  M.bottomLeftCorner(n, n) = -gains.alpha * G;
  M.bottomRightCorner(n, n) = -G;
  return M;
}

estimation::StabilityReport check_controller_stability(const WeightedGraph& g, const LeaderSet& leaders,
                                                       const ControlGains& gains) {
  gains.validate(g, leaders);
  estimation::StabilityReport r;
  const Matrix G = gamma_matrix(gains);
  r.min_eigenvalue = min_real_eigenvalue(G);
  r.stable = has_positive_spectrum(G);
  return r;
}

double formation_error(const std::vector<Vec3>& p, const std::vector<Vec3>& p_star) {
  if (p.size() != p_star.size()) throw InvalidArgument("formation_error: size mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) e = std::max(e, (p[i] - p_star[i]).norm());
  return e;
}

}  // namespace swarm::control
