#pragma once

#include "swarm/estimation.hpp"
#include "swarm/graph.hpp"
#include "swarm/numerics.hpp"

#include <map>
#include <vector>

namespace swarm::control {

/// Formation gains. Row i of k_rp / k_rv holds agent i's weights on its
/// neighbors; k_gp / k_gv are nonzero exactly on leaders. The schedule keeps
/// k_rp = alpha k_rv and k_gp = alpha k_gv.
struct ControlGains {
  Matrix k_rp;
  Matrix k_rv;
  Vector k_gp;
  Vector k_gv;
  double alpha = 9.0 / 4.0;

  int num_agents() const { return static_cast<int>(k_gp.size()); }
  void validate(const WeightedGraph& g, const LeaderSet& leaders) const;
};

/// 9/(N_i+1), 4/(N_i+1) on leaders (relative and global); 9/N_i, 4/N_i and no
/// global terms on followers.
ControlGains default_control_gains(const WeightedGraph& g, const LeaderSet& leaders, double k_pos = 9.0,
                                   double k_vel = 4.0);

/// k_rv(i, j) = w_ij, k_gv = leader_gain on leaders, positions scaled by alpha.
ControlGains control_gains_from_weights(const WeightedGraph& g, const LeaderSet& leaders, double leader_gain,
                                        double alpha);

struct FormationSpec {
  std::vector<Vec3> p_star;
  std::vector<Vec3> v_star;

  static FormationSpec fixed(std::vector<Vec3> p_star);
  static FormationSpec from_desired(const estimation::DesiredState& d) { return {d.p, d.v}; }
};

/// u_i = -sum_j k_rp(p_i - p_j - p*_ij) - sum_j k_rv(v_i - v_j - v*_ij) - k_gp(p_i - p*_i) - k_gv(v_i - v*_i).
/// `neighbors` maps neighbor id to its (estimated) state.
Vec3 agent_control(int i, const AgentState& own, const std::map<int, AgentState>& neighbors, const FormationSpec& spec,
                   const ControlGains& gains);

/// Control law evaluated on a full snapshot.
Vec3 control_law(int i, const std::vector<AgentState>& state, const FormationSpec& spec, const ControlGains& gains);

/// Per-axis clamp to [-a_max, a_max].
Vec3 saturate(const Vec3& u, double a_max);

/// Gamma = L_v + G_v (row-weighted Laplacian of k_rv plus diag(k_gv)).
Matrix gamma_matrix(const ControlGains& gains);

/// Closed-loop error matrix [[0, I], [-alpha Gamma, -Gamma]] (one axis).
Matrix closed_loop_matrix(const ControlGains& gains);

estimation::StabilityReport check_controller_stability(const WeightedGraph& g, const LeaderSet& leaders,
                                                       const ControlGains& gains);

/// max_i ||p_i - p*_i||.
double formation_error(const std::vector<Vec3>& p, const std::vector<Vec3>& p_star);

}  // namespace swarm::control
