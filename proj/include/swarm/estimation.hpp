#pragma once

#include "swarm/graph.hpp"
#include "swarm/numerics.hpp"
#include "swarm/sensing.hpp"

#include <map>
#include <vector>

namespace swarm::estimation {

/// Observer gains. Row i of k_rp weights agent i's relative innovations
/// (k_rp(i, j) > 0 exactly on measurement edges); k_gp(i) > 0 exactly on
/// leaders. k_p and k_v multiply the shared innovation in the position and
/// velocity channels. k_rv / k_gv are carried for completeness and for the
/// velocity-channel variant; the default observer does not read them.
struct ObserverGains {
  double k_p = 0.8;
  double k_v = 20.0;
  Matrix k_rp;
  Vector k_gp;
  Matrix k_rv;
  Vector k_gv;

  int num_agents() const { return static_cast<int>(k_gp.size()); }
  void validate(const WeightedGraph& g, const LeaderSet& leaders) const;
};

/// Per-agent averaging schedule: k_p / (N_i + 1) on leaders (relative and
/// global), k_p / N_i on followers; the velocity channel mirrors it with k_v.
ObserverGains default_observer_gains(const WeightedGraph& g, const LeaderSet& leaders, double k_p = 0.8,
                                     double k_v = 20.0);

/// Gains read straight from the graph: k_rp(i, j) = w_ij and k_gp = leader_gain on leaders.
ObserverGains observer_gains_from_weights(const WeightedGraph& g, const LeaderSet& leaders, double leader_gain,
                                          double k_p = 0.8, double k_v = 20.0);

using ObserverState = std::vector<AgentState>;

struct MeasurementBundle {
  /// Global-frame relative vectors p_target - p_observer, as reported by each observer.
  std::vector<sensing::RelativeMeasurement> relative;
  /// Global position fixes keyed by leader id.
  std::map<int, Vec3> global;
};

/// Noiseless bundle generated from true positions: every edge in both directions plus the leader fixes.
MeasurementBundle ideal_measurements(const std::vector<Vec3>& p, const WeightedGraph& g, const LeaderSet& leaders);

/// Innovation of agent i, nu_i = sum_j k_rp(i,j) (z_ij - (p_i - p_j)) + k_gp(i) (z_i - p_i),
/// with z_ij = p_i - p_j recovered by reversing i's reading of j. `neighbor_p`
/// holds the latest estimate p_j for every neighbor.
Vec3 agent_innovation(int i, const Vec3& p_i, const std::map<int, Vec3>& neighbor_p, const MeasurementBundle& meas,
                      const ObserverGains& gains);

/// Euler step of one agent: p += dt (v + k_p nu), v += dt (u + k_v nu).
AgentState agent_observer_step(const AgentState& own, const Vec3& innovation, const Vec3& u,
                               const ObserverGains& gains, double dt);

struct ObserverStep {
  ObserverState state;
  std::vector<Vec3> innovation;
};

/// Synchronous step of the whole swarm from a snapshot of the previous estimates.
ObserverStep observer_step(const ObserverState& state, const MeasurementBundle& meas, const std::vector<Vec3>& u,
                           const ObserverGains& gains, double dt);

/// Gain matrix T with T_ii = sum_j k_rp(i,j) + k_gp(i), T_ij = -k_rp(i,j).
/// Equals B D_rp B' + E D_gp E' when the relative gains are symmetric.
Matrix observer_T(const ObserverGains& gains);

/// Error dynamics matrix [[-k_p T, I], [-k_v T, 0]] of e = x - x_hat (one axis).
Matrix observer_error_matrix(const ObserverGains& gains);

struct StabilityReport {
  bool stable = false;
  double min_eigenvalue = 0.0;
};

/// Positivity of the spectrum of T (real and positive for the symmetric or
/// row-scaled schedules used here).
StabilityReport check_observer_stability(const WeightedGraph& g, const LeaderSet& leaders, const ObserverGains& gains);

// ---------------------------------------------------------------------------
// Formation scale
// ---------------------------------------------------------------------------

struct ScaleEstimatorState {
  Vector s_est;
  Matrix a;   ///< a(i, j) neighbor weights
  Vector g;   ///< leader injection gains

  int num_agents() const { return static_cast<int>(s_est.size()); }
  /// L_s + G_s with L_s built from the (row) weights.
  Matrix system_matrix() const;
};

/// a_ij = g_i = 1/(N_i+1) on leaders; a_ij = 1/N_i, g_i = 0 on followers.
ScaleEstimatorState default_scale_estimator(const WeightedGraph& g, const LeaderSet& leaders, double s0 = 1.0);

/// Symmetric weights a_ij = w_ij and g_i = leader_gain on leaders.
ScaleEstimatorState scale_estimator_from_weights(const WeightedGraph& g, const LeaderSet& leaders,
                                                 double leader_gain, double s0 = 1.0);

/// s_dot = -(L_s + G_s) s_est + s G_s 1.
Vector scale_rate(const ScaleEstimatorState& state, double s_true);

/// One agent's rate from its own estimate and its neighbors' latest estimates.
double agent_scale_rate(int i, double s_i, const std::map<int, double>& neighbor_s, const ScaleEstimatorState& state,
                        double s_true);

ScaleEstimatorState scale_step(const ScaleEstimatorState& state, double s_true, double dt);

struct DesiredState {
  std::vector<Vec3> p;
  std::vector<Vec3> v;
};

/// p* = p_c + s_est,i pbar_i,  v* = v_c + s_dot_est,i pbar_i. Throws when the base shape is not zero-mean.
DesiredState desired_trajectory_from_scale(const Vec3& p_c, const Vec3& v_c, const std::vector<Vec3>& base_shape,
                                           const ScaleEstimatorState& state, double s_true);

/// Throws InvalidArgument unless sum(base_shape) = 0 within 1e-9 (relative to its size).
void require_zero_mean(const std::vector<Vec3>& base_shape);

}  // namespace swarm::estimation
