#pragma once

#include "swarm/graph.hpp"
#include "swarm/numerics.hpp"
#include "swarm/sensing.hpp"
#include "swarm/tracking.hpp"
#include "swarm/trajopt.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace swarm::sim {

enum class Mode { formation, scale_demo, trajopt_alg1, trajopt_alg2, compare };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

/// Error with the offending config field attached, e.g. "trajopt.K: must be >= 4".
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : InvalidArgument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct GraphSpec {
  std::string type = "ring";  ///< ring | path | star | complete | custom
  double weight = 1.0;
  std::vector<Edge> edges;    ///< 0-based, used when type == "custom"

  WeightedGraph build(int n) const;
};

struct AgentSpec {
  Vec3 p0 = Vec3::Zero();
  Vec3 v0 = Vec3::Zero();
  Vec3 pf = Vec3::Zero();
  Vec3 vf = Vec3::Zero();
  Vec3 shape = Vec3::Zero();  ///< formation offset at unit scale
  double yaw = 0.0;           ///< body attitude about the global z axis
};

/// s(t) = s0 before ramp_start, linear to s1 over ramp_duration, s1 afterwards.
struct ScaleProfile {
  double s0 = 1.0;
  double s1 = 1.0;
  double ramp_start = 0.0;
  double ramp_duration = 0.0;
  double initial_estimate = 1.0;

  double at(double t) const;
  double rate(double t) const;
};

struct TrackingConfig {
  tracking::TrackerGains gains;
  double drop_probability = 0.0;
  double position_noise_std = 0.0;
};

struct SensingConfig {
  sensing::ReadingNoise noise;
  double attitude_noise_std = 0.0;
};

struct ObserverConfig {
  double k_p = 0.8;
  double k_v = 20.0;
};

struct ControlConfig {
  double k_pos = 9.0;
  double k_vel = 4.0;
  double a_max = 5.0;
  bool use_estimates = true;  ///< false: true-state feedback
};

struct FormationConfig {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;
};

struct TrajoptConfig {
  trajopt::Horizon horizon;
  trajopt::AlgParams params;
  trajopt::RingPose ring;
  std::string generator = "agents";  ///< agents | layered
  int layered_agents = 0;
  double layered_jitter = 0.05;
};

struct CompareConfig {
  std::vector<int> agents = {4, 8, 12, 16, 20};
  int reps = 20;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Mode mode = Mode::formation;
  std::uint64_t seed = 1;
  double dt_sim = 0.005;
  double duration = 15.0;
  GraphSpec graph;
  std::vector<int> leaders = {0};  ///< 0-based
  std::vector<AgentSpec> agents;
  FormationConfig formation;
  ScaleProfile scale;
  TrackingConfig tracking;
  SensingConfig sensing;
  ObserverConfig observer;
  ControlConfig control;
  TrajoptConfig trajopt;
  CompareConfig compare;

  int num_agents() const;
  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  static ScenarioConfig parse(const std::string& yaml_text);
  static ScenarioConfig load(const std::filesystem::path& path);
  /// Canonical YAML with every field spelled out; parse(to_yaml()) reproduces the config.
  std::string to_yaml() const;

  /// Trajectory-optimization scenario (agents list or generator).
  trajopt::RunScenario trajopt_scenario() const;
};

enum class TraceLevel { summary, standard, full };
TraceLevel parse_trace_level(const std::string& s);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  TraceLevel trace_level = TraceLevel::standard;
  bool wall_clock = true;  ///< record solver wall times; when false every time field is 0
};

struct RunReport {
  Mode mode = Mode::formation;
  nlohmann::json summary;
  bool convergence_failure = false;
  bool solver_failure = false;
  bool track_lost = false;
  std::uint64_t hash = 0;  ///< FNV-1a over deterministic traces and summary
  /// File name -> content of every emitted trace and CSV.
  std::map<std::string, std::string> files;

  /// 0 ok, 2 convergence failure or lost track, 3 solver failure.
  int exit_code() const;
};

/// Runs the configured mode; writes `files` under options.out_dir when set.
RunReport run(const ScenarioConfig& config, const RunOptions& options = {});

/// Stability checks of the observer, controller and scale estimator for the configured topology.
nlohmann::json check_stability(const ScenarioConfig& config);

/// Compare mode with explicit agent counts and repetitions.
RunReport run_compare(const ScenarioConfig& config, const std::vector<int>& agents, int reps,
                      const RunOptions& options = {});

/// Zero-order-hold resampling of a plan onto a finer tick.
struct FlightSample {
  int tick = 0;
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};
std::vector<FlightSample> resample_zoh(const trajopt::Trajectory& plan, double dt);

}  // namespace swarm::sim
