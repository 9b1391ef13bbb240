#include "swarm/sim.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace swarm::sim {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::formation: return "formation";
    case Mode::scale_demo: return "scale_demo";
    case Mode::trajopt_alg1: return "trajopt_alg1";
    case Mode::trajopt_alg2: return "trajopt_alg2";
    case Mode::compare: return "compare";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::formation, Mode::scale_demo, Mode::trajopt_alg1, Mode::trajopt_alg2, Mode::compare})
    if (to_string(m) == s) return m;
  throw ConfigError("mode", "unknown mode '" + s + "'");
}

TraceLevel parse_trace_level(const std::string& s) {
  if (s == "summary") return TraceLevel::summary;
  if (s == "standard") return TraceLevel::standard;
  if (s == "full") return TraceLevel::full;
  throw InvalidArgument("trace level must be summary, standard or full (got '" + s + "')");
}

double ScaleProfile::at(double t) const {
  if (t <= ramp_start || ramp_duration <= 0.0) return t <= ramp_start ? s0 : s1;
  if (t >= ramp_start + ramp_duration) return s1;
  return s0 + (s1 - s0) * (t - ramp_start) / ramp_duration;
}

double ScaleProfile::rate(double t) const {
  if (ramp_duration <= 0.0 || t < ramp_start || t >= ramp_start + ramp_duration) return 0.0;
  return (s1 - s0) / ramp_duration;
}

WeightedGraph GraphSpec::build(int n) const {
  if (type == "ring") return n >= 3 ? WeightedGraph::ring(n, weight) : WeightedGraph::path(n, weight);
  if (type == "path") return WeightedGraph::path(n, weight);
  if (type == "star") return WeightedGraph::star(n, weight);
  if (type == "complete") return WeightedGraph::complete(n, weight);
  if (type == "custom") return WeightedGraph(n, edges);
  throw ConfigError("graph.type", "unknown graph type '" + type + "'");
}

namespace {

using Keys = std::set<std::string>;

void check_keys(const YAML::Node& node, const std::string& path, const Keys& allowed) {
  if (!node.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <typename T>
void read(const YAML::Node& node, const std::string& path, const std::string& key, T& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(join(path, key), "has the wrong type");
  }
}

void read_vec3(const YAML::Node& node, const std::string& path, const std::string& key, Vec3& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  if (!v.IsSequence() || v.size() != 3) throw ConfigError(join(path, key), "expected [x, y, z]");
  try {
    for (int d = 0; d < 3; ++d) out(d) = v[d].as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(join(path, key), "expected three numbers");
  }
}

YAML::Node vec3_node(const Vec3& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (int d = 0; d < 3; ++d) n.push_back(v(d));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

int ScenarioConfig::num_agents() const {
  if ((mode == Mode::trajopt_alg1 || mode == Mode::trajopt_alg2) && trajopt.generator == "layered")
    return trajopt.layered_agents;
  return static_cast<int>(agents.size());
}

ScenarioConfig ScenarioConfig::parse(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<file>", std::string("malformed YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("<file>", "empty document");
  check_keys(root, "",
             {"name", "mode", "seed", "dt_sim", "duration", "graph", "leaders", "agents", "formation", "scale",
              "tracking", "sensing", "observer", "control", "trajopt", "compare"});

  ScenarioConfig c;
  read(root, "", "name", c.name);
  if (root["mode"]) {
    std::string m;
    read(root, "", "mode", m);
    c.mode = parse_mode(m);
  }
  read(root, "", "seed", c.seed);
  read(root, "", "dt_sim", c.dt_sim);
  read(root, "", "duration", c.duration);

  if (const auto g = root["graph"]) {
    check_keys(g, "graph", {"type", "weight", "edges"});
    read(g, "graph", "type", c.graph.type);
    read(g, "graph", "weight", c.graph.weight);
    if (const auto e = g["edges"]) {
      if (!e.IsSequence()) throw ConfigError("graph.edges", "expected a list of [i, j] or [i, j, weight]");
      for (std::size_t k = 0; k < e.size(); ++k) {
        const std::string f = "graph.edges[" + std::to_string(k) + "]";
        if (!e[k].IsSequence() || e[k].size() < 2 || e[k].size() > 3) throw ConfigError(f, "expected [i, j(, w)]");
        try {
          Edge edge{e[k][0].as<int>() - 1, e[k][1].as<int>() - 1, c.graph.weight};
          if (e[k].size() == 3) edge.weight = e[k][2].as<double>();
          c.graph.edges.push_back(edge);
        } catch (const YAML::Exception&) {
          throw ConfigError(f, "expected integer ids and a numeric weight");
        }
      }
    }
  }

  if (const auto l = root["leaders"]) {
    if (!l.IsSequence()) throw ConfigError("leaders", "expected a list of 1-based ids");
    c.leaders.clear();
    for (std::size_t k = 0; k < l.size(); ++k) {
      try {
        c.leaders.push_back(l[k].as<int>() - 1);
      } catch (const YAML::Exception&) {
        throw ConfigError("leaders[" + std::to_string(k) + "]", "expected an integer id");
      }
    }
  }

  if (const auto a = root["agents"]) {
    if (!a.IsSequence()) throw ConfigError("agents", "expected a list");
    for (std::size_t k = 0; k < a.size(); ++k) {
      const std::string f = "agents[" + std::to_string(k) + "]";
      check_keys(a[k], f, {"p0", "v0", "pf", "vf", "shape", "yaw"});
      AgentSpec s;
      read_vec3(a[k], f, "p0", s.p0);
      read_vec3(a[k], f, "v0", s.v0);
      s.pf = s.p0;
      read_vec3(a[k], f, "pf", s.pf);
      read_vec3(a[k], f, "vf", s.vf);
      read_vec3(a[k], f, "shape", s.shape);
      read(a[k], f, "yaw", s.yaw);
      c.agents.push_back(s);
    }
  }

  if (const auto n = root["formation"]) {
    check_keys(n, "formation", {"center", "scale"});
    read_vec3(n, "formation", "center", c.formation.center);
    read(n, "formation", "scale", c.formation.scale);
  }
  if (const auto n = root["scale"]) {
    check_keys(n, "scale", {"s0", "s1", "ramp_start", "ramp_duration", "initial_estimate"});
    read(n, "scale", "s0", c.scale.s0);
    c.scale.s1 = c.scale.s0;
    read(n, "scale", "s1", c.scale.s1);
    read(n, "scale", "ramp_start", c.scale.ramp_start);
    read(n, "scale", "ramp_duration", c.scale.ramp_duration);
    read(n, "scale", "initial_estimate", c.scale.initial_estimate);
  }
  if (const auto n = root["tracking"]) {
    check_keys(n, "tracking", {"k_p", "k_v", "drop_probability", "position_noise_std"});
    read(n, "tracking", "k_p", c.tracking.gains.k_p);
    read(n, "tracking", "k_v", c.tracking.gains.k_v);
    read(n, "tracking", "drop_probability", c.tracking.drop_probability);
    read(n, "tracking", "position_noise_std", c.tracking.position_noise_std);
  }
  if (const auto n = root["sensing"]) {
    check_keys(n, "sensing", {"r_std", "theta_std", "phi_std", "attitude_noise_std"});
    read(n, "sensing", "r_std", c.sensing.noise.r_std);
    read(n, "sensing", "theta_std", c.sensing.noise.theta_std);
    read(n, "sensing", "phi_std", c.sensing.noise.phi_std);
    read(n, "sensing", "attitude_noise_std", c.sensing.attitude_noise_std);
  }
  if (const auto n = root["observer"]) {
    check_keys(n, "observer", {"k_p", "k_v"});
    read(n, "observer", "k_p", c.observer.k_p);
    read(n, "observer", "k_v", c.observer.k_v);
  }
  if (const auto n = root["control"]) {
    check_keys(n, "control", {"k_pos", "k_vel", "a_max", "feedback"});
    read(n, "control", "k_pos", c.control.k_pos);
    read(n, "control", "k_vel", c.control.k_vel);
    read(n, "control", "a_max", c.control.a_max);
    if (n["feedback"]) {
      std::string fb;
      read(n, "control", "feedback", fb);
      if (fb != "estimate" && fb != "truth") throw ConfigError("control.feedback", "must be 'estimate' or 'truth'");
      c.control.use_estimates = fb == "estimate";
    }
  }
  if (const auto n = root["trajopt"]) {
    check_keys(n, "trajopt",
               {"K", "h", "R_collision", "R_active", "M", "M1", "M2", "eps", "a_min", "a_max", "alpha_m",
                "v_cross", "reconvexify", "elastic_weight", "detection_slack", "threads", "generator",
                "layered_agents", "layered_jitter", "ring"});
    auto& p = c.trajopt.params;
    read(n, "trajopt", "K", c.trajopt.horizon.K);
    read(n, "trajopt", "h", c.trajopt.horizon.h);
    read(n, "trajopt", "R_collision", p.R_collision);
    read(n, "trajopt", "R_active", p.R_active);
    read(n, "trajopt", "M", p.M);
    read(n, "trajopt", "M1", p.M1);
    read(n, "trajopt", "M2", p.M2);
    read(n, "trajopt", "eps", p.eps);
    read(n, "trajopt", "a_min", p.a_min);
    read(n, "trajopt", "a_max", p.a_max);
    read(n, "trajopt", "alpha_m", p.alpha_m);
    if (n["v_cross"] && !n["v_cross"].IsNull()) {
      double v = 0.0;
      read(n, "trajopt", "v_cross", v);
      p.v_cross = v;
    }
    read(n, "trajopt", "reconvexify", p.reconvexify);
    read(n, "trajopt", "elastic_weight", p.elastic_weight);
    read(n, "trajopt", "detection_slack", p.detection_slack);
    read(n, "trajopt", "threads", p.threads);
    read(n, "trajopt", "generator", c.trajopt.generator);
    read(n, "trajopt", "layered_agents", c.trajopt.layered_agents);
    read(n, "trajopt", "layered_jitter", c.trajopt.layered_jitter);
    if (const auto r = n["ring"]) {
      check_keys(r, "trajopt.ring", {"center", "normal", "R_ring", "R_tube"});
      Vec3 center = Vec3::Zero();
      Vec3 normal = Vec3::UnitX();
      double R_ring = c.trajopt.ring.R_ring;
      double R_tube = c.trajopt.ring.R_tube;
      read_vec3(r, "trajopt.ring", "center", center);
      read_vec3(r, "trajopt.ring", "normal", normal);
      read(r, "trajopt.ring", "R_ring", R_ring);
      read(r, "trajopt.ring", "R_tube", R_tube);
      if (!(normal.norm() > 0.0)) throw ConfigError("trajopt.ring.normal", "must be non-zero");
      c.trajopt.ring = trajopt::RingPose::from_normal(center, normal, R_ring, R_tube);
    }
  }
  if (const auto n = root["compare"]) {
    check_keys(n, "compare", {"agents", "reps"});
    read(n, "compare", "agents", c.compare.agents);
    read(n, "compare", "reps", c.compare.reps);
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ScenarioConfig::validate() const {
  require(std::isfinite(dt_sim) && dt_sim > 0.0, "dt_sim", "must be positive");
  const bool control_mode = mode == Mode::formation || mode == Mode::scale_demo;
  const bool plan_mode = mode == Mode::trajopt_alg1 || mode == Mode::trajopt_alg2;

  if (mode == Mode::compare) {
    require(!compare.agents.empty(), "compare.agents", "must list at least one agent count");
    for (std::size_t k = 0; k < compare.agents.size(); ++k)
      require(compare.agents[k] >= 1, "compare.agents[" + std::to_string(k) + "]", "must be >= 1");
    require(compare.reps >= 1, "compare.reps", "must be >= 1");
  }

  if (mode != Mode::compare) {
    const int n = num_agents();
    require(n >= 1, plan_mode && trajopt.generator == "layered" ? "trajopt.layered_agents" : "agents",
            "at least one agent is required");
    WeightedGraph g;
    try {
      g = graph.build(n);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("graph", e.what());
    }
    for (std::size_t k = 0; k < leaders.size(); ++k)
      require(leaders[k] >= 0 && leaders[k] < n, "leaders[" + std::to_string(k) + "]",
              "id out of range 1.." + std::to_string(n));
    if (control_mode) {
      require(std::isfinite(duration) && duration > 0.0, "duration", "must be positive");
      require(!leaders.empty(), "leaders", "at least one leader is required");
      require(is_connected(g), "graph", "must be connected");
      require(tracking.gains.k_p > 0.0 && tracking.gains.k_p <= 1.0, "tracking.k_p", "must lie in (0, 1]");
      require(tracking.gains.k_v >= 0.0, "tracking.k_v", "must be non-negative");
      require(tracking.drop_probability >= 0.0 && tracking.drop_probability < 1.0, "tracking.drop_probability",
              "must lie in [0, 1)");
      require(tracking.position_noise_std >= 0.0, "tracking.position_noise_std", "must be non-negative");
      require(sensing.noise.r_std >= 0.0, "sensing.r_std", "must be non-negative");
      require(sensing.noise.theta_std >= 0.0, "sensing.theta_std", "must be non-negative");
      require(sensing.noise.phi_std >= 0.0, "sensing.phi_std", "must be non-negative");
      require(sensing.attitude_noise_std >= 0.0, "sensing.attitude_noise_std", "must be non-negative");
      require(observer.k_p > 0.0, "observer.k_p", "must be positive");
      require(observer.k_v > 0.0, "observer.k_v", "must be positive");
      require(control.k_pos > 0.0, "control.k_pos", "must be positive");
      require(control.k_vel > 0.0, "control.k_vel", "must be positive");
      require(control.a_max > 0.0, "control.a_max", "must be positive");
      require(formation.scale > 0.0, "formation.scale", "must be positive");
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          require(agents[i].p0 != agents[j].p0, "agents[" + std::to_string(j) + "].p0",
                  "coincides with agent " + std::to_string(i + 1));
      if (mode == Mode::scale_demo) {
        require(scale.s0 > 0.0, "scale.s0", "must be positive");
        require(scale.s1 > 0.0, "scale.s1", "must be positive");
        require(scale.ramp_duration >= 0.0, "scale.ramp_duration", "must be non-negative");
        Vec3 sum = Vec3::Zero();
        double size = 1.0;
        for (const auto& a : agents) {
          sum += a.shape;
          size = std::max(size, a.shape.norm());
        }
        require(sum.norm() <= 1e-9 * size * n, "agents[].shape", "formation shape must be zero-mean");
      }
    }
    if (plan_mode) {
      const auto& p = trajopt.params;
      require(trajopt.generator == "agents" || trajopt.generator == "layered", "trajopt.generator",
              "must be 'agents' or 'layered'");
      require(trajopt.horizon.K >= 4, "trajopt.K", "must be >= 4");
      require(trajopt.horizon.h > 0.0, "trajopt.h", "must be positive");
      require(p.R_collision > 0.0, "trajopt.R_collision", "must be positive");
      require(p.R_active > p.R_collision, "trajopt.R_active", "must exceed R_collision");
      require(p.M >= 1, "trajopt.M", "must be >= 1");
      require(p.M1 >= 1, "trajopt.M1", "must be >= 1");
      require(p.M2 >= 1, "trajopt.M2", "must be >= 1");
      require(p.eps > 0.0, "trajopt.eps", "must be positive");
      require(p.a_min < p.a_max, "trajopt.a_min", "must be below a_max");
      require(p.reconvexify >= 0, "trajopt.reconvexify", "must be >= 0");
      require(p.threads >= 1, "trajopt.threads", "must be >= 1");
      require(trajopt.ring.R_tube > 0.0 && trajopt.ring.R_tube <= trajopt.ring.R_ring, "trajopt.ring.R_tube",
              "must lie in (0, R_ring]");
      if (trajopt.generator == "agents")
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            require(agents[i].p0 != agents[j].p0, "agents[" + std::to_string(j) + "].p0",
                    "coincides with agent " + std::to_string(i + 1));
    }
  }
}

std::string ScenarioConfig::to_yaml() const {
  YAML::Node root;
  root["name"] = name;
  root["mode"] = to_string(mode);
  root["seed"] = seed;
  root["dt_sim"] = dt_sim;
  root["duration"] = duration;

  YAML::Node g;
  g["type"] = graph.type;
  g["weight"] = graph.weight;
  YAML::Node edges(YAML::NodeType::Sequence);
  for (const auto& e : graph.edges) {
    YAML::Node row(YAML::NodeType::Sequence);
    row.push_back(e.i + 1);
    row.push_back(e.j + 1);
    row.push_back(e.weight);
    row.SetStyle(YAML::EmitterStyle::Flow);
    edges.push_back(row);
  }
  g["edges"] = edges;
  root["graph"] = g;

  YAML::Node l(YAML::NodeType::Sequence);
  for (int i : leaders) l.push_back(i + 1);
  l.SetStyle(YAML::EmitterStyle::Flow);
  root["leaders"] = l;

  YAML::Node a(YAML::NodeType::Sequence);
  for (const auto& s : agents) {
    YAML::Node n;
    n["p0"] = vec3_node(s.p0);
    n["v0"] = vec3_node(s.v0);
    n["pf"] = vec3_node(s.pf);
    n["vf"] = vec3_node(s.vf);
    n["shape"] = vec3_node(s.shape);
    n["yaw"] = s.yaw;
    a.push_back(n);
  }
  root["agents"] = a;

  root["formation"]["center"] = vec3_node(formation.center);
  root["formation"]["scale"] = formation.scale;
  root["scale"]["s0"] = scale.s0;
  root["scale"]["s1"] = scale.s1;
  root["scale"]["ramp_start"] = scale.ramp_start;
  root["scale"]["ramp_duration"] = scale.ramp_duration;
  root["scale"]["initial_estimate"] = scale.initial_estimate;
  root["tracking"]["k_p"] = tracking.gains.k_p;
  root["tracking"]["k_v"] = tracking.gains.k_v;
  root["tracking"]["drop_probability"] = tracking.drop_probability;
  root["tracking"]["position_noise_std"] = tracking.position_noise_std;
  root["sensing"]["r_std"] = sensing.noise.r_std;
  root["sensing"]["theta_std"] = sensing.noise.theta_std;
  root["sensing"]["phi_std"] = sensing.noise.phi_std;
  root["sensing"]["attitude_noise_std"] = sensing.attitude_noise_std;
  root["observer"]["k_p"] = observer.k_p;
  root["observer"]["k_v"] = observer.k_v;
  root["control"]["k_pos"] = control.k_pos;
  root["control"]["k_vel"] = control.k_vel;
  root["control"]["a_max"] = control.a_max;
  root["control"]["feedback"] = control.use_estimates ? "estimate" : "truth";

  const auto& p = trajopt.params;
  YAML::Node t;
  t["K"] = trajopt.horizon.K;
  t["h"] = trajopt.horizon.h;
  t["R_collision"] = p.R_collision;
  t["R_active"] = p.R_active;
  t["M"] = p.M;
  t["M1"] = p.M1;
  t["M2"] = p.M2;
  t["eps"] = p.eps;
  t["a_min"] = p.a_min;
  t["a_max"] = p.a_max;
  t["alpha_m"] = p.alpha_m;
  if (p.v_cross) t["v_cross"] = *p.v_cross;
  else t["v_cross"] = YAML::Node(YAML::NodeType::Null);
  t["reconvexify"] = p.reconvexify;
  t["elastic_weight"] = p.elastic_weight;
  t["detection_slack"] = p.detection_slack;
  t["threads"] = p.threads;
  t["generator"] = trajopt.generator;
  t["layered_agents"] = trajopt.layered_agents;
  t["layered_jitter"] = trajopt.layered_jitter;
  t["ring"]["center"] = vec3_node(trajopt.ring.center);
  t["ring"]["normal"] = vec3_node(trajopt.ring.rx);
  t["ring"]["R_ring"] = trajopt.ring.R_ring;
  t["ring"]["R_tube"] = trajopt.ring.R_tube;
  root["trajopt"] = t;

  YAML::Node cmp;
  YAML::Node counts(YAML::NodeType::Sequence);
  for (int n : compare.agents) counts.push_back(n);
  counts.SetStyle(YAML::EmitterStyle::Flow);
  cmp["agents"] = counts;
  cmp["reps"] = compare.reps;
  root["compare"] = cmp;

  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << root;
  return std::string(out.c_str()) + "\n";
}

trajopt::RunScenario ScenarioConfig::trajopt_scenario() const {
  trajopt::RunScenario sc;
  if (trajopt.generator == "layered") {
    sc = trajopt::layered_scenario(trajopt.layered_agents, seed, trajopt.layered_jitter);
  } else {
    for (const auto& a : agents) sc.bcs.push_back({a.p0, a.v0, a.pf, a.vf});
  }
  sc.horizon = trajopt.horizon;
  sc.ring = trajopt.ring;
  sc.g_comm = graph.build(static_cast<int>(sc.bcs.size()));
  return sc;
}

}  // namespace swarm::sim
