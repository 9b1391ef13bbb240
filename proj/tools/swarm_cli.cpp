// Command line front end: run, check-stability, compare.
#include "swarm/sim.hpp"
#include "swarm/simnet.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw swarm::sim::ConfigError("--agents", "not an integer: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw swarm::sim::ConfigError("--agents", "empty list");
  return out;
}

void print_summary(const swarm::sim::RunReport& r) {
  nlohmann::json j = r.summary;
  j["hash"] = swarm::simnet::hex_digest(r.hash);
  j["exit_code"] = r.exit_code();
  std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent formation, estimation and ring-crossing trajectory simulator"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string trace_level = "standard";
  bool no_wall_clock = false;
  std::optional<int> threads;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--out-dir", out_dir, "Directory for traces and report.json");
    sub->add_option("--trace-level", trace_level, "summary | standard | full")
        ->check(CLI::IsMember({"summary", "standard", "full"}));
    sub->add_flag("--no-wall-clock", no_wall_clock, "Write 0 for every solver time (byte-identical reruns)");
    sub->add_option("--threads", threads, "Worker threads for the trajectory solvers");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("config", config_path, "Scenario YAML")->required();
  add_common(run);

  auto* stab = app.add_subcommand("check-stability", "Check observer, controller and scale-estimator stability");
  stab->add_option("config", config_path, "Scenario YAML")->required();

  std::string agents = "4,8,12,16,20";
  int reps = 20;
  auto* cmp = app.add_subcommand("compare", "Baseline versus distributed planner sweep over agent counts");
  cmp->add_option("config", config_path, "Scenario YAML")->required();
  cmp->add_option("--agents", agents, "Comma-separated agent counts");
  cmp->add_option("--reps", reps, "Repetitions per agent count");
  add_common(cmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto cfg = swarm::sim::ScenarioConfig::load(config_path);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.trajopt.params.threads = *threads;

    swarm::sim::RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    opts.trace_level = swarm::sim::parse_trace_level(trace_level);
    opts.wall_clock = !no_wall_clock;

    if (*stab) {
      cfg.validate();
      const auto j = swarm::sim::check_stability(cfg);
      std::cout << j.dump(2) << '\n';
      return j.value("stable", false) ? 0 : 2;
    }
    if (*cmp) {
      if (reps < 1) throw swarm::sim::ConfigError("--reps", "must be >= 1");
      const auto report = swarm::sim::run_compare(cfg, parse_int_list(agents), reps, opts);
      print_summary(report);
      return report.exit_code();
    }
    const auto report = swarm::sim::run(cfg, opts);
    print_summary(report);
    return report.exit_code();
  } catch (const swarm::sim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const swarm::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  }
}
