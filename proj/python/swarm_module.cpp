// Python bindings. Rich results cross the boundary as JSON text and are
// decoded on the Python side.
#include "swarm/graph.hpp"
#include "swarm/numerics.hpp"
#include "swarm/sensing.hpp"
#include "swarm/sim.hpp"
#include "swarm/simnet.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace swarm;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::string trace_level;
  bool wall_clock;
  std::optional<int> threads;
};

std::pair<sim::ScenarioConfig, sim::RunOptions> prepare(const std::string& path, const Overrides& o) {
  auto cfg = sim::ScenarioConfig::load(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.trajopt.params.threads = *o.threads;
  sim::RunOptions opts;
  if (o.out_dir) opts.out_dir = *o.out_dir;
  opts.trace_level = sim::parse_trace_level(o.trace_level);
  opts.wall_clock = o.wall_clock;
  return {cfg, opts};
}

std::string report_json(const sim::RunReport& r) {
  nlohmann::json j;
  j["summary"] = r.summary;
  j["hash"] = simnet::hex_digest(r.hash);
  j["exit_code"] = r.exit_code();
  j["convergence_failure"] = r.convergence_failure;
  j["solver_failure"] = r.solver_failure;
  j["track_lost"] = r.track_lost;
  j["files"] = nlohmann::json::array();
  for (const auto& [name, _] : r.files) j["files"].push_back(name);
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_swarm, m) {
  py::register_exception<sim::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def(
      "run_json",
      [](const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> out_dir,
         const std::string& trace_level, bool wall_clock, std::optional<int> threads) {
        auto [cfg, opts] = prepare(path, {seed, out_dir, trace_level, wall_clock, threads});
        py::gil_scoped_release release;
        return report_json(sim::run(cfg, opts));
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("out_dir") = py::none(),
      py::arg("trace_level") = "standard", py::arg("wall_clock") = true, py::arg("threads") = py::none());

  m.def(
      "compare_json",
      [](const std::string& path, const std::vector<int>& agents, int reps, std::optional<std::uint64_t> seed,
         std::optional<std::string> out_dir, const std::string& trace_level, bool wall_clock,
         std::optional<int> threads) {
        if (reps < 1) throw sim::ConfigError("reps", "must be >= 1");
        auto [cfg, opts] = prepare(path, {seed, out_dir, trace_level, wall_clock, threads});
        py::gil_scoped_release release;
        return report_json(sim::run_compare(cfg, agents, reps, opts));
      },
      py::arg("config"), py::arg("agents"), py::arg("reps"), py::arg("seed") = py::none(),
      py::arg("out_dir") = py::none(), py::arg("trace_level") = "standard", py::arg("wall_clock") = true,
      py::arg("threads") = py::none());

  m.def(
      "check_stability_json",
      [](const std::string& path) {
        auto cfg = sim::ScenarioConfig::load(path);
        cfg.validate();
        return sim::check_stability(cfg).dump();
      },
      py::arg("config"));

  m.def(
      "laplacian",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges) {
        std::vector<Edge> es;
        for (const auto& [i, j, w] : edges) es.push_back({i, j, w});
        return laplacian(WeightedGraph(n, es));
      },
      py::arg("n"), py::arg("edges"), "Weighted Laplacian; edges are (i, j, weight) with 0-based nodes.");

  m.def("min_real_eigenvalue", &min_real_eigenvalue, py::arg("m"));

  m.def(
      "sensor_reading",
      [](const Vec3& p_i, const Vec3& p_j, const Vec3& rotation_vector) {
        const auto s = sensing::simulate_sensor(p_i, p_j, sensing::Attitude::from_rotation_vector(rotation_vector));
        return py::make_tuple(s.r, s.theta, s.phi);
      },
      py::arg("p_i"), py::arg("p_j"), py::arg("rotation_vector"), "(r, theta, phi) of p_j seen from p_i.");

  m.def(
      "reading_to_global",
      [](double r, double theta, double phi, const Vec3& rotation_vector) {
        return Vec3(sensing::reading_to_global({r, theta, phi}, sensing::Attitude::from_rotation_vector(rotation_vector)));
      },
      py::arg("r"), py::arg("theta"), py::arg("phi"), py::arg("rotation_vector"));

  m.def(
      "solve_qp",
      [](const Matrix& Q, const Vector& q, std::optional<Matrix> A_eq, std::optional<Vector> b_eq,
         std::optional<Matrix> A_in, std::optional<Vector> b_in) {
        QpProblem p = QpProblem::with_size(static_cast<int>(q.size()));
        p.Q = Q;
        p.q = q;
        if (A_eq) p.A_eq = *A_eq;
        if (b_eq) p.b_eq = *b_eq;
        if (A_in) p.A_in = *A_in;
        if (b_in) p.b_in = *b_in;
        const QpSolution s = solve_qp(p);
        return py::make_tuple(to_string(s.status), s.x, s.objective);
      },
      py::arg("Q"), py::arg("q"), py::arg("A_eq") = py::none(), py::arg("b_eq") = py::none(),
      py::arg("A_in") = py::none(), py::arg("b_in") = py::none(),
      "min 1/2 x'Qx + q'x s.t. A_eq x = b_eq, A_in x <= b_in. Returns (status, x, objective).");
}
