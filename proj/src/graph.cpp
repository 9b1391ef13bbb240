#include "swarm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace swarm {

WeightedGraph::WeightedGraph(int num_nodes, std::vector<Edge> edges, bool directed)
    : num_nodes_(num_nodes), directed_(directed) {
  if (num_nodes < 0) throw InvalidArgument("WeightedGraph: negative node count");
  weights_ = Matrix::Zero(num_nodes, num_nodes);
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= num_nodes || e.j >= num_nodes)
      throw InvalidArgument("WeightedGraph: edge endpoint out of range");
    if (e.i == e.j) throw InvalidArgument("WeightedGraph: self-loop on node " + std::to_string(e.i + 1));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw InvalidArgument("WeightedGraph: edge weights must be strictly positive");
    if (directed_) {
      if (weights_(e.i, e.j) != 0.0) throw InvalidArgument("WeightedGraph: duplicate edge");
      weights_(e.i, e.j) = e.weight;
      edges_.push_back(e);
    } else {
      const int a = std::min(e.i, e.j);
      const int b = std::max(e.i, e.j);
      if (weights_(a, b) != 0.0) {
        if (weights_(a, b) != e.weight)
          throw InvalidArgument("WeightedGraph: undirected edge given with unequal weights");
        continue;
      }
      weights_(a, b) = weights_(b, a) = e.weight;
      edges_.push_back({a, b, e.weight});
    }
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
  neighbors_.assign(num_nodes, {});
  for (int i = 0; i < num_nodes; ++i)
    for (int j = 0; j < num_nodes; ++j)
      if (weights_(i, j) != 0.0) neighbors_[i].push_back(j);
}

WeightedGraph WeightedGraph::complete(int n, double weight) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::path(int n, double weight) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::ring(int n, double weight) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
  if (n > 2) edges.push_back({n - 1, 0, weight});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::star(int n, double weight) {
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.push_back({0, i, weight});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::empty(int n) { return WeightedGraph(n, {}); }

bool WeightedGraph::has_edge(int i, int j) const {
  if (i < 0 || j < 0 || i >= num_nodes_ || j >= num_nodes_) return false;
  return weights_(i, j) != 0.0;
}

double WeightedGraph::weight(int i, int j) const {
  if (i < 0 || j < 0 || i >= num_nodes_ || j >= num_nodes_) throw InvalidArgument("WeightedGraph: id out of range");
  return weights_(i, j);
}

int EdgeNumbering::index_of(int i, int j) const {
  const auto key = std::pair(std::min(i, j), std::max(i, j));
  for (int e = 0; e < num_edges(); ++e) {
    const auto& [s, t] = oriented[e];
    if (std::pair(std::min(s, t), std::max(s, t)) == key) return e;
  }
  return -1;
}

EdgeNumbering default_edge_numbering(const WeightedGraph& g) {
  if (g.directed()) throw InvalidArgument("default_edge_numbering: graph must be undirected");
  EdgeNumbering num;
  for (const Edge& e : g.edges()) num.oriented.emplace_back(e.i, e.j);  // edges are sorted with i < j
  return num;
}

LeaderSet::LeaderSet(std::vector<int> ids, int num_nodes) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  for (int id : ids_)
    if (id < 0 || id >= num_nodes) throw InvalidArgument("LeaderSet: leader id out of range");
}

bool LeaderSet::contains(int i) const { return std::binary_search(ids_.begin(), ids_.end(), i); }

Matrix adjacency_matrix(const WeightedGraph& g) {
  const int n = g.num_nodes();
  Matrix A = Matrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    A(e.i, e.j) = e.weight;
    if (!g.directed()) A(e.j, e.i) = e.weight;
  }
  return A;
}

Matrix degree_matrix(const WeightedGraph& g) {
  return adjacency_matrix(g).rowwise().sum().asDiagonal();
}

Matrix laplacian(const WeightedGraph& g) {
  const Matrix A = adjacency_matrix(g);
  Matrix L = -A;
  L.diagonal() += A.rowwise().sum();
  return L;
}

Matrix incidence_matrix(const WeightedGraph& g, const EdgeNumbering& numbering) {
  if (g.directed()) throw InvalidArgument("incidence_matrix: graph must be undirected");
  if (numbering.num_edges() != g.num_edges())
    throw InvalidArgument("incidence_matrix: numbering does not cover the edge set");
  Matrix B = Matrix::Zero(g.num_nodes(), numbering.num_edges());
  std::vector<bool> seen(g.num_edges(), false);
  for (int e = 0; e < numbering.num_edges(); ++e) {
    const auto [src, snk] = numbering.oriented[e];
    if (!g.has_edge(src, snk)) throw InvalidArgument("incidence_matrix: numbering names a non-edge");
    B(src, e) = 1.0;
    B(snk, e) = -1.0;
  }
  // Bijectivity: each graph edge must appear exactly once.
  for (int e = 0; e < numbering.num_edges(); ++e) {
    const auto [src, snk] = numbering.oriented[e];
    for (int f = 0; f < g.num_edges(); ++f) {
      const Edge& ge = g.edges()[f];
      if (std::min(src, snk) == ge.i && std::max(src, snk) == ge.j) {
        if (seen[f]) throw InvalidArgument("incidence_matrix: edge numbered twice");
        seen[f] = true;
      }
    }
  }
  return B;
}

Vector edge_weights(const WeightedGraph& g, const EdgeNumbering& numbering) {
  Vector w(numbering.num_edges());
  for (int e = 0; e < numbering.num_edges(); ++e) {
    const auto [src, snk] = numbering.oriented[e];
    w(e) = g.weight(src, snk);
  }
  return w;
}

Matrix selection_matrix(const LeaderSet& leaders, int num_nodes) {
  Matrix E = Matrix::Zero(num_nodes, leaders.size());
  for (int c = 0; c < leaders.size(); ++c) {
    const int id = leaders.ids()[c];
    if (id >= num_nodes) throw InvalidArgument("selection_matrix: leader id out of range");
    E(id, c) = 1.0;
  }
  return E;
}

namespace {

int reachable_count(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<bool> seen(adj.size(), false);
  std::queue<int> frontier;
  frontier.push(start);
  seen[start] = true;
  int count = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        frontier.push(v);
      }
  }
  return count;
}

}  // namespace

bool is_connected(const WeightedGraph& g) {
  const int n = g.num_nodes();
  if (n <= 1) return true;
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (int i = 0; i < n; ++i)
    for (int j : g.neighbors(i)) {
      fwd[i].push_back(j);
      rev[j].push_back(i);
    }
  if (reachable_count(fwd, 0) != n) return false;
  return !g.directed() || reachable_count(rev, 0) == n;
}

}  // namespace swarm
