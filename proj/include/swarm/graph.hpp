#pragma once

#include "swarm/numerics.hpp"

#include <utility>
#include <vector>

namespace swarm {

/// Weighted edge between 0-based node indices. In undirected graphs an edge
/// is stored once with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
};

/// Weighted (di)graph over nodes 0..n-1. Node ids are 1-based at the I/O
/// boundary (scenario files, traces, CLI) and 0-based everywhere in code.
///
/// Immutable after construction; the constructor rejects self-loops,
/// non-positive weights, out-of-range ids and duplicate edges. For undirected
/// graphs a pair given in both orientations must carry equal weights and is
/// folded into one edge.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(int num_nodes, std::vector<Edge> edges, bool directed = false);

  static WeightedGraph complete(int n, double weight = 1.0);
  static WeightedGraph path(int n, double weight = 1.0);
  static WeightedGraph ring(int n, double weight = 1.0);
  static WeightedGraph star(int n, double weight = 1.0);
  static WeightedGraph empty(int n);

  int num_nodes() const { return num_nodes_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  bool directed() const { return directed_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Out-neighbors (all neighbors when undirected), ascending.
  const std::vector<int>& neighbors(int i) const { return neighbors_.at(i); }
  int degree(int i) const { return static_cast<int>(neighbors_.at(i).size()); }
  bool has_edge(int i, int j) const;
  /// Weight of (i, j), 0 when absent.
  double weight(int i, int j) const;

 private:
  int num_nodes_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
  Matrix weights_;
};

/// Edge index plus orientation (source -> sink) for the incidence matrix.
struct EdgeNumbering {
  std::vector<std::pair<int, int>> oriented;  ///< index e -> (source, sink)

  int num_edges() const { return static_cast<int>(oriented.size()); }
  /// Index of the undirected edge {i, j}; -1 if not numbered.
  int index_of(int i, int j) const;
};

/// Lexicographic numbering by (min id, max id), source = smaller id.
EdgeNumbering default_edge_numbering(const WeightedGraph& g);

/// Nodes carrying global sensing or scale knowledge; sorted, unique, 0-based.
class LeaderSet {
 public:
  LeaderSet() = default;
  LeaderSet(std::vector<int> ids, int num_nodes);

  const std::vector<int>& ids() const { return ids_; }
  bool contains(int i) const;
  bool empty() const { return ids_.empty(); }
  int size() const { return static_cast<int>(ids_.size()); }

 private:
  std::vector<int> ids_;
};

Matrix adjacency_matrix(const WeightedGraph& g);
Matrix degree_matrix(const WeightedGraph& g);
/// L = diag(A 1) - A.
Matrix laplacian(const WeightedGraph& g);
/// N x m signed incidence matrix; requires an undirected graph and a
/// numbering covering exactly its edges.
Matrix incidence_matrix(const WeightedGraph& g, const EdgeNumbering& numbering);
/// Edge weights ordered by the numbering.
Vector edge_weights(const WeightedGraph& g, const EdgeNumbering& numbering);
/// N x |V_g| matrix whose columns are e_i for each leader i.
Matrix selection_matrix(const LeaderSet& leaders, int num_nodes);

/// Connectivity (undirected) or strong connectivity (directed).
bool is_connected(const WeightedGraph& g);

}  // namespace swarm
