#include "oracles.hpp"
#include "swarm/graph.hpp"

#include <gtest/gtest.h>

using namespace swarm;

TEST(Adjacency, SingleUndirectedEdge) {
  const WeightedGraph g(2, {{0, 1, 1.0}});
  Matrix expected(2, 2);
  expected << 0, 1, 1, 0;
  EXPECT_EQ(adjacency_matrix(g), expected);
}

TEST(Adjacency, EmptyGraphIsZero) { EXPECT_EQ(adjacency_matrix(WeightedGraph::empty(3)), Matrix::Zero(3, 3)); }

TEST(Adjacency, DirectedEdgeIsAsymmetric) {
  const WeightedGraph g(2, {{0, 1, 0.5}}, true);
  const Matrix A = adjacency_matrix(g);
  EXPECT_DOUBLE_EQ(A(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(A(1, 0), 0.0);
}

TEST(Laplacian, Paths) {
  Matrix L2(2, 2);
  L2 << 1, -1, -1, 1;
  EXPECT_EQ(laplacian(WeightedGraph::path(2)), L2);
  Matrix L3(3, 3);
  L3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  EXPECT_EQ(laplacian(WeightedGraph::path(3)), L3);
}

TEST(Laplacian, CompleteK3) {
  const Matrix L = laplacian(WeightedGraph::complete(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(L(i, j), i == j ? 2.0 : -1.0);
}

TEST(Incidence, SingleEdgeColumn) {
  const WeightedGraph g = WeightedGraph::path(2);
  const Matrix B = incidence_matrix(g, default_edge_numbering(g));
  ASSERT_EQ(B.cols(), 1);
  EXPECT_DOUBLE_EQ(B(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(B(1, 0), -1.0);
}

TEST(Incidence, TriangleSignPattern) {
  const WeightedGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  EdgeNumbering num;
  num.oriented = {{0, 1}, {1, 2}, {0, 2}};
  const Matrix B = incidence_matrix(g, num);
  Matrix expected(3, 3);
  expected << 1, 0, 1, -1, 1, 0, 0, -1, -1;
  EXPECT_EQ(B, expected);
}

TEST(Incidence, NumberingMismatchThrows) {
  const WeightedGraph g = WeightedGraph::path(3);
  EdgeNumbering num;
  num.oriented = {{0, 1}};
  EXPECT_THROW(incidence_matrix(g, num), InvalidArgument);
}

TEST(Selection, LeaderColumns) {
  Matrix E = selection_matrix(LeaderSet({0}, 3), 3);
  ASSERT_EQ(E.cols(), 1);
  EXPECT_EQ(E.col(0), Vector::Unit(3, 0));
  E = selection_matrix(LeaderSet({0, 2}, 3), 3);
  ASSERT_EQ(E.cols(), 2);
  EXPECT_EQ(E.col(0), Vector::Unit(3, 0));
  EXPECT_EQ(E.col(1), Vector::Unit(3, 2));
}

TEST(Selection, LeaderOutOfRangeThrows) { EXPECT_THROW(LeaderSet({3}, 3), InvalidArgument); }

TEST(Connectivity, Cases) {
  EXPECT_TRUE(is_connected(WeightedGraph::path(3)));
  EXPECT_FALSE(is_connected(WeightedGraph::empty(2)));
  EXPECT_TRUE(is_connected(WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}, true)));
  EXPECT_FALSE(is_connected(WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}}, true)));
}

TEST(GraphIdentities, RandomConnectedGraphs) {
  std::mt19937_64 rng(17);
  for (int c = 0; c < 50; ++c) {
    const int n = 2 + c % 7;
    const WeightedGraph g = oracle::random_connected_graph(n, rng);
    const auto num = default_edge_numbering(g);
    const Matrix B = incidence_matrix(g, num);
    const Vector a = edge_weights(g, num);
    const Matrix L = laplacian(g);
    EXPECT_LE((L * Vector::Ones(n)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((B.transpose() * Vector::Ones(n)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((L - B * a.asDiagonal() * B.transpose()).lpNorm<Eigen::Infinity>(), 1e-12);
    const Vector ev = sym_eigenvalues(L);
    EXPECT_NEAR(ev(0), 0.0, 1e-12);
    EXPECT_GT(ev(1), 1e-9);
  }
}
