#pragma once
// Independent reference computations for tests. Nothing here calls into the
// solvers under test except for building inputs.

#include "swarm/graph.hpp"
#include "swarm/numerics.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using swarm::Matrix;
using swarm::Vector;

/// Random connected undirected graph: random spanning tree plus extra edges.
inline swarm::WeightedGraph random_connected_graph(int n, std::mt19937_64& rng, bool random_weights = true,
                                                   double extra_edge_prob = 0.3) {
  std::uniform_real_distribution<double> w(0.2, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<swarm::Edge> edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    const int a = order[k], b = order[pick(rng)];
    edges.push_back({std::min(a, b), std::max(a, b), random_weights ? w(rng) : 1.0});
    used[a][b] = used[b][a] = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!used[i][j] && u(rng) < extra_edge_prob) edges.push_back({i, j, random_weights ? w(rng) : 1.0});
  return swarm::WeightedGraph(n, edges);
}

/// Result of exhaustive active-set enumeration.
struct EnumResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  Vector x;
  int optimal_sets = 0;  ///< distinct minimizers found (argmin unique when Q is PD)
};

/// Solves min 1/2 x'Qx + q'x s.t. A_eq x = b_eq, A_in x <= b_in by trying every
/// subset of inequalities as equalities: each KKT candidate is kept when it is
/// primal feasible with nonnegative multipliers; the best objective wins.
inline EnumResult enumerate_active_sets(const swarm::QpProblem& p, double tol = 1e-9) {
  const int n = p.num_vars(), me = p.num_eq(), mi = p.num_in();
  EnumResult best;
  for (unsigned mask = 0; mask < (1u << mi); ++mask) {
    std::vector<int> act;
    for (int k = 0; k < mi; ++k)
      if (mask & (1u << k)) act.push_back(k);
    const int m = me + static_cast<int>(act.size());
    if (m > n) continue;
    Matrix A(m, n);
    Vector b(m);
    if (me) {
      A.topRows(me) = p.A_eq;
      b.head(me) = p.b_eq;
    }
    for (std::size_t r = 0; r < act.size(); ++r) {
      A.row(me + r) = p.A_in.row(act[r]);
      b(me + r) = p.b_in(act[r]);
    }
    Matrix K = Matrix::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = p.Q;
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
    Vector rhs(n + m);
    rhs.head(n) = -p.q;
    rhs.tail(m) = b;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
    const Vector sol = cod.solve(rhs);
    if ((K * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) continue;
    const Vector x = sol.head(n);
    const Vector lam = sol.tail(m);
    bool ok = true;
    for (std::size_t r = 0; r < act.size() && ok; ++r) ok = lam(me + r) >= -tol;
    if (mi && ok) ok = ((p.A_in * x - p.b_in).array() <= tol).all();
    if (me && ok) ok = (p.A_eq * x - p.b_eq).lpNorm<Eigen::Infinity>() <= 1e-8;
    if (!ok) continue;
    const double v = p.objective(x);
    if (!best.feasible || v < best.value - 1e-10) {
      best.feasible = true;
      best.value = v;
      best.x = x;
      best.optimal_sets = 1;
    } else if (std::abs(v - best.value) <= 1e-10 && (x - best.x).norm() > 1e-7) {
      ++best.optimal_sets;
    }
  }
  return best;
}

/// Random bounded QP around a known feasible point. Positive definite Q unless
/// `semidefinite`, in which case q lies in range(Q) so the problem stays bounded.
inline swarm::QpProblem random_qp(int n, int me, int mi, std::mt19937_64& rng, bool semidefinite = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  auto rnd = [&](int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
  };
  swarm::QpProblem p;
  const int rank = semidefinite ? std::max(1, n - 2) : n;
  const Matrix F = rnd(rank, n);
  p.Q = F.transpose() * F + (semidefinite ? 0.0 : 0.1) * Matrix::Identity(n, n);
  p.q = semidefinite ? Vector(p.Q * rnd(n, 1).col(0)) : Vector(rnd(n, 1).col(0));
  const Vector x0 = rnd(n, 1).col(0);
  p.A_eq = rnd(me, n);
  p.b_eq = p.A_eq * x0;
  p.A_in = rnd(mi, n);
  p.b_in = p.A_in * x0;
  for (int k = 0; k < mi; ++k) p.b_in(k) += slack(rng);
  return p;
}

/// Classical RK4 for x' = f(x).
inline Vector rk4(const std::function<Vector(const Vector&)>& f, Vector x, double dt, long steps) {
  for (long s = 0; s < steps; ++s) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * dt * k1);
    const Vector k3 = f(x + 0.5 * dt * k2);
    const Vector k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// exp(M t) x0 through the Pade-based matrix exponential.
inline Vector expm_apply(const Matrix& M, double t, const Vector& x0) {
  const Matrix E = (M * t).exp();
  return E * x0;
}

/// Roots of the characteristic polynomial of a 2x2 matrix.
inline std::pair<double, double> eig2x2(const Matrix& m) {
  const double tr = m(0, 0) + m(1, 1);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  return {(tr - disc) / 2.0, (tr + disc) / 2.0};
}

/// Minimum distance between two sampled position sequences (rows = samples).
inline double min_distance_scan(const Matrix& a, const Matrix& b) {
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < a.rows(); ++k) d = std::min(d, (a.row(k) - b.row(k)).norm());
  return d;
}

}  // namespace oracle
