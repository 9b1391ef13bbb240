#include "swarm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace swarm {

AgentState euler_step(const AgentState& state, const Vec3& accel, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("euler_step: dt must be positive");
  AgentState next;
  next.p = state.p + state.v * dt;
  next.v = state.v + accel * dt;
  return next;
}

Matrix forward_difference_matrix(int K, double h, int dims) {
  if (K < 2) throw InvalidArgument("forward_difference_matrix: K must be >= 2");
  if (!(h > 0.0)) throw InvalidArgument("forward_difference_matrix: h must be positive");
  if (dims < 1) throw InvalidArgument("forward_difference_matrix: dims must be >= 1");
  Matrix D = Matrix::Zero(dims * (K - 1), dims * K);
  for (int k = 0; k + 1 < K; ++k) {
    for (int d = 0; d < dims; ++d) {
      D(k * dims + d, k * dims + d) = -1.0 / h;
      D(k * dims + d, (k + 1) * dims + d) = 1.0 / h;
    }
  }
  return D;
}

namespace {

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

Vector sym_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("sym_eigenvalues: matrix must be square");
  if (m.size() == 0) return Vector();
  if (!is_symmetric(m, 1e-10)) throw InvalidArgument("sym_eigenvalues: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_real_eigenvalue(const Matrix& m) {
  if (m.rows() != m.cols() || m.size() == 0)
    throw InvalidArgument("min_real_eigenvalue: matrix must be square and non-empty");
  if (is_symmetric(m, 1e-12)) return sym_eigenvalues(m)(0);
  Eigen::EigenSolver<Matrix> solver(m, false);
  return solver.eigenvalues().real().minCoeff();
}

bool has_positive_spectrum(const Matrix& m) {
  const double tol = 1e-10 * std::max(1.0, m.lpNorm<Eigen::Infinity>());
  return min_real_eigenvalue(m) > tol;
}

// ---------------------------------------------------------------------------

QpProblem QpProblem::with_size(int n) {
  QpProblem p;
  p.Q = Matrix::Zero(n, n);
  p.q = Vector::Zero(n);
  p.A_eq = Matrix::Zero(0, n);
  p.b_eq = Vector::Zero(0);
  p.A_in = Matrix::Zero(0, n);
  p.b_in = Vector::Zero(0);
  return p;
}

void QpProblem::validate() const {
  const auto n = q.size();
  if (Q.rows() != n || Q.cols() != n) throw InvalidArgument("QpProblem: Q must be n x n");
  if (A_eq.cols() != n || A_eq.rows() != b_eq.size())
    throw InvalidArgument("QpProblem: equality block dimensions mismatch");
  if (A_in.cols() != n || A_in.rows() != b_in.size())
    throw InvalidArgument("QpProblem: inequality block dimensions mismatch");
  if (!Q.allFinite() || !q.allFinite() || !A_eq.allFinite() || !b_eq.allFinite() || !A_in.allFinite() ||
      !b_in.allFinite())
    throw InvalidArgument("QpProblem: non-finite entries");
  if (n > 0 && !is_symmetric(Q, 1e-10)) throw InvalidArgument("QpProblem: Q is not symmetric");
}

std::string to_string(QpStatus status) {
  switch (status) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

double constraint_violation(const QpProblem& problem, const Vector& x) {
  double v = 0.0;
  if (problem.num_eq() > 0) v = std::max(v, (problem.A_eq * x - problem.b_eq).cwiseAbs().maxCoeff());
  if (problem.num_in() > 0) v = std::max(v, (problem.A_in * x - problem.b_in).maxCoeff());
  return v;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Solves the KKT system of the problem with every equality and the listed
/// inequality rows treated as active. Returns false if the result does not
/// satisfy the optimality conditions to `tol`.
bool polish(const QpProblem& p, const std::vector<int>& active_in, double tol, QpSolution& out) {
  const int n = p.num_vars();
  const int me = p.num_eq();
  const int ma = static_cast<int>(active_in.size());
  const int dim = n + me + ma;

  Matrix A_s(me + ma, n);
  Vector b_s(me + ma);
  if (me > 0) {
    A_s.topRows(me) = p.A_eq;
    b_s.head(me) = p.b_eq;
  }
  for (int r = 0; r < ma; ++r) {
    A_s.row(me + r) = p.A_in.row(active_in[r]);
    b_s(me + r) = p.b_in(active_in[r]);
  }

  const double delta = 1e-10 * std::max(1.0, p.Q.cwiseAbs().maxCoeff());
  Matrix K_true = Matrix::Zero(dim, dim);
  K_true.topLeftCorner(n, n) = p.Q;
  K_true.topRightCorner(n, me + ma) = A_s.transpose();
  K_true.bottomLeftCorner(me + ma, n) = A_s;
  Matrix K_reg = K_true;
  K_reg.topLeftCorner(n, n).diagonal().array() += delta;
  K_reg.bottomRightCorner(me + ma, me + ma).diagonal().array() -= delta;

  Vector rhs(dim);
  rhs.head(n) = -p.q;
  rhs.tail(me + ma) = b_s;

  Eigen::PartialPivLU<Matrix> lu(K_reg);
  Vector sol = lu.solve(rhs);
  for (int it = 0; it < 5; ++it) {
    const Vector res = rhs - K_true * sol;
    if (inf_norm(res) <= 1e-14 * std::max(1.0, inf_norm(rhs))) break;
    sol += lu.solve(res);
  }
  if (!sol.allFinite()) return false;

  const Vector x = sol.head(n);
  Vector y_eq = sol.segment(n, me);
  Vector y_in = Vector::Zero(p.num_in());
  for (int r = 0; r < ma; ++r) y_in(active_in[r]) = sol(n + me + r);

  const double scale = std::max({1.0, inf_norm(p.q), inf_norm(p.b_eq), inf_norm(p.b_in)});
  const double feas_tol = tol * scale;
  if (me > 0 && inf_norm(p.A_eq * x - p.b_eq) > feas_tol) return false;
  if (p.num_in() > 0 && (p.A_in * x - p.b_in).maxCoeff() > feas_tol) return false;
  if (ma > 0 && y_in.minCoeff() < -feas_tol) return false;

  Vector grad = p.Q * x + p.q;
  if (me > 0) grad += p.A_eq.transpose() * y_eq;
  if (p.num_in() > 0) grad += p.A_in.transpose() * y_in;
  const double dual_res = inf_norm(grad);
  if (dual_res > feas_tol) return false;

  out.x = x;
  out.y_eq = y_eq;
  out.y_in = y_in;
  out.status = QpStatus::optimal;
  out.primal_residual = constraint_violation(p, x);
  out.dual_residual = dual_res;
  out.objective = p.objective(x);
  out.polished = true;
  return true;
}


/// Goldfarb-Idnani dual active-set method for strictly convex Q.
///
/// Constraints are handled as n'x >= b (inequalities negated). The active set
/// is represented by J = L^{-T} Q-factor updates and an upper triangular R
/// with J' N = [R; 0], updated by Givens rotations on every add and drop.
/// Returns false when Q is not sufficiently positive definite.
class DualActiveSet {
 public:
  DualActiveSet(const QpProblem& p, const QpSettings& settings) : p_(p), settings_(settings) {}

  bool solve(QpSolution& out) {
    const int n = p_.num_vars();
    const int me = p_.num_eq();
    const int mi = p_.num_in();
    Eigen::LLT<Matrix> llt(p_.Q);
    if (llt.info() != Eigen::Success) return false;
    const Matrix L = llt.matrixL();
    const Vector dl = L.diagonal();
    if (dl.minCoeff() <= 1e-7 * std::max(1.0, dl.maxCoeff())) return false;

    n_ = n;
    J_ = L.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
    R_ = Matrix::Zero(n, n);
    q_ = 0;
    r_norm_ = 1.0;
    const double scale = std::max({1.0, inf_norm(p_.q), inf_norm(p_.b_eq), inf_norm(p_.b_in)});
    const double feas_tol = settings_.tol * scale;
    const double zero = 1e-14;

    Vector x = -(J_ * (J_.transpose() * p_.q));
    std::vector<int> A(n + 1, 0);  // active constraint ids (equality r, inequality me + r)
    std::vector<double> eq_sign(me, 1.0);
    Vector u = Vector::Zero(n + 1);
    Vector d(n), z(n), r(n);
    std::vector<bool> dependent_eq(me, false);
    int iterations = 0;

    auto finish = [&](QpStatus st) {
      out.x = x;
      out.y_eq = Vector::Zero(me);
      out.y_in = Vector::Zero(mi);
      for (int a = 0; a < q_; ++a) {
        if (A[a] < me) out.y_eq(A[a]) = -eq_sign[A[a]] * u(a);
        else out.y_in(A[a] - me) = u(a);
      }
      out.status = st;
      out.iterations = iterations;
      out.primal_residual = constraint_violation(p_, x);
      Vector grad = p_.Q * x + p_.q;
      if (me > 0) grad += p_.A_eq.transpose() * out.y_eq;
      if (mi > 0) grad += p_.A_in.transpose() * out.y_in;
      out.dual_residual = inf_norm(grad);
      out.objective = p_.objective(x);
      return true;
    };

    // Equalities first; a consistent dependent row is skipped.
    for (int e = 0; e < me; ++e) {
      ++iterations;
      Vector np = p_.A_eq.row(e).transpose();
      double s = np.dot(x) - p_.b_eq(e);
      if (s > 0.0) {
        eq_sign[e] = -1.0;
        np = -np;
        s = -s;
      }
      directions(np, d, z, r);
      const double zn = z.dot(np);
      if (z.norm() <= zero * std::max(1.0, np.norm()) || std::abs(zn) <= zero) {
        if (std::abs(s) <= feas_tol) {
          dependent_eq[e] = true;
          continue;
        }
        return finish(QpStatus::infeasible);
      }
      const double t = -s / zn;
      x += t * z;
      u(q_) = t;
      for (int a = 0; a < q_; ++a) u(a) -= t * r(a);
      A[q_] = e;
      if (!add_constraint(d)) {
        if (std::abs(s) <= feas_tol) {
          dependent_eq[e] = true;
          continue;
        }
        return finish(QpStatus::infeasible);
      }
    }

    const int max_iter = std::max(100, 20 * (n + me + mi));
    for (;;) {
      // Most violated inequality.
      int p = -1;
      double worst = -feas_tol;
      if (mi > 0) {
        const Vector slack = p_.b_in - p_.A_in * x;  // n'x - b in the >= form
        for (int c = 0; c < mi; ++c)
          if (slack(c) < worst) {
            worst = slack(c);
            p = c;
          }
      }
      if (p < 0) return finish(QpStatus::optimal);
      const Vector np = -p_.A_in.row(p).transpose();
      const double bp = -p_.b_in(p);
      u(q_) = 0.0;
      A[q_] = me + p;

      for (;;) {
        if (++iterations > max_iter) return finish(QpStatus::max_iter);
        const double s = np.dot(x) - bp;
        directions(np, d, z, r);
        // Partial step: first active inequality whose multiplier hits zero.
        double t1 = std::numeric_limits<double>::infinity();
        int l = -1;
        for (int a = 0; a < q_; ++a) {
          if (A[a] < me) continue;
          if (r(a) > zero && u(a) / r(a) < t1) {
            t1 = u(a) / r(a);
            l = a;
          }
        }
        const double zn = z.dot(np);
        const bool has_primal = z.norm() > zero * std::max(1.0, np.norm()) && zn > zero;
        const double t2 = has_primal ? -s / zn : std::numeric_limits<double>::infinity();
        if (std::isinf(t1) && std::isinf(t2)) return finish(QpStatus::infeasible);
        const double t = std::min(t1, t2);
        if (!has_primal) {
          for (int a = 0; a < q_; ++a) u(a) -= t * r(a);
          u(q_) += t;
          drop(l, A, u);
          continue;
        }
        x += t * z;
        for (int a = 0; a < q_; ++a) u(a) -= t * r(a);
        u(q_) += t;
        if (t2 <= t1) {
          if (!add_constraint(d)) {
            // Numerically dependent: treat the row as satisfied at the current point.
            u(q_) = 0.0;
          }
          break;
        }
        drop(l, A, u);
      }
    }
  }

 private:
  void directions(const Vector& np, Vector& d, Vector& z, Vector& r) const {
    d = J_.transpose() * np;
    z = J_.rightCols(n_ - q_) * d.tail(n_ - q_);
    r.setZero();
    if (q_ > 0)
      r.head(q_) = R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(d.head(q_));
  }

  bool add_constraint(Vector& d) {
    for (int j = n_ - 1; j >= q_ + 1; --j) {
      double cc = d(j - 1);
      double ss = d(j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d(j) = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d(j - 1) = -h;
      } else {
        d(j - 1) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j - 1);
        const double t2 = J_(k, j);
        J_(k, j - 1) = t1 * cc + t2 * ss;
        J_(k, j) = xny * (t1 + J_(k, j - 1)) - t2;
      }
    }
    ++q_;
    R_.col(q_ - 1).head(q_) = d.head(q_);
    if (std::abs(d(q_ - 1)) <= 1e-14 * r_norm_) {
      // Undo: the new column is dependent on the active set.
      R_.col(q_ - 1).setZero();
      --q_;
      return false;
    }
    r_norm_ = std::max(r_norm_, std::abs(d(q_ - 1)));
    return true;
  }

  /// Removes active entry `l`; the pending constraint at slot q_ moves down.
  void drop(int l, std::vector<int>& A, Vector& u) {
    for (int i = l; i < q_ - 1; ++i) {
      A[i] = A[i + 1];
      u(i) = u(i + 1);
      R_.col(i) = R_.col(i + 1);
    }
    A[q_ - 1] = A[q_];
    u(q_ - 1) = u(q_);
    A[q_] = 0;
    u(q_) = 0.0;
    R_.col(q_ - 1).setZero();
    --q_;
    for (int j = l; j < q_; ++j) {
      double cc = R_(j, j);
      double ss = R_(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      R_(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R_(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R_(j, j) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = j + 1; k < q_; ++k) {
        const double t1 = R_(j, k);
        const double t2 = R_(j + 1, k);
        R_(j, k) = t1 * cc + t2 * ss;
        R_(j + 1, k) = xny * (t1 + R_(j, k)) - t2;
      }
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j);
        const double t2 = J_(k, j + 1);
        J_(k, j) = t1 * cc + t2 * ss;
        J_(k, j + 1) = xny * (J_(k, j) + t1) - t2;
      }
    }
  }

  const QpProblem& p_;
  const QpSettings& settings_;
  int n_ = 0;
  int q_ = 0;
  double r_norm_ = 1.0;
  Matrix J_;
  Matrix R_;
};

bool solve_dual_active_set(const QpProblem& p, const QpSettings& settings, QpSolution& out) {
  DualActiveSet solver(p, settings);
  return solver.solve(out);
}

}  // namespace

QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings, const std::optional<Vector>& warm_start) {
  problem.validate();
  const int n = problem.num_vars();
  const int me = problem.num_eq();
  const int mi = problem.num_in();
  const int m = me + mi;

  QpSolution sol;
  sol.x = Vector::Zero(n);
  sol.y_eq = Vector::Zero(me);
  sol.y_in = Vector::Zero(mi);

  if (warm_start && warm_start->size() != n) throw InvalidArgument("solve_qp: warm start has wrong dimension");

  if (settings.method != QpMethod::admm && mi > 0) {
    if (solve_dual_active_set(problem, settings, sol)) return sol;
    if (settings.method == QpMethod::active_set)
      throw InvalidArgument("solve_qp: active-set method requires a positive definite Q");
  }

  // Equality-only (or unconstrained) problems reduce to a single KKT solve.
  if (mi == 0) {
    if (polish(problem, {}, settings.tol, sol)) return sol;
    // Inconsistent equalities or an unbounded direction.
    sol.status = QpStatus::infeasible;
    sol.primal_residual = constraint_violation(problem, sol.x);
    return sol;
  }

  Matrix A(m, n);
  Vector l(m), u(m);
  if (me > 0) {
    A.topRows(me) = problem.A_eq;
    l.head(me) = problem.b_eq;
    u.head(me) = problem.b_eq;
  }
  A.bottomRows(mi) = problem.A_in;
  l.tail(mi).setConstant(-kInf);
  u.tail(mi) = problem.b_in;

  // Ruiz equilibration of the KKT matrix plus a cost scaling c. The iteration
  // runs on  min c/2 x'(DPD)x + c q'D x,  E l <= E A D x <= E u.
  Vector D = Vector::Ones(n);
  Vector E = Vector::Ones(m);
  Matrix Ps = problem.Q;
  Matrix As = A;
  for (int pass = 0; pass < settings.scaling_iters; ++pass) {
    Vector dn(n), em(m);
    for (int j = 0; j < n; ++j) {
      double c = Ps.col(j).cwiseAbs().maxCoeff();
      if (m > 0) c = std::max(c, As.col(j).cwiseAbs().maxCoeff());
      dn(j) = c < 1e-8 ? 1.0 : 1.0 / std::sqrt(c);
    }
    for (int r = 0; r < m; ++r) {
      const double c = As.row(r).cwiseAbs().maxCoeff();
      em(r) = c < 1e-8 ? 1.0 : 1.0 / std::sqrt(c);
    }
    Ps = dn.asDiagonal() * Ps * dn.asDiagonal();
    As = em.asDiagonal() * As * dn.asDiagonal();
    D = D.cwiseProduct(dn);
    E = E.cwiseProduct(em);
  }
  Vector qs = D.cwiseProduct(problem.q);
  double cost_scale = 1.0;
  {
    const double mean_col = n > 0 ? Ps.cwiseAbs().colwise().maxCoeff().mean() : 0.0;
    const double s = std::max(mean_col, inf_norm(qs));
    if (s > 1e-8) cost_scale = std::clamp(1.0 / s, 1e-4, 1e4);
  }
  Ps *= cost_scale;
  qs *= cost_scale;
  const Vector ls = E.cwiseProduct(l);  // -inf stays -inf
  const Vector us = E.cwiseProduct(u);
  const Vector Dinv = D.cwiseInverse();
  const Vector Einv = E.cwiseInverse();
  const Matrix Ast = As.transpose();

  double rho = settings.rho;
  Vector rho_vec(m);
  auto set_rho = [&](double r) {
    rho = std::clamp(r, 1e-6, 1e6);
    rho_vec.head(me).setConstant(1e3 * rho);
    rho_vec.tail(mi).setConstant(rho);
  };
  set_rho(rho);

  Eigen::LLT<Matrix> llt;
  auto factor = [&]() {
    Matrix Kmat = Ps + Ast * rho_vec.asDiagonal() * As;
    Kmat.diagonal().array() += settings.sigma;
    llt.compute(Kmat);
  };
  factor();

  Vector x = warm_start ? Vector(Dinv.cwiseProduct(*warm_start)) : Vector::Zero(n);
  Vector z = (As * x).cwiseMax(ls).cwiseMin(us);
  Vector y = Vector::Zero(m);
  Vector y_prev = y;
  int cert_hits = 0;
  std::vector<int> last_active;
  bool have_last_active = false;

  const double alpha = settings.alpha;
  const double eps = settings.tol;

  auto unscaled = [&](QpSolution& s, QpStatus status) {
    s.x = D.cwiseProduct(x);
    const Vector yu = E.cwiseProduct(y) / cost_scale;
    s.y_eq = yu.head(me);
    s.y_in = yu.tail(mi).cwiseMax(0.0);
    s.status = status;
    s.objective = problem.objective(s.x);
    s.primal_residual = constraint_violation(problem, s.x);
  };

  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    const Vector rhs = settings.sigma * x - qs + Ast * (rho_vec.cwiseProduct(z) - y);
    const Vector x_tilde = llt.solve(rhs);
    const Vector z_tilde = As * x_tilde;
    x = alpha * x_tilde + (1.0 - alpha) * x;
    const Vector z_relax = alpha * z_tilde + (1.0 - alpha) * z;
    const Vector z_next = (z_relax + y.cwiseQuotient(rho_vec)).cwiseMax(ls).cwiseMin(us);
    y += rho_vec.cwiseProduct(z_relax - z_next);
    z = z_next;

    if (iter % settings.check_interval != 0 && iter != settings.max_iter) continue;

    // Residuals in the original units.
    const Vector Ax = Einv.cwiseProduct(As * x);
    const Vector zu = Einv.cwiseProduct(z);
    const Vector Px = Dinv.cwiseProduct(Ps * x) / cost_scale;
    const Vector Aty = Dinv.cwiseProduct(Ast * y) / cost_scale;
    const Vector qu = Dinv.cwiseProduct(qs) / cost_scale;
    const double r_prim = inf_norm(Ax - zu);
    const double r_dual = inf_norm(Px + qu + Aty);
    const double prim_scale = std::max(inf_norm(Ax), inf_norm(zu));
    const double dual_scale = std::max({inf_norm(Px), inf_norm(Aty), inf_norm(qu)});
    sol.iterations = iter;
    sol.primal_residual = r_prim;
    sol.dual_residual = r_dual;

    const bool converged = r_prim <= eps * (1.0 + prim_scale) && r_dual <= eps * (1.0 + dual_scale);
    const bool near = r_prim <= 1e-3 * (1.0 + prim_scale) && r_dual <= 1e-3 * (1.0 + dual_scale);

    if (settings.polish && (near || converged)) {
      std::vector<int> active;
      for (int r = 0; r < mi; ++r) {
        const int row = me + r;
        if (us(row) - z(row) < y(row)) active.push_back(r);
      }
      if (!have_last_active || active != last_active) {
        if (polish(problem, active, eps, sol)) {
          sol.iterations = iter;
          return sol;
        }
        last_active = std::move(active);
        have_last_active = true;
      }
    }

    if (converged) {
      unscaled(sol, QpStatus::optimal);
      return sol;
    }

    // Primal infeasibility certificate on the (unscaled) dual increment.
    const Vector dy = E.cwiseProduct(y - y_prev);
    y_prev = y;
    const double dy_norm = inf_norm(dy);
    if (dy_norm > 1e-12) {
      const double cert_tol = settings.infeasibility_tol * dy_norm;
      bool certificate = inf_norm(problem.A_eq.transpose() * dy.head(me) + problem.A_in.transpose() * dy.tail(mi)) <= cert_tol;
      double support = 0.0;
      for (int r = 0; r < m && certificate; ++r) {
        if (dy(r) > 0.0) {
          support += u(r) * dy(r);
        } else if (dy(r) < 0.0) {
          if (std::isinf(l(r))) {
            if (dy(r) < -cert_tol) certificate = false;
          } else {
            support += l(r) * dy(r);
          }
        }
      }
      certificate = certificate && support < -cert_tol;
      cert_hits = certificate ? cert_hits + 1 : 0;
      if (cert_hits >= 2) {
        unscaled(sol, QpStatus::infeasible);
        return sol;
      }
    }

    if (settings.adaptive_rho) {
      const double num = r_prim / std::max(prim_scale, 1e-12);
      const double den = r_dual / std::max(dual_scale, 1e-12);
      if (num > 0.0 && den > 0.0) {
        const double ratio = std::sqrt(num / den);
        if (ratio > 5.0 || ratio < 0.2) {
          set_rho(rho * ratio);
          factor();
        }
      }
    }
  }

  unscaled(sol, QpStatus::max_iter);
  return sol;
}

QpSolution project_onto(const QpProblem& set, const Vector& x0, const QpSettings& settings) {
  QpProblem p = set;
  const auto n = x0.size();
  if (p.q.size() != n) throw InvalidArgument("project_onto: point has wrong dimension");
  p.Q = 2.0 * Matrix::Identity(n, n);
  p.q = -2.0 * x0;
  return solve_qp(p, settings, x0);
}

}  // namespace swarm
