#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace swarm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised for malformed inputs (dimension mismatches, asymmetric matrices, bad ids).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Double-integrator state of one agent.
struct AgentState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

/// Forward-Euler step of the double integrator: p' = p + v dt, v' = v + a dt.
AgentState euler_step(const AgentState& state, const Vec3& accel, double dt);

/// Stacked forward difference operator. Input layout is x[k * dims + d] for
/// k in [0, K); output row (k, d) is (x[k+1, d] - x[k, d]) / h.
Matrix forward_difference_matrix(int K, double h, int dims);

/// Ascending eigenvalues of a symmetric matrix. Throws if asymmetric beyond 1e-10.
Vector sym_eigenvalues(const Matrix& m);

/// Smallest real part over the (possibly complex) spectrum of a square matrix.
/// Uses the symmetric solver when the matrix is symmetric.
double min_real_eigenvalue(const Matrix& m);

/// True when every eigenvalue of m has real part clearly above zero; values
/// within roundoff of zero (scaled by the matrix norm) count as zero.
bool has_positive_spectrum(const Matrix& m);

// ---------------------------------------------------------------------------
// Quadratic programming
// ---------------------------------------------------------------------------

/// minimize 1/2 x'Qx + q'x  subject to  A_eq x = b_eq,  A_in x <= b_in.
struct QpProblem {
  Matrix Q;
  Vector q;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_in;
  Vector b_in;

  /// Empty problem over n variables (Q = 0, no constraints).
  static QpProblem with_size(int n);

  int num_vars() const { return static_cast<int>(q.size()); }
  int num_eq() const { return static_cast<int>(b_eq.size()); }
  int num_in() const { return static_cast<int>(b_in.size()); }

  double objective(const Vector& x) const { return 0.5 * x.dot(Q * x) + q.dot(x); }

  /// Throws InvalidArgument on inconsistent dimensions, asymmetric Q or non-finite data.
  void validate() const;
};

enum class QpStatus { optimal, infeasible, max_iter };

std::string to_string(QpStatus status);

struct QpSolution {
  Vector x;
  Vector y_eq;  ///< equality multipliers
  Vector y_in;  ///< inequality multipliers (>= 0 at optimum)
  QpStatus status = QpStatus::max_iter;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool polished = false;

  bool ok() const { return status == QpStatus::optimal; }
};

/// `automatic` uses the dual active-set method when Q is positive definite
/// and operator splitting otherwise.
enum class QpMethod { automatic, admm, active_set };

struct QpSettings {
  QpMethod method = QpMethod::automatic;
  double tol = 1e-8;  ///< absolute feasibility / stationarity tolerance
  int max_iter = 20000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;  ///< over-relaxation
  int check_interval = 25;
  bool polish = true;
  bool adaptive_rho = true;
  int scaling_iters = 10;          ///< Ruiz equilibration passes
  double infeasibility_tol = 1e-4;  ///< relative tolerance of the infeasibility certificate
};

/// QP solver. Strictly convex problems go to a dual active-set method; the
/// rest use operator splitting (ADMM) with an active-set polish step. Purely
/// equality-constrained problems are solved directly from the KKT system.
QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {},
                    const std::optional<Vector>& warm_start = std::nullopt);

/// Euclidean projection of x0 onto {A_eq x = b_eq, A_in x <= b_in}. Any cost
/// terms already present in `set` are replaced by ||x - x0||^2.
QpSolution project_onto(const QpProblem& set, const Vector& x0, const QpSettings& settings = {});

/// Largest violation of the problem's constraints at x (0 when feasible).
double constraint_violation(const QpProblem& problem, const Vector& x);

}  // namespace swarm
