#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <string_view>
#include <vector>

namespace tubempc::convex {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Convex quadratic inequality 0.5 * y' Q y + a' x <= b, where y = x[index].
struct QuadraticRow {
  std::vector<Eigen::Index> index;
  Eigen::MatrixXd Q;     // symmetric PSD, size index.size()
  Eigen::VectorXd a;     // dense over the full decision vector
  double b = 0.0;
};

/**
 * Dense-or-sparse convex program
 *
 *   minimise    0.5 x' P x + q' x + r
 *   subject to  A x  = b
 *               G x <= h
 *               0.5 y_i' Q_i y_i + a_i' x <= b_i
 *
 * P must be PSD on the null space of A.
 */
struct ConvexProgram {
  Eigen::Index num_vars = 0;
  SparseMatrix P;
  Eigen::VectorXd q;
  double r = 0.0;
  SparseMatrix A;
  Eigen::VectorXd b;
  SparseMatrix G;
  Eigen::VectorXd h;
  std::vector<QuadraticRow> quadratic;

  explicit ConvexProgram(Eigen::Index n = 0);

  double objective(const Eigen::VectorXd& x) const;
};

enum class SolveStatus { optimal, infeasible, max_iter };

std::string_view to_string(SolveStatus s);

struct SolverOptions {
  double feas_tol = 1e-10;   // primal/dual residual, scaled by 1 + |data|
  double gap_tol = 1e-10;    // s'lambda, scaled by 1 + |objective|
  int max_iter = 120;
  double regularization = 1e-10;
  // Phase-1 optimum above this value certifies infeasibility.
  double infeasibility_tol = 1e-7;
};

struct ConvexSolution {
  Eigen::VectorXd x;
  double value = 0.0;
  SolveStatus status = SolveStatus::max_iter;
  Eigen::VectorXd eq_dual;    // nu: stationarity reads grad f + A' nu + ... = 0
  Eigen::VectorXd ineq_dual;  // multipliers of G rows (dropped zero rows get 0)
  Eigen::VectorXd quad_dual;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  // Phase-1 optimum when infeasibility was diagnosed, else NaN.
  double phase1_value = 0.0;
};

/// Primal-dual log-barrier interior point method with Mehrotra correction and
/// an infeasible start. When the main iteration fails to converge a phase-1
/// program min{s : G x - h <= s, A x = b, s >= -1} decides feasibility.
/// Deterministic: the same inputs always give bit-identical outputs.
ConvexSolution solve_convex(const ConvexProgram& prog,
                            const std::optional<Eigen::VectorXd>& x0_hint = std::nullopt,
                            const SolverOptions& opts = {});

}  // namespace tubempc::convex
