#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "couponalloc/core.hpp"

namespace couponalloc::solver {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// maximize c'x  subject to  A x <= b,  lower <= x <= upper.
/// Bounds may be infinite.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::string> row_names;
  std::vector<std::string> var_names;

  /// n variables in [0, inf), m empty constraint rows.
  static LinearProgram nonnegative(Eigen::Index num_vars, Eigen::Index num_rows);

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_rows() const { return rhs.size(); }
  /// Appends a row `coeffs . x <= rhs` and returns its index.
  Eigen::Index add_row(const Eigen::VectorXd& coeffs, double rhs_value,
                       std::string name = {});
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Multiplier per constraint row (nonnegative at optimality).
  Eigen::VectorXd duals;
  /// c - A'y per variable; positive entries sit at upper bounds, negative at
  /// lower bounds.
  Eigen::VectorXd reduced_costs;
  int iterations = 0;
};

struct LpTolerances {
  double feasibility = 1e-7;
  double optimality = 1e-6;
  double pivot = 1e-9;
};

/// Two-phase primal simplex on a dense tableau. Dantzig pricing switches to
/// Bland's rule after 2(m+n) iterations of a phase. The final basis is
/// re-solved with an LU factorization to clean up accumulated round-off.
/// Throws Error when the iteration guard is exceeded.
LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol = {});

struct KktReport {
  double primal_residual = 0.0;  // scaled by 1 + |rhs|
  double dual_residual = 0.0;
  double gap = 0.0;  // |dual objective - primal objective| / (1 + |primal|)
  bool ok(double primal_tol = 1e-7, double dual_tol = 1e-6,
          double gap_tol = 1e-6) const {
    return primal_residual <= primal_tol && dual_residual <= dual_tol &&
           gap <= gap_tol;
  }
};

/// Feasibility and duality certificate check that uses only the LP data and
/// the reported primal and dual vectors.
KktReport check_kkt(const LinearProgram& lp, const LpSolution& sol);

/// Plain-text fixed-format listing (objective, rows, bounds).
std::string lp_listing(const LinearProgram& lp);

/// f(x) = linear'x - x'Qx with Q symmetric positive semidefinite.
struct ConcaveQuadratic {
  Eigen::VectorXd linear;
  Eigen::MatrixXd quadratic;

  double value(const Eigen::VectorXd& x) const {
    return linear.dot(x) - x.dot(quadratic * x);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    return linear - 2.0 * (quadratic * x);
  }
  /// Throws Error if Q is not symmetric PSD (up to a relative 1e-9 slack).
  void check_concave() const;
};

struct FrankWolfeResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

/// Away-step Frank-Wolfe with exact line search over the feasible set of
/// `polytope` (its objective is ignored). Stops when the Frank-Wolfe gap is
/// at most rel_tol * (1 + |f(x)|) or after max_iter iterations.
FrankWolfeResult frank_wolfe(const ConcaveQuadratic& f,
                             const LinearProgram& polytope, int max_iter,
                             double rel_tol, const LpTolerances& lp_tol = {});

}  // namespace couponalloc::solver
