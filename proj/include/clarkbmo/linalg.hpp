#pragma once

#include <vector>

#include <Eigen/Dense>

#include "clarkbmo/circle.hpp"

namespace clarkbmo {

using CMatrix = Eigen::MatrixXcd;

/// Singular values in decreasing order (Jacobi SVD).
std::vector<double> singular_values(const CMatrix& m);
double operator_norm(const CMatrix& m);

struct PowerIterationResult {
  double norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Top singular value from power iteration on M*M, independent of the SVD path.
PowerIterationResult power_iteration_norm(const CMatrix& m, int max_iter = 5000, double tol = 1e-13);

/// minimize c.x subject to A x = b, x >= 0.
struct LinearProgram {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

struct LpSolution {
  Eigen::VectorXd x;
  double value = 0.0;
  /// Equality-row multipliers y with c - A^T y >= 0 on the optimum.
  Eigen::VectorXd duals;
  int pivots = 0;
};

/// Dense two-phase simplex with Bland's rule. Throws on infeasible or unbounded input.
LpSolution solve_lp(const LinearProgram& lp, double tol = 1e-9);

}  // namespace clarkbmo
