#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "robustlm/dataset.hpp"
#include "robustlm/problem.hpp"

namespace robustlm {

struct SolveOptions {
  long max_iter = 100000;
  double kkt_tol = 1e-7;
  std::uint64_t seed = 0;
};

struct SolveReport {
  Eigen::VectorXd beta_hat;
  double objective_value = 0.0;
  long iterations = 0;
  bool converged = false;
  /// Stationarity measure: for norm penalties, the larger of the dual-norm
  /// excess max(0, ||g||_* - delta) of the loss (sub)gradient g and the
  /// alignment defect |g'beta + delta*penalty(beta)| / max(1, ||beta||_2).
  /// Zero exactly at minimizers.
  double kkt_residual = 0.0;
};

/// Minimizes  residual_rnorm(data, beta, r) + delta * penalty(beta).
///
/// r = 2 with an l1, l2 or slope penalty runs a concomitant-scale proximal
/// scheme (coordinate descent for l1); every other combination falls back to
/// a subgradient method with diminishing steps plus a coordinate-wise
/// golden-section polish. Non-convergence is reported, never silently
/// ignored.
SolveReport solve_penalized(const Dataset& data, const RobustProblem& prob,
                            const SolveOptions& opts = {});

/// Minimum-norm least squares (pseudoinverse); equals OLS when X'X is
/// invertible and the ridgeless limit otherwise.
Eigen::VectorXd solve_ols(const Dataset& data);

/// Ridge solution (X'X + n*lambda*I)^{-1} X'y; exact linear solve.
Eigen::VectorXd solve_ridge(const Dataset& data, double lambda);

/// Lasso in the (1/(2n))||y - X beta||^2 + lambda*||beta||_1 convention,
/// coordinate descent run to the requested duality gap (kkt_residual holds
/// the final gap).
SolveReport solve_lasso(const Dataset& data, double lambda,
                        double gap_tol = 1e-8, long max_iter = 100000);

/// First-order check of whether beta = 0 solves the r = 2, l1 problem at
/// radius delta.
struct ZeroSolutionCertificate {
  double statistic = 0.0;  // ||X'y/n||_inf / sqrt(mean y^2), 0 when y == 0
  double threshold = 0.0;
  bool is_zero_solution = false;
};

ZeroSolutionCertificate zero_solution_certificate(const Dataset& data, double delta);

}  // namespace robustlm
