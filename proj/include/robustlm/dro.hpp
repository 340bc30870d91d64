#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "robustlm/dataset.hpp"
#include "robustlm/penalty.hpp"
#include "robustlm/problem.hpp"
#include "robustlm/rng.hpp"

namespace robustlm {

/// A coupled pair of samples realizing the explicit additive perturbation:
/// row i of `perturbed` is obtained from row i of `base` by
///   x~ = x - e * loading,   y~ = y + sigma * e,
/// with per-row error scalars e whose empirical r-norm equals delta.
struct PerturbedSample {
  Dataset base;
  Dataset perturbed;
  Eigen::VectorXd errors;
  Eigen::VectorXd beta;
  double delta = 0.0;
  double sigma = 1.0;
  double r = 2.0;
  Penalty penalty;
  PenaltySubgradient certificate;
};

/// Builds the distribution attaining the worst-case prediction error at beta:
/// e_i = delta * (y_i - x_i'beta) / residual_rnorm, perturbed as above.
/// Requires a strictly positive residual r-norm at beta.
PerturbedSample worst_case_distribution(const Dataset& data, const RobustProblem& prob,
                                        const Eigen::VectorXd& beta);

/// Numerically checks both directions of the worst-case identity
///   sup over the radius-delta ball of E|Y - X'beta|^r
///     = (residual_rnorm + delta (sigma + penalty(beta)))^r.
/// `attained` recomputes the left side on the generated worst case; `trials`
/// random feasible perturbations must stay below `rhs` (max_violation is the
/// largest observed excess).
struct DualityCheck {
  double rhs = 0.0;
  double attained = 0.0;
  double max_violation = 0.0;
};

DualityCheck verify_duality(const Dataset& data, const RobustProblem& prob,
                            const Eigen::VectorXd& beta, int trials, Rng& rng);

/// Coordinate-wise coupled-moment checks against the explicit r = 2 balls:
/// per-covariate second moments against delta^2 (l1 ball) or the ordered
/// (delta * lambda_j)^2 bounds (slope ball), plus the outcome moment against
/// (delta * sigma)^2.
struct BallCheck {
  std::string name;
  double lhs = 0.0;
  double bound = 0.0;
  bool pass = false;
};

enum class BallKind { SqrtLasso, Slope };

std::vector<BallCheck> verify_ball_membership(const PerturbedSample& ps, BallKind ball);

/// Sup over sampled projection vectors v of
///   E[ |(y~ - y) + (x - x~)'v|^r ]^(1/r) / (sigma + penalty(v))
/// under the explicit row-by-row coupling; certifies the perturbation lies in
/// the radius-delta ball (the value never exceeds delta and the v = 0 slice
/// attains it).
double coupled_rho_msw(const PerturbedSample& ps, int samples = 512,
                       std::uint64_t seed = 7);

}  // namespace robustlm
