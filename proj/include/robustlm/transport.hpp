#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>

#include "robustlm/dataset.hpp"
#include "robustlm/problem.hpp"

namespace robustlm {

/// Exact order-r Wasserstein distance between two one-dimensional empirical
/// distributions with uniform weights. Inputs must be sorted ascending.
double wasserstein_1d(std::span<const double> a_sorted,
                      std::span<const double> b_sorted, double r);

/// General-weights variant: integrates |F_a^{-1} - F_b^{-1}|^r over the
/// merged quantile partition (no binning). Weights must be nonnegative and
/// sum to one on each side.
double wasserstein_1d_weighted(std::span<const double> a_sorted,
                               std::span<const double> a_weights,
                               std::span<const double> b_sorted,
                               std::span<const double> b_weights, double r);

/// A direction in R^{d+1} together with the sphere it was normalized on.
struct Projection {
  Eigen::VectorXd direction;
  std::string normalization;  // "l1" | "l2" | "linf" | "rho_sigma"
};

struct SlicedDistanceReport {
  double value = 0.0;
  Projection argmax;
  long evaluations = 0;
};

struct SliceSearchOptions {
  int restarts = 16;   // gradient-ascent runs
  int probes = 512;    // random probe directions
  int ascent_iters = 80;
  std::uint64_t seed = 1;
};

/// 1-D distance of the two joint clouds projected along `direction`
/// (no normalization applied).
double projected_distance(const Dataset& p, const Dataset& q,
                          const Eigen::VectorXd& direction, double r);

/// Lower-bound estimate of the max-sliced distance
///   sup_{||v|| = 1} W_r(v'P, v'Q)
/// over the unit sphere of the given base norm, via multi-start projected
/// gradient ascent plus random probes. The reported value is the maximum
/// over every direction evaluated, so with a fixed seed it is nondecreasing
/// in the probe budget.
SlicedDistanceReport msw_empirical(const Dataset& p, const Dataset& q, double r,
                                   BaseNorm norm,
                                   const SliceSearchOptions& opts = {});

/// Same search on the sphere  sigma*|v_{d+1}| + penalty(v_{1..d}) = 1,
/// which realizes the penalty-normalized sliced distance. Norm penalties
/// only.
SlicedDistanceReport rho_msw_empirical(const Dataset& p, const Dataset& q,
                                       const RobustProblem& prob,
                                       const SliceSearchOptions& opts = {});

/// Coupled Gaussian pair: P = N(0, I_{d+1}) and a copy whose covariates carry
/// independent N(0, sigma_v^2) measurement error. Returns the closed-form
/// d-dimensional W_2 distance, the closed-form prediction-error gap, and n
/// coupled draws from each.
struct GaussianExample {
  double w2_closed_form = 0.0;
  double prediction_error_gap = 0.0;
  Dataset base;
  Dataset shifted;
};

class Rng;
GaussianExample gaussian_example(Eigen::Index d, double sigma_v, Eigen::Index n,
                                 Rng& rng);

}  // namespace robustlm
