#pragma once

#include <optional>

#include "robustlm/dataset.hpp"
#include "robustlm/penalty.hpp"

namespace robustlm {

/// Shared inputs of the radius recommendations. `gamma` is the s-th moment
/// bound of the joint vector under the dual norm; `diam` the support diameter
/// under the dual norm (compact-support rules only).
struct TuningInputs {
  long n = 0;
  long d = 0;
  double r = 2.0;
  double s = 5.0;       // moment order, must exceed 2r
  double alpha = 0.05;  // in (0, 1)
  std::optional<double> gamma;
  double c_d = 1.0;
  std::optional<double> diam;
  double sigma = 1.0;

  void validate_common() const;
  double c_rho_d() const { return std::max(1.0 / c_d, 1.0); }
};

/// Finite-sample radius under the moment condition:
///   max{1/c_d, 1} * [ C log(2n+1)^{r/s} / sqrt(n) ]^{1/r},
///   C = 2^r r (180 sqrt(d+2) + sqrt(2 log(1/alpha))
///              + sqrt(gamma/alpha) * 8/(s/2 - r) * sqrt(log(8/alpha) + d + 2)).
double delta_general(const TuningInputs& t);

/// Finite-sample radius for compactly supported data:
///   max{1/c_d, 1} * [ C / sqrt(n) ]^{1/r},
///   C = (180 sqrt(d+2) + sqrt(2 log(1/alpha))) * diam^r.
double delta_compact(const TuningInputs& t);

/// Pivotal rule after covariate normalization: the general rule with the
/// moment bound pinned to 2^s, paired with the outcome-moment plug-in
///   sigma = max{ (mean |y|^s)^{1/s}, 1 }.
struct PivotalDelta {
  double delta = 0.0;
  double sigma = 1.0;
};
PivotalDelta delta_pivotal(const Dataset& data, double r, double s, double alpha,
                           double c_d);

/// Large-sample radius  c_rho_d * [ q_{1-alpha} / sqrt(n) ]^{1/r} * diam,
/// with q the Kolmogorov quantile.
double delta_asymptotic(const TuningInputs& t);

/// The literature's oracle for the r = 2, l1 problem:
///   n^{-1/2} 3^{-1/2} sigma lambda Phi^{-1}(1/2 + (1-alpha)^{1/d}/2).
double delta_bcw_sqrt_lasso(long n, long d, double alpha, double sigma_noise,
                            double lambda_scale);

/// Practice variant 1.1 * Phi^{-1}(1 - alpha/(2d)) / sqrt(n).
double delta_bcw_practice(long n, long d, double alpha);

/// Profile-function comparator  pi/(pi-2) * Phi^{-1}(1 - alpha/(2d)) / sqrt(n),
/// an upper bound for the analogous sliced-metric recommendation.
double delta_blanchet_comparator(long n, long d, double alpha);

/// CDF of the Kolmogorov distribution (supremum of a Brownian bridge).
double kolmogorov_cdf(double x);
/// Its quantile, by series evaluation and bisection to 1e-10.
double kolmogorov_quantile(double p);

double normal_cdf(double x);
/// Inverse standard normal CDF, |error| <= 1e-9.
double normal_quantile(double p);

/// Rescales covariates so the empirical s-th dual-norm moment of (x, 0)
/// equals one; returns the scaled data and the divisor.
struct NormalizedData {
  Dataset data;
  double scale = 1.0;
};
NormalizedData normalize_covariates(const Dataset& data, double s, BaseNorm norm);

/// Euclidean support diameter of the scaled-uniform regression design:
///   sigma * lambda * sqrt(d + (||beta||_1 + 2/lambda)^2).
double support_diameter_uniform_design(double sigma, double lambda, long d,
                                       const Eigen::VectorXd& beta);

/// Largest sample size at which the zero vector stays optimal with high
/// probability under the scaled-uniform design:
///   9 ||beta/||beta||_2||_inf^{-4} q_{1-alpha}^2 (d + (||beta||_1 + 2/lambda)^2)^2.
double zero_solution_sample_bound(const Eigen::VectorXd& beta, double lambda, long d,
                                  double alpha);

}  // namespace robustlm
