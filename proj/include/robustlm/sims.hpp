#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "robustlm/dataset.hpp"
#include "robustlm/rng.hpp"

namespace robustlm {

/// Linear model with bounded noise and scaled-uniform covariates:
///   x ~ sigma*lambda * Uniform[0,1]^d,  y = x'beta + sigma * Uniform[-1,1].
struct UniformDesign {
  Eigen::VectorXd beta;
  double sigma = 1.0;
  double lambda_scale = 10.0;
  Eigen::Index d() const { return beta.size(); }
};

/// Gaussian homoskedastic linear model: x ~ N(0, I_d), y = x'beta + sigma_eps*N(0,1).
struct GaussianDesign {
  Eigen::VectorXd beta;
  double sigma_eps = 1.0;
  Eigen::Index d() const { return beta.size(); }
};

using Design = std::variant<UniformDesign, GaussianDesign>;

Dataset generate(const UniformDesign& design, Eigen::Index n, Rng& rng);
Dataset generate(const GaussianDesign& design, Eigen::Index n, Rng& rng);
Dataset generate(const Design& design, Eigen::Index n, Rng& rng);

/// One row per (replication, estimator/rule); fields that do not apply to an
/// experiment stay NaN / -1.
struct ReplicationRecord {
  std::uint64_t seed = 0;
  long rep = 0;
  long n = 0;
  std::string estimator;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double train_rmspe = std::numeric_limits<double>::quiet_NaN();
  double test_rmspe = std::numeric_limits<double>::quiet_NaN();
  long nonzero_count = -1;
  double bound_lhs = std::numeric_limits<double>::quiet_NaN();
  double bound_rhs = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  std::vector<ReplicationRecord> records;
  nlohmann::json aggregates;
};

void write_records_csv(const ExperimentResult& result, const std::filesystem::path& path);

struct RunOptions {
  long reps = 500;
  int threads = 1;
  std::uint64_t seed = 1;
  double alpha = 0.05;
};

/// Histograms of the nonzero-coefficient count selected by the r = 2, l1
/// estimator under the asymptotic-oracle radius ("new") and the literature
/// oracle ("bcw"), across the sample-size grid. Coefficients count as
/// selected when |beta_j| > 1e-8.
ExperimentResult run_selection_histogram(const UniformDesign& design,
                                         const std::vector<long>& n_grid,
                                         const RunOptions& opts);

/// Which estimators run_train_test fits, with their tuning values.
struct EstimatorSpec {
  enum class Kind { Ols, Ridge, Lasso, SqrtLasso } kind = Kind::Ols;
  double param = 0.0;  // ridge/lasso lambda or sqrt-lasso delta
  std::string name;
};

struct PerturbSpec {
  bool worst_case = false;
  double delta = 0.0;  // attack radius when worst_case
  double sigma = 1.0;
};

/// Train/test comparison; when the perturbation is on, the test rows are the
/// explicit worst-case transport of fresh draws at each estimator's fitted
/// coefficients.
ExperimentResult run_train_test(const Design& design, long n_train, long n_test,
                                const PerturbSpec& perturb,
                                const std::vector<EstimatorSpec>& estimators,
                                const RunOptions& opts);

/// Coverage of the out-of-sample bound
///   rnorm_Q(beta) <= rnorm_train(beta) + 2 * delta_rule * (sigma + penalty(beta))
/// at the fitted coefficients, against an adversary that perturbs fresh draws
/// at radius epsilon (the rule credits its own delta as the drift allowance).
struct BoundRule {
  enum class Kind { NewOracle, Bcw, Fixed } kind = Kind::NewOracle;
  double fixed_delta = 0.0;
};

struct BoundCoverage {
  double coverage = 0.0;
  ExperimentResult result;
};

BoundCoverage verify_generalization_bound(const UniformDesign& design, long n,
                                          long n_test, const BoundRule& rule,
                                          double epsilon, double sigma,
                                          const RunOptions& opts);

/// Per-replication reparameterization check: solving the l1 problem at
/// lambda = delta * (residual scale of the r = 2 fit) must reproduce the
/// r = 2 fit coefficient-for-coefficient; also reports the ratio of that
/// lambda to the sigma_eps-oracle value.
ExperimentResult run_lasso_equivalence(const GaussianDesign& design,
                                       const std::vector<long>& n_grid,
                                       const RunOptions& opts);

}  // namespace robustlm
