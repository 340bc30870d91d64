#include "robustlm/dro.hpp"

#include <algorithm>
#include <cmath>

namespace robustlm {

namespace {

double mean_abs_pow(const Eigen::VectorXd& v, double r) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), r);
  return acc / static_cast<double>(v.size());
}

Dataset apply_perturbation(const Dataset& base, const Eigen::VectorXd& errors,
                           const Eigen::VectorXd& loading, double sigma) {
  Eigen::MatrixXd x = base.covariates() - errors * loading.transpose();
  Eigen::VectorXd y = base.outcomes() + sigma * errors;
  return Dataset(std::move(x), std::move(y), base.covariate_names(),
                 base.outcome_name());
}

}  // namespace

PerturbedSample worst_case_distribution(const Dataset& data, const RobustProblem& prob,
                                        const Eigen::VectorXd& beta) {
  const double rnorm = residual_rnorm(data, beta, prob.r);
  if (rnorm <= 0.0)
    throw ValidationError(
        "worst-case distribution is undefined at an interpolating beta "
        "(zero residual r-norm)");

  const PenaltySubgradient cert = prob.penalty.subgradient_certificate(beta);
  const Eigen::VectorXd errors = (prob.delta / rnorm) * data.residuals(beta);

  return PerturbedSample{data,
                         apply_perturbation(data, errors, cert.loading, prob.sigma),
                         errors,
                         beta,
                         prob.delta,
                         prob.sigma,
                         prob.r,
                         prob.penalty,
                         cert};
}

DualityCheck verify_duality(const Dataset& data, const RobustProblem& prob,
                            const Eigen::VectorXd& beta, int trials, Rng& rng) {
  const double rnorm = residual_rnorm(data, beta, prob.r);
  DualityCheck check;
  check.rhs =
      std::pow(rnorm + prob.delta * (prob.sigma + prob.penalty(beta)), prob.r);

  const PerturbedSample worst = worst_case_distribution(data, prob, beta);
  check.attained = mean_abs_pow(worst.perturbed.residuals(beta), prob.r);

  // Random members of the ball: perturb along a direction with dual norm at
  // most one and error scalars with r-norm at most delta; both caps certify
  // the coupled moment bound for every projection vector.
  const auto d = data.dim();
  check.max_violation = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd u(d);
    for (Eigen::Index j = 0; j < d; ++j) u[j] = rng.normal();
    const double un = prob.penalty.dual_norm(u);
    if (un > 0.0) u *= rng.uniform01() / un;

    Eigen::VectorXd e(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i) e[i] = rng.normal();
    const double en = std::pow(mean_abs_pow(e, prob.r), 1.0 / prob.r);
    if (en > 0.0) e *= prob.delta * rng.uniform01() / en;

    const Dataset trial = apply_perturbation(data, e, u, prob.sigma);
    const double value = mean_abs_pow(trial.residuals(beta), prob.r);
    check.max_violation = std::max(check.max_violation, value - check.rhs);
  }
  return check;
}

std::vector<BallCheck> verify_ball_membership(const PerturbedSample& ps, BallKind ball) {
  if (ps.r != 2.0)
    throw ValidationError("ball membership checks are defined for r = 2");
  const bool l1_like = ps.penalty.kind() == PenaltyKind::L1 ||
                       (ps.penalty.kind() == PenaltyKind::Lp && ps.penalty.p() == 1.0);
  if (ball == BallKind::SqrtLasso && !l1_like)
    throw ValidationError("sqrt-lasso ball checks need an l1-penalty sample");
  if (ball == BallKind::Slope && ps.penalty.kind() != PenaltyKind::Slope)
    throw ValidationError("slope ball checks need a slope-penalty sample");

  const double e_sq = mean_abs_pow(ps.errors, 2.0);
  const auto d = ps.base.dim();
  const double tol = 1e-9 * std::max(1.0, ps.delta * ps.delta);

  std::vector<BallCheck> checks;
  if (ball == BallKind::SqrtLasso) {
    for (Eigen::Index j = 0; j < d; ++j) {
      BallCheck c;
      c.name = "covariate_" + std::to_string(j + 1);
      c.lhs = e_sq * ps.certificate.loading[j] * ps.certificate.loading[j];
      c.bound = ps.delta * ps.delta;
      c.pass = c.lhs <= c.bound + tol;
      checks.push_back(c);
    }
  } else {
    // Ordered coupled moments against the ordered (delta * lambda_j)^2 bounds.
    Eigen::VectorXd moments(d);
    for (Eigen::Index j = 0; j < d; ++j)
      moments[j] = e_sq * ps.certificate.loading[j] * ps.certificate.loading[j];
    std::sort(moments.data(), moments.data() + d, std::greater<double>());
    const Eigen::VectorXd& lambda = ps.penalty.weights();
    for (Eigen::Index j = 0; j < d; ++j) {
      BallCheck c;
      c.name = "covariate_ordered_" + std::to_string(j + 1);
      c.lhs = moments[j];
      c.bound = ps.delta * ps.delta * lambda[j] * lambda[j];
      c.pass = c.lhs <= c.bound + tol;
      checks.push_back(c);
    }
  }

  BallCheck outcome;
  outcome.name = "outcome";
  outcome.lhs = ps.sigma * ps.sigma * e_sq;
  outcome.bound = ps.delta * ps.delta * ps.sigma * ps.sigma;
  outcome.pass = outcome.lhs <= outcome.bound + tol * ps.sigma * ps.sigma;
  checks.push_back(outcome);
  return checks;
}

double coupled_rho_msw(const PerturbedSample& ps, int samples, std::uint64_t seed) {
  if (!ps.penalty.is_norm())
    throw UnsupportedOperation("the coupled sliced value needs a norm penalty");
  const auto d = ps.base.dim();
  const Eigen::MatrixXd dx = ps.base.covariates() - ps.perturbed.covariates();
  const Eigen::VectorXd dy = ps.perturbed.outcomes() - ps.base.outcomes();

  const auto slice_value = [&](const Eigen::VectorXd& gamma) {
    const Eigen::VectorXd diff = dy + dx * gamma;
    const double num = std::pow(mean_abs_pow(diff, ps.r), 1.0 / ps.r);
    return num / (ps.sigma + ps.penalty(gamma));
  };

  // The zero slice evaluates to exactly the radius; random slices across
  // scales can only fall below it.
  double best = slice_value(Eigen::VectorXd::Zero(d));
  Rng rng(seed, 0);
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd g(d);
    for (Eigen::Index j = 0; j < d; ++j) g[j] = rng.normal();
    const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    best = std::max(best, slice_value(scale * g));
  }
  return best;
}

}  // namespace robustlm
