#include "robustlm/ranking.hpp"

#include <cmath>

namespace robustlm {

RankingVerdict rank_estimators(const Dataset& data, const RobustProblem& prob,
                               const Eigen::VectorXd& beta1,
                               const Eigen::VectorXd& beta2, double diam, double alpha,
                               std::optional<double> c_rho_d_override,
                               std::optional<GeneralRankingRoute> general) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (!(diam > 0.0)) throw ValidationError("support diameter must be positive");

  RankingVerdict v;
  v.components.rnorm1 = residual_rnorm(data, beta1, prob.r);
  v.components.rnorm2 = residual_rnorm(data, beta2, prob.r);
  v.components.rho1 = prob.penalty(beta1);
  v.components.rho2 = prob.penalty(beta2);

  const double n = static_cast<double>(data.n());
  const double numer = v.components.rnorm1 - v.components.rnorm2 +
                       prob.delta * (v.components.rho1 - v.components.rho2);
  const double denom = 2.0 * prob.sigma + v.components.rho1 + v.components.rho2;
  v.t_n = std::pow(n, 1.0 / (2.0 * prob.r)) * numer / denom;

  const double c_rho_d =
      c_rho_d_override ? *c_rho_d_override
                       : prob.penalty.embedding_constant(BaseNorm::L2).c_rho_d;

  const double d2 = static_cast<double>(data.dim()) + 2.0;
  double constant;
  if (general) {
    // Moment route: the general bound holds with probability 1 - 3*alpha, so
    // run its constant at alpha/3 to keep the size at alpha.
    const double a = alpha / 3.0;
    if (!(general->s > 2.0 * prob.r))
      throw ValidationError("moment order s must exceed 2r");
    constant = std::pow(2.0, prob.r) * prob.r *
               (180.0 * std::sqrt(d2) + std::sqrt(2.0 * std::log(1.0 / a)) +
                std::sqrt(general->gamma / a) * (8.0 / (general->s / 2.0 - prob.r)) *
                    std::sqrt(std::log(8.0 / a) + d2));
    constant *= std::pow(std::log(2.0 * n + 1.0), prob.r / general->s);
  } else {
    constant = (180.0 * std::sqrt(d2) + std::sqrt(2.0 * std::log(1.0 / alpha))) *
               std::pow(diam, prob.r);
  }
  v.critical_value = c_rho_d * std::pow(constant, 1.0 / prob.r);
  v.reject = v.t_n > v.critical_value;
  return v;
}

}  // namespace robustlm
