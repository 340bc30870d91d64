#pragma once

#include <optional>

#include "robustlm/dataset.hpp"
#include "robustlm/problem.hpp"

namespace robustlm {

/// Decision data for comparing the worst-case out-of-sample performance of
/// two coefficient vectors. The statistic is the normalized objective gap
///   t_n = n^{1/(2r)} (rnorm1 - rnorm2 + delta (rho1 - rho2))
///                     / (2 sigma + rho1 + rho2),
/// rejected against the finite-sample critical value c_rho_d * C^{1/r} built
/// from the compact-support constant.
struct RankingVerdict {
  double t_n = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  struct Components {
    double rnorm1 = 0.0;
    double rnorm2 = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
  } components;
};

/// Optional moment-based route for unbounded data; sizes the test at level
/// alpha by running the general constant at alpha/3.
struct GeneralRankingRoute {
  double s = 5.0;
  double gamma = 1.0;
};

RankingVerdict rank_estimators(const Dataset& data, const RobustProblem& prob,
                               const Eigen::VectorXd& beta1,
                               const Eigen::VectorXd& beta2, double diam, double alpha,
                               std::optional<double> c_rho_d_override = {},
                               std::optional<GeneralRankingRoute> general = {});

}  // namespace robustlm
