#pragma once

#include "robustlm/errors.hpp"
#include "robustlm/penalty.hpp"

namespace robustlm {

/// The robust prediction problem: Wasserstein exponent r, auxiliary outcome
/// scale sigma, ambiguity radius delta, and the penalty defining the
/// projection geometry.
struct RobustProblem {
  double r;
  double sigma;
  double delta;
  Penalty penalty;

  RobustProblem(double r_, double sigma_, double delta_, Penalty penalty_)
      : r(r_), sigma(sigma_), delta(delta_), penalty(std::move(penalty_)) {
    if (!(r >= 1.0)) throw ValidationError("exponent r must be >= 1");
    if (!(sigma >= 1.0)) throw ValidationError("sigma must be >= 1");
    if (!(delta >= 0.0)) throw ValidationError("delta must be >= 0");
  }
};

}  // namespace robustlm
