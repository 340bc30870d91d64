#include "robustlm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "robustlm/rng.hpp"

namespace robustlm {

namespace {

constexpr double kResidualFloor = 1e-12;
constexpr double kStallTol = 1e-12;

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Prox of tau * sorted-l1 with nonincreasing weights w: stack-based isotonic
// (pool-adjacent-violators) pass over the magnitudes sorted decreasingly.
Eigen::VectorXd slope_prox(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                           double tau) {
  const auto d = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });

  std::vector<double> sums(static_cast<std::size_t>(d));
  std::vector<double> means(static_cast<std::size_t>(d));
  std::vector<Eigen::Index> start(static_cast<std::size_t>(d));
  std::size_t blocks = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    start[blocks] = i;
    sums[blocks] = std::abs(v[order[static_cast<std::size_t>(i)]]) - tau * w[i];
    means[blocks] = sums[blocks];
    ++blocks;
    while (blocks > 1 && means[blocks - 2] <= means[blocks - 1]) {
      sums[blocks - 2] += sums[blocks - 1];
      means[blocks - 2] =
          sums[blocks - 2] / static_cast<double>(i - start[blocks - 2] + 1);
      --blocks;
    }
  }

  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double level = std::max(means[b], 0.0);
    const Eigen::Index end = (b + 1 < blocks) ? start[b + 1] : d;
    for (Eigen::Index i = start[b]; i < end; ++i) {
      const Eigen::Index j = order[static_cast<std::size_t>(i)];
      out[j] = level * (v[j] > 0.0 ? 1.0 : (v[j] < 0.0 ? -1.0 : 0.0));
    }
  }
  return out;
}

Eigen::VectorXd penalty_prox(const Penalty& pen, const Eigen::VectorXd& v, double tau) {
  switch (pen.kind()) {
    case PenaltyKind::L1: {
      Eigen::VectorXd out(v.size());
      for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = soft_threshold(v[j], tau);
      return out;
    }
    case PenaltyKind::Lp: {
      if (pen.p() == 1.0) {
        Eigen::VectorXd out(v.size());
        for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = soft_threshold(v[j], tau);
        return out;
      }
      if (pen.p() == 2.0) {
        const double nrm = v.norm();
        if (nrm <= tau) return Eigen::VectorXd::Zero(v.size());
        return (1.0 - tau / nrm) * v;
      }
      break;
    }
    case PenaltyKind::Slope:
      return slope_prox(v, pen.weights(), tau);
    case PenaltyKind::SupportSet:
      break;
  }
  throw UnsupportedOperation("no proximal operator for this penalty kind");
}

// (Sub)gradient of the residual r-norm at beta; sign(0) := 0 for r = 1.
Eigen::VectorXd loss_gradient(const Dataset& data, const Eigen::VectorXd& beta,
                              double r, double rnorm) {
  const Eigen::VectorXd res = data.residuals(beta);
  const double n = static_cast<double>(data.n());
  if (r == 1.0) {
    Eigen::VectorXd s(res.size());
    for (Eigen::Index i = 0; i < res.size(); ++i)
      s[i] = res[i] > 0.0 ? 1.0 : (res[i] < 0.0 ? -1.0 : 0.0);
    return -(data.covariates().transpose() * s) / n;
  }
  if (r == 2.0) {
    return -(data.covariates().transpose() * res) / (n * rnorm);
  }
  Eigen::VectorXd s(res.size());
  for (Eigen::Index i = 0; i < res.size(); ++i) {
    const double a = std::abs(res[i]);
    s[i] = (res[i] >= 0.0 ? 1.0 : -1.0) * std::pow(a, r - 1.0);
  }
  const double scale = std::pow(rnorm, r - 1.0);
  return -(data.covariates().transpose() * s) / (n * scale);
}

double kkt_measure(const Dataset& data, const RobustProblem& prob,
                   const Eigen::VectorXd& beta, double rnorm) {
  if (rnorm < kResidualFloor) return 0.0;  // nonsmooth interpolation point
  const Eigen::VectorXd g = loss_gradient(data, beta, prob.r, rnorm);
  const double excess = std::max(0.0, prob.penalty.dual_norm(g) - prob.delta);
  const double align = std::abs(g.dot(beta) + prob.delta * prob.penalty(beta)) /
                       std::max(1.0, beta.norm());
  return std::max(excess, align);
}

struct ObjectiveTracker {
  double best = std::numeric_limits<double>::infinity();
  long stalled = 0;
  bool update(double value) {
    if (value < best - kStallTol) {
      best = value;
      stalled = 0;
    } else {
      ++stalled;
    }
    return stalled >= 100;
  }
};

// Concomitant-scale scheme for r = 2: alternate the residual-scale update
// sigma_hat = ||y - X beta|| / sqrt(n) with proximal steps on
// (1/(2 n sigma_hat)) ||y - X beta||^2 + delta * penalty(beta).
SolveReport solve_concomitant(const Dataset& data, const RobustProblem& prob,
                              const SolveOptions& opts) {
  const auto& X = data.covariates();
  const auto& y = data.outcomes();
  const double n = static_cast<double>(data.n());
  const auto d = data.dim();

  SolveReport report;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd res = y;

  const bool use_cd =
      prob.penalty.kind() == PenaltyKind::L1 ||
      (prob.penalty.kind() == PenaltyKind::Lp && prob.penalty.p() == 1.0);

  Eigen::VectorXd col_sq(d);
  for (Eigen::Index j = 0; j < d; ++j) col_sq[j] = X.col(j).squaredNorm() / n;

  double lips = 0.0;
  if (!use_cd) {
    // Squared spectral norm of X / n via a few power iterations.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(d).normalized();
    for (int it = 0; it < 60; ++it) {
      v = X.transpose() * (X * v);
      const double nv = v.norm();
      if (nv == 0.0) break;
      v /= nv;
    }
    lips = (X * v).squaredNorm() / n;
    if (lips <= 0.0) lips = 1.0;
  }

  ObjectiveTracker tracker;
  long iter = 0;
  Eigen::VectorXd momentum = beta;
  double t_fista = 1.0;

  for (; iter < opts.max_iter; ++iter) {
    const double sigma_hat = std::max(res.norm() / std::sqrt(n), kResidualFloor);
    const double lambda = prob.delta * sigma_hat;

    if (use_cd) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (col_sq[j] == 0.0) continue;
        const double rho_j = X.col(j).dot(res) / n + col_sq[j] * beta[j];
        const double bj = soft_threshold(rho_j, lambda) / col_sq[j];
        if (bj != beta[j]) {
          res += X.col(j) * (beta[j] - bj);
          beta[j] = bj;
        }
      }
    } else {
      const double step = sigma_hat / lips;  // 1/L of the scaled quadratic
      const Eigen::VectorXd grad = -(X.transpose() * (y - X * momentum)) / (n * sigma_hat);
      Eigen::VectorXd next = penalty_prox(prob.penalty, momentum - step * grad,
                                          step * prob.delta);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_fista * t_fista));
      momentum = next + ((t_fista - 1.0) / t_next) * (next - beta);
      t_fista = t_next;
      beta = std::move(next);
      res = y - X * beta;
    }

    const double rnorm = res.norm() / std::sqrt(n);
    const double objective = rnorm + prob.delta * prob.penalty(beta);
    const bool stalled = tracker.update(objective);

    if (iter % 8 == 7 || stalled) {
      report.kkt_residual = kkt_measure(data, prob, beta, rnorm);
      if (report.kkt_residual <= opts.kkt_tol || stalled) {
        report.converged = true;
        break;
      }
    }
  }

  const double rnorm = residual_rnorm(data, beta, 2.0);
  report.kkt_residual = kkt_measure(data, prob, beta, rnorm);
  if (!report.converged) report.converged = report.kkt_residual <= opts.kkt_tol;
  report.beta_hat = std::move(beta);
  report.objective_value = rnorm + prob.delta * prob.penalty(report.beta_hat);
  report.iterations = iter + 1;
  return report;
}

// Generic route: Polyak-style subgradient descent followed by cyclic
// coordinate-wise golden-section polish. Robust at desk scale for any r >= 1
// and any norm penalty.
SolveReport solve_subgradient(const Dataset& data, const RobustProblem& prob,
                              const SolveOptions& opts) {
  const auto d = data.dim();
  const auto objective = [&](const Eigen::VectorXd& b) {
    return residual_rnorm(data, b, prob.r) + prob.delta * prob.penalty(b);
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd best_beta = beta;
  double best = objective(beta);
  const double scale0 = std::max(1.0, best);

  long iter = 0;
  const long subgrad_iters = std::min<long>(opts.max_iter, 4000);
  for (; iter < subgrad_iters; ++iter) {
    const double rnorm = residual_rnorm(data, beta, prob.r);
    if (rnorm < kResidualFloor) break;
    Eigen::VectorXd g = loss_gradient(data, beta, prob.r, rnorm);
    g += prob.delta * prob.penalty.subgradient_certificate(beta).subgradient;
    const double gn2 = g.squaredNorm();
    if (gn2 == 0.0) break;
    const double f = objective(beta);
    const double target_gap = 0.1 * scale0 / std::sqrt(static_cast<double>(iter + 1));
    const double step = (f - best + target_gap) / gn2;
    beta -= step * g;
    const double fn = objective(beta);
    if (fn < best) {
      best = fn;
      best_beta = beta;
    }
  }
  beta = best_beta;

  // Coordinate-wise golden-section polish; slices of a convex objective are
  // unimodal.
  constexpr double invphi = 0.6180339887498949;
  const auto line_min = [&](Eigen::Index j, double lo, double hi) {
    Eigen::VectorXd probe = beta;
    const auto f1 = [&](double v) {
      probe[j] = v;
      return objective(probe);
    };
    double a = lo, b = hi;
    double c = b - invphi * (b - a), e = a + invphi * (b - a);
    double fc = f1(c), fe = f1(e);
    while (b - a > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b))) {
      if (fc < fe) {
        b = e; e = c; fe = fc; c = b - invphi * (b - a); fc = f1(c);
      } else {
        a = c; c = e; fc = fe; e = a + invphi * (b - a); fe = f1(e);
      }
    }
    return 0.5 * (a + b);
  };

  double window = std::max(1.0, beta.cwiseAbs().maxCoeff());
  bool stalled = false;
  for (long cycle = 0; cycle < 400 && iter < opts.max_iter; ++cycle) {
    const double before = objective(beta);
    for (Eigen::Index j = 0; j < d; ++j, ++iter) {
      double lo = beta[j] - window, hi = beta[j] + window;
      double v = line_min(j, lo, hi);
      // Expand if the optimum sits on the window edge.
      while ((std::abs(v - lo) < 1e-9 * window || std::abs(v - hi) < 1e-9 * window) &&
             window < 1e6) {
        window *= 4.0;
        lo = beta[j] - window;
        hi = beta[j] + window;
        v = line_min(j, lo, hi);
      }
      Eigen::VectorXd cand = beta;
      cand[j] = v;
      if (objective(cand) < objective(beta)) beta = cand;
    }
    const double after = objective(beta);
    if (before - after < kStallTol) {
      window *= 0.25;
      if (window < 1e-10) {
        stalled = true;
        break;
      }
    }
  }

  SolveReport report;
  const double rnorm = residual_rnorm(data, beta, prob.r);
  report.kkt_residual = kkt_measure(data, prob, beta, rnorm);
  report.converged = stalled || report.kkt_residual <= opts.kkt_tol;
  report.beta_hat = std::move(beta);
  report.objective_value = rnorm + prob.delta * prob.penalty(report.beta_hat);
  report.iterations = iter;
  return report;
}

}  // namespace

SolveReport solve_penalized(const Dataset& data, const RobustProblem& prob,
                            const SolveOptions& opts) {
  if (!prob.penalty.is_norm())
    throw UnsupportedOperation("solve_penalized requires an l1, lp or slope penalty");
  if (prob.penalty.dim() != data.dim())
    throw ValidationError("penalty dimension does not match dataset");

  const bool prox_ready =
      prob.penalty.kind() == PenaltyKind::L1 ||
      prob.penalty.kind() == PenaltyKind::Slope ||
      (prob.penalty.kind() == PenaltyKind::Lp &&
       (prob.penalty.p() == 1.0 || prob.penalty.p() == 2.0));

  if (prob.r == 2.0 && prox_ready) return solve_concomitant(data, prob, opts);
  return solve_subgradient(data, prob, opts);
}

Eigen::VectorXd solve_ols(const Dataset& data) {
  return data.covariates()
      .completeOrthogonalDecomposition()
      .solve(data.outcomes());
}

Eigen::VectorXd solve_ridge(const Dataset& data, double lambda) {
  if (lambda < 0.0) throw ValidationError("ridge lambda must be >= 0");
  const auto& X = data.covariates();
  const double n = static_cast<double>(data.n());
  Eigen::MatrixXd gram = X.transpose() * X;
  gram.diagonal().array() += n * lambda;
  if (lambda == 0.0) return solve_ols(data);
  return gram.ldlt().solve(X.transpose() * data.outcomes());
}

SolveReport solve_lasso(const Dataset& data, double lambda, double gap_tol,
                        long max_iter) {
  if (lambda < 0.0) throw ValidationError("lasso lambda must be >= 0");
  const auto& X = data.covariates();
  const auto& y = data.outcomes();
  const double n = static_cast<double>(data.n());
  const auto d = data.dim();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd res = y;
  Eigen::VectorXd col_sq(d);
  for (Eigen::Index j = 0; j < d; ++j) col_sq[j] = X.col(j).squaredNorm() / n;

  const auto duality_gap = [&]() {
    const double primal = res.squaredNorm() / (2.0 * n) + lambda * beta.cwiseAbs().sum();
    const Eigen::VectorXd corr = X.transpose() * res / n;
    const double corr_max = corr.cwiseAbs().maxCoeff();
    const double theta = (corr_max > lambda && corr_max > 0.0) ? lambda / corr_max : 1.0;
    const double dual = theta * res.dot(y) / n -
                        theta * theta * res.squaredNorm() / (2.0 * n);
    return primal - dual;
  };

  SolveReport report;
  long iter = 0;
  for (; iter < max_iter; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double rho_j = X.col(j).dot(res) / n + col_sq[j] * beta[j];
      const double bj = soft_threshold(rho_j, lambda) / col_sq[j];
      if (bj != beta[j]) {
        res += X.col(j) * (beta[j] - bj);
        max_change = std::max(max_change, std::abs(bj - beta[j]));
        beta[j] = bj;
      }
    }
    if (iter % 4 == 3 || max_change == 0.0) {
      report.kkt_residual = duality_gap();
      if (report.kkt_residual <= gap_tol) {
        report.converged = true;
        break;
      }
      if (max_change == 0.0) break;  // fixed point at the current precision
    }
  }
  report.kkt_residual = duality_gap();
  report.converged = report.kkt_residual <= gap_tol || report.converged;
  report.iterations = iter + 1;
  report.objective_value =
      res.squaredNorm() / (2.0 * n) + lambda * beta.cwiseAbs().sum();
  report.beta_hat = std::move(beta);
  return report;
}

ZeroSolutionCertificate zero_solution_certificate(const Dataset& data, double delta) {
  if (delta < 0.0) throw ValidationError("delta must be >= 0");
  const double n = static_cast<double>(data.n());
  const double y_sq = data.outcomes().squaredNorm() / n;
  ZeroSolutionCertificate cert;
  cert.threshold = delta;
  if (y_sq == 0.0) {
    cert.statistic = 0.0;
  } else {
    const Eigen::VectorXd corr = data.covariates().transpose() * data.outcomes() / n;
    cert.statistic = corr.cwiseAbs().maxCoeff() / std::sqrt(y_sq);
  }
  cert.is_zero_solution = cert.statistic <= cert.threshold;
  return cert;
}

}  // namespace robustlm
