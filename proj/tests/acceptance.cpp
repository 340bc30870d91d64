// Acceptance suite: one self-contained check per shipped guarantee, each
// printing a PASS/FAIL line. Run everything with no arguments or a single
// check with --criterion N.

#include <chrono>
#include <cstring>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "robustlm/dro.hpp"
#include "robustlm/sims.hpp"
#include "robustlm/solver.hpp"
#include "robustlm/transport.hpp"
#include "robustlm/tuning.hpp"

using namespace robustlm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Eigen::VectorXd unit_first(Eigen::Index d) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  v[0] = 1.0;
  return v;
}

UniformDesign paper_design() {
  UniformDesign design;
  design.beta = unit_first(10);
  design.sigma = 1.0;
  design.lambda_scale = 10.0;
  return design;
}

// 1. Worst-case duality: the generated distribution attains the closed-form
//    value and no feasible perturbation exceeds it.
Outcome criterion_duality() {
  Outcome out;
  Rng rng(1001);
  double worst_gap = 0.0, worst_violation = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<Eigen::Index>(20 + rng.below(181));
    const auto d = static_cast<Eigen::Index>(1 + rng.below(10));
    const auto data = oracles::random_dataset(rng, n, d);
    const auto beta = oracles::random_vector(rng, d, 1.5);
    const double r = (t % 2 == 0) ? 1.0 : 2.0;

    Penalty pen = Penalty::l1(d);
    if (t % 3 == 1) pen = Penalty::lp(d, 2.0);
    if (t % 3 == 2) {
      Eigen::VectorXd w(d);
      for (Eigen::Index j = 0; j < d; ++j)
        w[j] = 2.0 * static_cast<double>(d - j) / static_cast<double>(d);
      pen = Penalty::slope(w);
    }
    RobustProblem prob(r, rng.uniform(1.0, 3.0), rng.uniform(0.0, 2.0), pen);

    Rng trial_rng(2000 + t);
    const auto check = verify_duality(data, prob, beta, 40, trial_rng);
    worst_gap = std::max(worst_gap, std::abs(check.attained - check.rhs) /
                                        std::max(1.0, check.rhs));
    worst_violation = std::max(worst_violation, check.max_violation);
  }
  out.pass = worst_gap <= 1e-8 && worst_violation <= 1e-8;
  std::ostringstream ss;
  ss << "max relative gap " << worst_gap << ", max violation " << worst_violation;
  out.detail = ss.str();
  return out;
}

// 2. Explicit ball membership at r = 2 with exact active-coordinate moments.
Outcome criterion_ball_membership() {
  Outcome out;
  Rng rng(1002);
  double worst_slack = 0.0;
  for (int t = 0; t < 20 && out.pass; ++t) {
    const auto d = static_cast<Eigen::Index>(2 + rng.below(6));
    const auto data = oracles::random_dataset(rng, 40, d);
    Eigen::VectorXd beta = oracles::random_vector(rng, d, 2.0);
    beta[rng.below(static_cast<std::uint64_t>(d))] = 0.0;  // keep one inactive
    const double delta = rng.uniform(0.1, 1.5);
    const double sigma = rng.uniform(1.0, 2.5);

    // l1 ball.
    {
      RobustProblem prob(2.0, sigma, delta, Penalty::l1(d));
      const auto ps = worst_case_distribution(data, prob, beta);
      for (const auto& c : verify_ball_membership(ps, BallKind::SqrtLasso)) {
        if (!c.pass) out.pass = false;
        if (c.lhs > 0.0)  // active coordinates and the outcome sit on the bound
          worst_slack = std::max(worst_slack,
                                 std::abs(c.lhs - c.bound) / std::max(1.0, c.bound));
      }
    }

    // Slope ball with all coordinates active.
    {
      Eigen::VectorXd w(d);
      for (Eigen::Index j = 0; j < d; ++j) w[j] = static_cast<double>(d - j);
      Eigen::VectorXd full = oracles::random_vector(rng, d, 2.0);
      for (Eigen::Index j = 0; j < d; ++j)
        if (full[j] == 0.0) full[j] = 1.0;
      RobustProblem prob(2.0, sigma, delta, Penalty::slope(w));
      const auto ps = worst_case_distribution(data, prob, full);
      for (const auto& c : verify_ball_membership(ps, BallKind::Slope)) {
        if (!c.pass) out.pass = false;
        worst_slack = std::max(worst_slack,
                               std::abs(c.lhs - c.bound) / std::max(1.0, c.bound));
      }
    }
  }
  out.pass = out.pass && worst_slack <= 1e-9;
  std::ostringstream ss;
  ss << "max relative moment slack " << worst_slack;
  out.detail = ss.str();
  return out;
}

// 3. Sort-based 1-D transport equals the exhaustive matching minimum.
Outcome criterion_wasserstein_oracle() {
  Outcome out;
  Rng rng(1003);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<std::size_t>(1 + rng.below(6));
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = rng.uniform(-10.0, 10.0);
    for (auto& v : b) v = rng.uniform(-10.0, 10.0);
    std::vector<double> as(a), bs(b);
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());
    for (double r : {1.0, 2.0, 3.0}) {
      const double got = wasserstein_1d(as, bs, r);
      const double want = oracles::matching_min_cost(a, b, r);
      worst = std::max(worst, std::abs(got - want) / std::max(1.0, want));
    }
  }
  out.pass = worst <= 1e-12;
  std::ostringstream ss;
  ss << "max relative mismatch " << worst;
  out.detail = ss.str();
  return out;
}

// 4. Kolmogorov quantiles: published 95% point and the round-trip identity.
Outcome criterion_kolmogorov() {
  Outcome out;
  const double q95 = kolmogorov_quantile(0.95);
  double worst_rt = 0.0;
  for (double p = 0.01; p < 0.995; p += 0.007)
    worst_rt = std::max(worst_rt, std::abs(kolmogorov_cdf(kolmogorov_quantile(p)) - p));
  out.pass = std::abs(q95 - 1.358) <= 1e-3 && worst_rt <= 1e-9;
  std::ostringstream ss;
  ss << "q(0.95) = " << q95 << ", max round-trip error " << worst_rt;
  out.detail = ss.str();
  return out;
}

// 5. The asymptotic-oracle radius dwarfs the literature recommendation.
Outcome criterion_delta_ratio() {
  Outcome out;
  TuningInputs t;
  t.n = 2500;
  t.d = 10;
  t.r = 2.0;
  t.alpha = 0.05;
  t.c_d = 1.0;
  t.diam = support_diameter_uniform_design(1.0, 10.0, 10, unit_first(10));
  const double ratio =
      delta_asymptotic(t) / delta_bcw_sqrt_lasso(2500, 10, 0.05, 1.0, 10.0);
  out.pass = ratio > 10.0;
  std::ostringstream ss;
  ss << "ratio = " << ratio;
  out.detail = ss.str();
  return out;
}

// 6. Around the zero-selection threshold, the oracle radius keeps every
//    coefficient at zero below it and starts selecting above it.
Outcome criterion_selection_threshold() {
  Outcome out;
  RunOptions opts;
  opts.reps = 200;
  opts.seed = 1006;
  const auto result = run_selection_histogram(paper_design(), {2125, 2500}, opts);

  const auto modal_2125 =
      result.aggregates.at("modal_count").at("2125").at("sqrt_lasso_new").get<long>();
  const double frac_2125 =
      result.aggregates.at("fraction_nonzero").at("2125").at("sqrt_lasso_new").get<double>();
  const double frac_2500 =
      result.aggregates.at("fraction_nonzero").at("2500").at("sqrt_lasso_new").get<double>();
  const double frac_bcw =
      result.aggregates.at("fraction_nonzero").at("2500").at("sqrt_lasso_bcw").get<double>();
  out.pass = (modal_2125 == 0) && (frac_2500 > frac_2125) && (frac_bcw >= 0.99);
  std::ostringstream ss;
  ss << "modal nonzero count at n=2125: " << modal_2125
     << ", fraction selecting >= 1: " << frac_2125 << " -> " << frac_2500
     << " (literature rule: " << frac_bcw << ")";
  out.detail = ss.str();
  return out;
}

// 7. The out-of-sample bound holds under the oracle radius and fails under
//    the literature radius when the adversary uses the full allowance.
Outcome criterion_bound_coverage() {
  Outcome out;
  const auto design = paper_design();
  const long n = 2500;

  TuningInputs t;
  t.n = n;
  t.d = design.d();
  t.r = 2.0;
  t.alpha = 0.05;
  t.diam = support_diameter_uniform_design(design.sigma, design.lambda_scale,
                                           design.d(), design.beta);
  const double epsilon = delta_asymptotic(t);

  RunOptions opts;
  opts.reps = 500;
  opts.seed = 1007;

  BoundRule new_rule;
  new_rule.kind = BoundRule::Kind::NewOracle;
  BoundRule bcw_rule;
  bcw_rule.kind = BoundRule::Kind::Bcw;
  const double cov_new =
      verify_generalization_bound(design, n, 1000, new_rule, epsilon, 1.0, opts).coverage;
  const double cov_bcw =
      verify_generalization_bound(design, n, 1000, bcw_rule, epsilon, 1.0, opts).coverage;

  out.pass = cov_new >= 0.95 - 0.03 && (cov_new - cov_bcw) >= 0.10;
  std::ostringstream ss;
  ss << "coverage: oracle rule " << cov_new << ", literature rule " << cov_bcw;
  out.detail = ss.str();
  return out;
}

// 8. Under the adversarial test distribution the r = 2, l1 estimator beats
//    OLS and the tuned ridge/lasso; with clean testing the penalized
//    estimators give nothing away to OLS.
Outcome criterion_adversarial_comparison() {
  Outcome out;
  GaussianDesign design;
  design.beta = Eigen::VectorXd::Ones(100);
  design.sigma_eps = 1.0;
  const long n_train = 2000, n_test = 1000;
  const double alpha = 0.05;

  const double delta = delta_bcw_practice(n_train, 100, alpha);
  const double ridge_oracle = design.sigma_eps * design.sigma_eps * 100.0 /
                              (static_cast<double>(n_train) * design.beta.squaredNorm());
  const double lasso_oracle = delta * design.sigma_eps;

  std::vector<EstimatorSpec> ests;
  ests.push_back({EstimatorSpec::Kind::Ols, 0.0, "ols"});
  ests.push_back({EstimatorSpec::Kind::Ridge, ridge_oracle, "ridge"});
  ests.push_back({EstimatorSpec::Kind::Lasso, lasso_oracle, "lasso"});
  ests.push_back({EstimatorSpec::Kind::SqrtLasso, delta, "sqrt_lasso"});

  RunOptions opts;
  opts.reps = 200;
  opts.seed = 1008;
  opts.alpha = alpha;

  PerturbSpec attack;
  attack.worst_case = true;
  attack.delta = delta;
  attack.sigma = 1.0;
  const auto adversarial =
      run_train_test(design, n_train, n_test, attack, ests, opts);
  const auto& adv = adversarial.aggregates.at("mean_test_rmspe");
  const double adv_sqrt = adv.at("sqrt_lasso").get<double>();

  PerturbSpec clean;
  const auto plain = run_train_test(design, n_train, n_test, clean, ests, opts);
  const auto& cln = plain.aggregates.at("mean_test_rmspe");
  const double cln_ols = cln.at("ols").get<double>();

  // Clean-side comparison up to a Monte Carlo tie band: the exactly-tuned
  // ridge coincides with OLS to within ~1e-6 relative at this sample size, so
  // the sign alone is not resolvable; no penalized estimator may beat OLS by
  // more than the band.
  const double tie = 1e-4 * cln_ols;
  out.pass = adv_sqrt < adv.at("ols").get<double>() &&
             adv_sqrt < adv.at("ridge").get<double>() &&
             adv_sqrt < adv.at("lasso").get<double>() &&
             cln.at("ridge").get<double>() >= cln_ols - tie &&
             cln.at("lasso").get<double>() >= cln_ols - tie &&
             cln.at("sqrt_lasso").get<double>() >= cln_ols - tie;
  std::ostringstream ss;
  ss << "adversarial means: sqrt_lasso " << adv_sqrt << ", ols "
     << adv.at("ols").get<double>() << ", ridge " << adv.at("ridge").get<double>()
     << ", lasso " << adv.at("lasso").get<double>() << "; clean ols " << cln_ols
     << " <= penalized " << cln.at("sqrt_lasso").get<double>();
  out.detail = ss.str();
  return out;
}

// 9. Reparameterized l1 solutions coincide with the r = 2 fits and need a
//    much larger radius than the noise-oracle rule.
Outcome criterion_lasso_equivalence() {
  Outcome out;
  GaussianDesign design;
  design.beta = Eigen::VectorXd::Ones(100);
  design.sigma_eps = 1.0;

  RunOptions opts;
  opts.reps = 25;
  opts.seed = 1009;
  const auto result = run_lasso_equivalence(design, {200, 500, 1000, 2000}, opts);

  const double max_agreement =
      result.aggregates.at("max_sup_agreement").get<double>();
  const double mean_ratio = result.aggregates.at("mean_lambda_ratio").get<double>();
  out.pass = max_agreement <= 1e-6 && mean_ratio >= 5.0 && mean_ratio <= 20.0;
  std::ostringstream ss;
  ss << "max coefficient disagreement " << max_agreement << ", mean radius ratio "
     << mean_ratio << " over " << result.records.size() << " replications";
  out.detail = ss.str();
  return out;
}

// 10. The solver matches a dense grid oracle on low-dimensional instances
//     for every exponent/penalty cell.
Outcome criterion_solver_oracle() {
  Outcome out;
  Rng rng(1010);
  double worst = 0.0;
  for (double r : {1.0, 1.5, 2.0}) {
    const std::vector<Penalty> penalties = {Penalty::l1(2), Penalty::lp(2, 2.0),
                                            Penalty::slope(Eigen::Vector2d(1.5, 0.5))};
    for (const auto& pen : penalties) {
      for (int t = 0; t < 50; ++t) {
        const auto d = static_cast<Eigen::Index>(1 + rng.below(2));
        const auto data = oracles::random_dataset(rng, 20, 2);
        (void)d;
        RobustProblem prob(r, 1.0, rng.uniform(0.02, 0.8), pen);
        const auto report = solve_penalized(data, prob);
        const auto objective = [&](const Eigen::VectorXd& b) {
          return residual_rnorm(data, b, r) + prob.delta * prob.penalty(b);
        };
        const auto oracle_beta = oracles::grid_minimize(objective, 2, -10.0, 10.0);
        worst = std::max(worst,
                         std::abs(report.objective_value - objective(oracle_beta)));
      }
    }
  }
  out.pass = worst <= 1e-3;
  std::ostringstream ss;
  ss << "max objective mismatch " << worst;
  out.detail = ss.str();
  return out;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "worst-case duality tightness and feasibility", criterion_duality},
    {2, "explicit ball membership", criterion_ball_membership},
    {3, "1-D transport vs exhaustive matching", criterion_wasserstein_oracle},
    {4, "Kolmogorov quantile", criterion_kolmogorov},
    {5, "radius-recommendation ratio", criterion_delta_ratio},
    {6, "zero-selection threshold", criterion_selection_threshold},
    {7, "out-of-sample bound coverage", criterion_bound_coverage},
    {8, "adversarial estimator comparison", criterion_adversarial_comparison},
    {9, "l1 reparameterization equivalence", criterion_lasso_equivalence},
    {10, "solver vs grid oracle", criterion_solver_oracle},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
  }

  int failures = 0;
  for (const auto& criterion : kCriteria) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    const Outcome outcome = criterion.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion "
              << criterion.id << " (" << criterion.name << "): " << outcome.detail
              << "  [" << secs << " s]\n";
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
