#include "robustlm/sims.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include "robustlm/dro.hpp"
#include "robustlm/solver.hpp"
#include "robustlm/tuning.hpp"

namespace robustlm {

namespace {

constexpr double kNonzeroTol = 1e-8;

void parallel_for(long count, int threads, const std::function<void(long)>& body) {
  if (threads <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<long>(threads, count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (long i; (i = next.fetch_add(1)) < count;) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

long count_nonzero(const Eigen::VectorXd& beta) {
  long k = 0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) > kNonzeroTol) ++k;
  return k;
}

// Self-check of every generated worst-case test set: the coupled sliced value
// of the perturbation must equal its radius.
void check_coupling(const PerturbedSample& ps) {
  const double v = coupled_rho_msw(ps, 16, 11);
  if (v > ps.delta * (1.0 + 1e-9) + 1e-12)
    throw ValidationError("worst-case construction left its own ball");
}

Eigen::VectorXd fit_estimator(const Dataset& train, const EstimatorSpec& est) {
  switch (est.kind) {
    case EstimatorSpec::Kind::Ols:
      return solve_ols(train);
    case EstimatorSpec::Kind::Ridge:
      return solve_ridge(train, est.param);
    case EstimatorSpec::Kind::Lasso:
      return solve_lasso(train, est.param, 1e-10).beta_hat;
    case EstimatorSpec::Kind::SqrtLasso: {
      RobustProblem prob(2.0, 1.0, est.param, Penalty::l1(train.dim()));
      return solve_penalized(train, prob).beta_hat;
    }
  }
  throw ValidationError("unknown estimator kind");
}

}  // namespace

Dataset generate(const UniformDesign& design, Eigen::Index n, Rng& rng) {
  if (n < 1) throw ValidationError("sample size must be positive");
  const auto d = design.d();
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  const double scale = design.sigma * design.lambda_scale;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = scale * rng.uniform01();
    const double eps = rng.uniform(-1.0, 1.0);
    y[i] = x.row(i).dot(design.beta) + design.sigma * eps;
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset generate(const GaussianDesign& design, Eigen::Index n, Rng& rng) {
  if (n < 1) throw ValidationError("sample size must be positive");
  const auto d = design.d();
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
    y[i] = x.row(i).dot(design.beta) + design.sigma_eps * rng.normal();
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset generate(const Design& design, Eigen::Index n, Rng& rng) {
  return std::visit([&](const auto& d) { return generate(d, n, rng); }, design);
}

ExperimentResult run_selection_histogram(const UniformDesign& design,
                                         const std::vector<long>& n_grid,
                                         const RunOptions& opts) {
  const auto d = design.d();
  const double diam = support_diameter_uniform_design(
      design.sigma, design.lambda_scale, d, design.beta);

  ExperimentResult result;
  result.records.resize(static_cast<std::size_t>(n_grid.size()) *
                        static_cast<std::size_t>(opts.reps) * 2);

  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const long n = n_grid[g];
    TuningInputs t;
    t.n = n;
    t.d = d;
    t.r = 2.0;
    t.alpha = opts.alpha;
    t.c_d = 1.0;
    t.diam = diam;
    const double delta_new = delta_asymptotic(t);
    const double delta_bcw =
        delta_bcw_sqrt_lasso(n, d, opts.alpha, design.sigma, design.lambda_scale);

    parallel_for(opts.reps, opts.threads, [&, g, n](long rep) {
      Rng rng(opts.seed, static_cast<std::uint64_t>(g) * opts.reps + rep);
      const Dataset train = generate(design, n, rng);

      const auto fit_at = [&](double delta) {
        RobustProblem prob(2.0, 1.0, delta, Penalty::l1(d));
        return solve_penalized(train, prob);
      };

      const std::size_t slot =
          (g * static_cast<std::size_t>(opts.reps) + static_cast<std::size_t>(rep)) * 2;
      for (int which = 0; which < 2; ++which) {
        const double delta = which == 0 ? delta_new : delta_bcw;
        const SolveReport fit = fit_at(delta);
        ReplicationRecord rec;
        rec.seed = opts.seed;
        rec.rep = rep;
        rec.n = n;
        rec.estimator = which == 0 ? "sqrt_lasso_new" : "sqrt_lasso_bcw";
        rec.delta = delta;
        rec.train_rmspe = residual_rnorm(train, fit.beta_hat, 2.0);
        rec.nonzero_count = count_nonzero(fit.beta_hat);
        result.records[slot + static_cast<std::size_t>(which)] = std::move(rec);
      }
    });
  }

  // Histogram of nonzero counts per (n, rule).
  nlohmann::json agg;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const std::string n_key = std::to_string(n_grid[g]);
    for (const char* rule : {"sqrt_lasso_new", "sqrt_lasso_bcw"}) {
      std::map<long, long> counts;
      long total = 0, any_nonzero = 0;
      for (const auto& rec : result.records) {
        if (rec.n != n_grid[g] || rec.estimator != rule) continue;
        ++counts[rec.nonzero_count];
        ++total;
        if (rec.nonzero_count > 0) ++any_nonzero;
      }
      long modal = 0, modal_count = -1;
      for (const auto& [k, c] : counts) {
        agg["histogram"][n_key][rule][std::to_string(k)] =
            static_cast<double>(c) / static_cast<double>(total);
        if (c > modal_count) {
          modal_count = c;
          modal = k;
        }
      }
      agg["modal_count"][n_key][rule] = modal;
      agg["fraction_nonzero"][n_key][rule] =
          static_cast<double>(any_nonzero) / static_cast<double>(total);
    }
  }
  result.aggregates = std::move(agg);
  return result;
}

ExperimentResult run_train_test(const Design& design, long n_train, long n_test,
                                const PerturbSpec& perturb,
                                const std::vector<EstimatorSpec>& estimators,
                                const RunOptions& opts) {
  if (estimators.empty()) throw ValidationError("no estimators requested");
  const auto d = std::visit([](const auto& dd) { return dd.d(); }, design);

  ExperimentResult result;
  result.records.resize(static_cast<std::size_t>(opts.reps) * estimators.size());

  parallel_for(opts.reps, opts.threads, [&](long rep) {
    Rng rng_train(opts.seed, static_cast<std::uint64_t>(rep) * 4);
    Rng rng_test(opts.seed, static_cast<std::uint64_t>(rep) * 4 + 1);
    const Dataset train = generate(design, n_train, rng_train);
    const Dataset fresh = generate(design, n_test, rng_test);

    for (std::size_t e = 0; e < estimators.size(); ++e) {
      const Eigen::VectorXd beta = fit_estimator(train, estimators[e]);

      double test_rmspe;
      if (perturb.worst_case) {
        RobustProblem prob(2.0, perturb.sigma, perturb.delta, Penalty::l1(d));
        const PerturbedSample ps = worst_case_distribution(fresh, prob, beta);
        check_coupling(ps);
        test_rmspe = residual_rnorm(ps.perturbed, beta, 2.0);
      } else {
        test_rmspe = residual_rnorm(fresh, beta, 2.0);
      }

      ReplicationRecord rec;
      rec.seed = opts.seed;
      rec.rep = rep;
      rec.n = n_train;
      rec.estimator = estimators[e].name;
      rec.delta = estimators[e].param;
      rec.train_rmspe = residual_rnorm(train, beta, 2.0);
      rec.test_rmspe = test_rmspe;
      rec.nonzero_count = count_nonzero(beta);
      result.records[static_cast<std::size_t>(rep) * estimators.size() + e] =
          std::move(rec);
    }
  });

  nlohmann::json agg;
  for (const auto& est : estimators) {
    double train_sum = 0.0, test_sum = 0.0;
    long count = 0;
    for (const auto& rec : result.records) {
      if (rec.estimator != est.name) continue;
      train_sum += rec.train_rmspe;
      test_sum += rec.test_rmspe;
      ++count;
    }
    agg["mean_train_rmspe"][est.name] = train_sum / static_cast<double>(count);
    agg["mean_test_rmspe"][est.name] = test_sum / static_cast<double>(count);
  }
  result.aggregates = std::move(agg);
  return result;
}

BoundCoverage verify_generalization_bound(const UniformDesign& design, long n,
                                          long n_test, const BoundRule& rule,
                                          double epsilon, double sigma,
                                          const RunOptions& opts) {
  if (epsilon < 0.0) throw ValidationError("epsilon must be >= 0");
  const auto d = design.d();
  const double diam = support_diameter_uniform_design(
      design.sigma, design.lambda_scale, d, design.beta);

  double rule_delta = 0.0;
  std::string rule_name;
  switch (rule.kind) {
    case BoundRule::Kind::NewOracle: {
      TuningInputs t;
      t.n = n;
      t.d = d;
      t.r = 2.0;
      t.alpha = opts.alpha;
      t.c_d = 1.0;
      t.diam = diam;
      rule_delta = delta_asymptotic(t);
      rule_name = "new";
      break;
    }
    case BoundRule::Kind::Bcw:
      rule_delta =
          delta_bcw_sqrt_lasso(n, d, opts.alpha, design.sigma, design.lambda_scale);
      rule_name = "bcw";
      break;
    case BoundRule::Kind::Fixed:
      rule_delta = rule.fixed_delta;
      rule_name = "fixed";
      break;
  }

  ExperimentResult result;
  result.records.resize(static_cast<std::size_t>(opts.reps));
  std::atomic<long> holds{0};

  parallel_for(opts.reps, opts.threads, [&](long rep) {
    Rng rng_train(opts.seed, static_cast<std::uint64_t>(rep) * 4);
    Rng rng_test(opts.seed, static_cast<std::uint64_t>(rep) * 4 + 1);
    const Dataset train = generate(design, n, rng_train);
    const Dataset fresh = generate(design, n_test, rng_test);

    RobustProblem fit_prob(2.0, sigma, rule_delta, Penalty::l1(d));
    const Eigen::VectorXd beta = solve_penalized(train, fit_prob).beta_hat;

    double lhs;
    if (epsilon > 0.0) {
      RobustProblem attack(2.0, sigma, epsilon, Penalty::l1(d));
      const PerturbedSample ps = worst_case_distribution(fresh, attack, beta);
      check_coupling(ps);
      lhs = residual_rnorm(ps.perturbed, beta, 2.0);
    } else {
      lhs = residual_rnorm(fresh, beta, 2.0);
    }

    // The rule's out-of-sample bound: its delta covers the sampling radius
    // and doubles as its own estimate of the test-distribution drift.
    const double rho = beta.cwiseAbs().sum();
    const double rhs =
        residual_rnorm(train, beta, 2.0) + 2.0 * rule_delta * (sigma + rho);
    if (lhs <= rhs) holds.fetch_add(1);

    ReplicationRecord rec;
    rec.seed = opts.seed;
    rec.rep = rep;
    rec.n = n;
    rec.estimator = rule_name;
    rec.delta = rule_delta;
    rec.train_rmspe = residual_rnorm(train, beta, 2.0);
    rec.test_rmspe = lhs;
    rec.nonzero_count = count_nonzero(beta);
    rec.bound_lhs = lhs;
    rec.bound_rhs = rhs;
    result.records[static_cast<std::size_t>(rep)] = std::move(rec);
  });

  BoundCoverage out;
  out.coverage = static_cast<double>(holds.load()) / static_cast<double>(opts.reps);
  result.aggregates["coverage"] = out.coverage;
  result.aggregates["rule"] = rule_name;
  result.aggregates["rule_delta"] = rule_delta;
  result.aggregates["epsilon"] = epsilon;
  out.result = std::move(result);
  return out;
}

ExperimentResult run_lasso_equivalence(const GaussianDesign& design,
                                       const std::vector<long>& n_grid,
                                       const RunOptions& opts) {
  const auto d = design.d();
  constexpr long n_test = 1000;

  ExperimentResult result;
  result.records.resize(static_cast<std::size_t>(n_grid.size()) *
                        static_cast<std::size_t>(opts.reps));

  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const long n = n_grid[g];
    const double delta_sql = delta_bcw_practice(n, d, opts.alpha);
    const double lambda_oracle = delta_sql * design.sigma_eps;

    parallel_for(opts.reps, opts.threads, [&, g, n](long rep) {
      const std::uint64_t base =
          (static_cast<std::uint64_t>(g) * opts.reps + rep) * 4;
      Rng rng_train(opts.seed, base);
      Rng rng_test(opts.seed, base + 1);
      const Dataset train = generate(design, n, rng_train);
      const Dataset fresh = generate(design, n_test, rng_test);

      RobustProblem prob(2.0, 1.0, delta_sql, Penalty::l1(d));
      SolveOptions tight;
      tight.kkt_tol = 1e-10;
      const Eigen::VectorXd beta_sql = solve_penalized(train, prob, tight).beta_hat;
      const double resid_scale = residual_rnorm(train, beta_sql, 2.0);

      const double lambda_equiv = delta_sql * resid_scale;
      const Eigen::VectorXd beta_lasso =
          solve_lasso(train, lambda_equiv, 1e-14).beta_hat;

      const double agreement = (beta_lasso - beta_sql).cwiseAbs().maxCoeff();

      // Worst-case test at the SQL radius, at each fit's own coefficients.
      const auto adversarial_rmspe = [&](const Eigen::VectorXd& b) {
        const PerturbedSample ps = worst_case_distribution(fresh, prob, b);
        return residual_rnorm(ps.perturbed, b, 2.0);
      };
      const double test_sql = adversarial_rmspe(beta_sql);
      const double test_lasso = adversarial_rmspe(beta_lasso);

      ReplicationRecord rec;
      rec.seed = opts.seed;
      rec.rep = rep;
      rec.n = n;
      rec.estimator = "lasso_reparameterized";
      rec.delta = lambda_equiv;
      rec.train_rmspe = agreement;  // sup-norm coefficient disagreement
      rec.test_rmspe = test_lasso / test_sql;
      rec.nonzero_count = count_nonzero(beta_sql);
      rec.bound_lhs = lambda_equiv;
      rec.bound_rhs = lambda_oracle;
      result.records[g * static_cast<std::size_t>(opts.reps) +
                     static_cast<std::size_t>(rep)] = std::move(rec);
    });
  }

  nlohmann::json agg;
  double ratio_sum = 0.0, agree_max = 0.0, test_ratio_max = 0.0;
  for (const auto& rec : result.records) {
    ratio_sum += rec.bound_lhs / rec.bound_rhs;
    agree_max = std::max(agree_max, rec.train_rmspe);
    test_ratio_max = std::max(test_ratio_max, std::abs(rec.test_rmspe - 1.0));
  }
  const auto total = static_cast<double>(result.records.size());
  agg["mean_lambda_ratio"] = ratio_sum / total;
  agg["max_sup_agreement"] = agree_max;
  agg["max_test_rmspe_ratio_gap"] = test_ratio_max;
  result.aggregates = std::move(agg);
  return result;
}

void write_records_csv(const ExperimentResult& result,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << "seed,rep,n,estimator,delta,train_rmspe,test_rmspe,nonzero_count,"
         "bound_lhs,bound_rhs\n";
  const auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const auto& r : result.records) {
    out << r.seed << ',' << r.rep << ',' << r.n << ',' << r.estimator << ','
        << cell(r.delta) << ',' << cell(r.train_rmspe) << ',' << cell(r.test_rmspe)
        << ',' << (r.nonzero_count < 0 ? std::string() : std::to_string(r.nonzero_count))
        << ',' << cell(r.bound_lhs) << ',' << cell(r.bound_rhs) << '\n';
  }
}

}  // namespace robustlm
