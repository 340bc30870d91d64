// Command-line front end: fit / tune / worstcase / msw / simulate / rank.
//
// Exit codes: 0 success, 1 usage error, 2 numeric or validation error.
// Diagnostics go to stderr, data to stdout. Every run echoes its resolved
// configuration so results are reproducible from the output alone.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robustlm/dataset.hpp"
#include "robustlm/dro.hpp"
#include "robustlm/penalty.hpp"
#include "robustlm/ranking.hpp"
#include "robustlm/report.hpp"
#include "robustlm/sims.hpp"
#include "robustlm/solver.hpp"
#include "robustlm/transport.hpp"
#include "robustlm/tuning.hpp"

namespace {

using nlohmann::json;
using namespace robustlm;

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  std::string format = "json";
};

void emit(const json& payload, const GlobalOpts& g) {
  if (!g.out.empty()) {
    std::ofstream f(g.out);
    if (!f) throw ValidationError("cannot write file: " + g.out);
    f << payload.dump(2) << '\n';
  } else {
    std::cout << payload.dump(2) << '\n';
  }
}

Eigen::VectorXd load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::vector<double> vals;
  std::string token;
  while (in >> token) {
    std::string clean;
    for (char c : token)
      if (c != ',') clean += c;
    if (clean.empty()) continue;
    try {
      vals.push_back(std::stod(clean));
    } catch (const std::exception&) {
      throw ParseError("cannot parse coefficient '" + token + "' in " + path);
    }
  }
  if (vals.empty()) throw ValidationError("no coefficients found in " + path);
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<Eigen::Index>(vals.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Penalty flags shared by fit / worstcase / msw.
struct PenaltyFlags {
  std::string kind = "l1";
  double p = 2.0;
  std::vector<double> slope_weights;

  Penalty build(Eigen::Index dim) const {
    if (kind == "l1") return Penalty::l1(dim);
    if (kind == "lp") return Penalty::lp(dim, p);
    if (kind == "slope") {
      if (slope_weights.empty())
        throw ValidationError("slope penalty needs --slope-lambda");
      Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(
          slope_weights.data(), static_cast<Eigen::Index>(slope_weights.size()));
      if (w.size() != dim)
        throw ValidationError("slope weight count does not match the data dimension");
      return Penalty::slope(w);
    }
    // Accept inline JSON for scripted use.
    return Penalty::from_json(json::parse(kind), dim);
  }

  json echo() const {
    json j{{"kind", kind}};
    if (kind == "lp") j["p"] = p;
    if (kind == "slope") j["lambda"] = slope_weights;
    return j;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--penalty", kind,
                    "penalty kind: l1 | lp | slope | inline JSON config");
    cmd->add_option("--p", p, "exponent for --penalty lp");
    cmd->add_option("--slope-lambda", slope_weights,
                    "nonincreasing slope weights (comma separated)")
        ->delimiter(',');
  }
};

Design design_from_json(const json& cfg) {
  const auto type = cfg.value("type", std::string("uniform"));
  const auto beta_vals = cfg.at("beta").get<std::vector<double>>();
  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(
      beta_vals.data(), static_cast<Eigen::Index>(beta_vals.size()));
  if (type == "uniform") {
    UniformDesign d;
    d.beta = beta;
    d.sigma = cfg.value("sigma", 1.0);
    d.lambda_scale = cfg.value("lambda", 10.0);
    return d;
  }
  if (type == "gaussian") {
    GaussianDesign d;
    d.beta = beta;
    d.sigma_eps = cfg.value("sigma_eps", 1.0);
    return d;
  }
  throw ValidationError("unknown design type '" + type + "'");
}

int run_fit(const GlobalOpts& g, const std::string& data_path,
            const std::string& outcome, double r, double delta, double sigma,
            const PenaltyFlags& pflags, long max_iter, double kkt_tol) {
  const Dataset data = load_csv(data_path, outcome);
  RobustProblem prob(r, sigma, delta, pflags.build(data.dim()));
  SolveOptions opts;
  opts.max_iter = max_iter;
  opts.kkt_tol = kkt_tol;
  opts.seed = g.seed;
  const SolveReport report = solve_penalized(data, prob, opts);

  json out;
  out["config"] = {{"data", data_path},   {"outcome", outcome},
                   {"r", r},              {"delta", delta},
                   {"sigma", sigma},      {"penalty", pflags.echo()},
                   {"max_iter", max_iter},{"kkt_tol", kkt_tol},
                   {"seed", g.seed}};
  out["beta"] = to_std(report.beta_hat);
  out["objective_value"] = report.objective_value;
  out["iterations"] = report.iterations;
  out["converged"] = report.converged;
  out["kkt_residual"] = report.kkt_residual;
  emit(out, g);
  return report.converged ? 0 : 2;
}

int run_tune(const GlobalOpts& g, const std::string& method, TuningInputs t,
             std::optional<double> c_rho_d_flag, const std::string& data_path,
             const std::string& outcome, double sigma_noise, double lambda_scale,
             bool gamma_plugin, BaseNorm base) {
  json constants;
  double delta = 0.0;
  double sigma_out = t.sigma;

  std::optional<Dataset> data;
  if (!data_path.empty()) {
    data = load_csv(data_path, outcome);
    t.n = data->n();
    t.d = data->dim();
  }
  if (c_rho_d_flag) t.c_d = 1.0 / std::max(*c_rho_d_flag, 1.0);

  if (method == "general") {
    if (gamma_plugin) {
      if (!data) throw ValidationError("--gamma-plugin needs --data");
      double moment = 0.0;
      const auto dual = [&](const Eigen::VectorXd& x, double y) {
        Eigen::VectorXd full(x.size() + 1);
        full.head(x.size()) = x;
        full[x.size()] = y;
        switch (base) {
          case BaseNorm::L1: return full.cwiseAbs().maxCoeff();
          case BaseNorm::L2: return full.norm();
          case BaseNorm::Linf: return full.cwiseAbs().sum();
        }
        return full.norm();
      };
      for (Eigen::Index i = 0; i < data->n(); ++i)
        moment += std::pow(dual(data->covariates().row(i).transpose(),
                                data->outcomes()[i]),
                           t.s);
      t.gamma = moment / static_cast<double>(data->n());
      constants["gamma_source"] = "plug-in, not oracle";
    }
    delta = delta_general(t);
    constants["gamma"] = *t.gamma;
  } else if (method == "compact") {
    delta = delta_compact(t);
    constants["diam"] = *t.diam;
  } else if (method == "pivotal") {
    if (!data) throw ValidationError("pivotal tuning needs --data");
    const auto piv = delta_pivotal(*data, t.r, t.s, t.alpha, t.c_d);
    delta = piv.delta;
    sigma_out = piv.sigma;
    constants["gamma"] = std::pow(2.0, t.s);
    constants["sigma_estimate"] = "empirical outcome moment plug-in";
  } else if (method == "asymptotic") {
    delta = delta_asymptotic(t);
    constants["kolmogorov_quantile"] = kolmogorov_quantile(1.0 - t.alpha);
  } else if (method == "bcw") {
    delta = delta_bcw_sqrt_lasso(t.n, t.d, t.alpha, sigma_noise, lambda_scale);
    constants["normal_quantile"] = normal_quantile(
        0.5 + 0.5 * std::pow(1.0 - t.alpha, 1.0 / static_cast<double>(t.d)));
    constants["practice_variant"] = delta_bcw_practice(t.n, t.d, t.alpha);
  } else if (method == "blanchet") {
    delta = delta_blanchet_comparator(t.n, t.d, t.alpha);
    constants["normal_quantile"] =
        normal_quantile(1.0 - t.alpha / (2.0 * static_cast<double>(t.d)));
  } else {
    throw CLI::ValidationError("--method", "unknown method '" + method + "'");
  }

  constants["c_d"] = t.c_d;
  constants["c_rho_d"] = t.c_rho_d();

  json out;
  out["config"] = {{"method", method}, {"n", t.n},         {"d", t.d},
                   {"r", t.r},         {"s", t.s},         {"alpha", t.alpha},
                   {"sigma", sigma_out}};
  if (t.diam) out["config"]["diam"] = *t.diam;
  out["constants"] = constants;
  out["delta"] = delta;
  emit(out, g);
  return 0;
}

int run_worstcase(const GlobalOpts& g, const std::string& data_path,
                  const std::string& outcome, const std::string& beta_path, double r,
                  double delta, double sigma, const PenaltyFlags& pflags) {
  const Dataset data = load_csv(data_path, outcome);
  const Eigen::VectorXd beta = load_vector(beta_path);
  RobustProblem prob(r, sigma, delta, pflags.build(data.dim()));
  const PerturbedSample ps = worst_case_distribution(data, prob, beta);

  std::filesystem::path in_path(data_path);
  std::filesystem::path out_path = in_path;
  out_path.replace_extension(".worstcase.csv");
  write_csv(ps.perturbed, out_path);

  json out;
  out["config"] = {{"data", data_path}, {"outcome", outcome},
                   {"beta_file", beta_path}, {"r", r},
                   {"delta", delta},     {"sigma", sigma},
                   {"penalty", pflags.echo()}};
  out["output"] = out_path.string();
  out["error_rnorm"] = delta;
  out["coupled_sliced_value"] = coupled_rho_msw(ps, 256, g.seed);
  emit(out, g);
  return 0;
}

int run_msw(const GlobalOpts& g, const std::string& file_a, const std::string& file_b,
            const std::string& outcome, double r, const std::string& norm,
            bool use_penalty_sphere, double sigma, const PenaltyFlags& pflags,
            int probes, int restarts) {
  const Dataset a = load_csv(file_a, outcome);
  const Dataset b = load_csv(file_b, outcome);

  SliceSearchOptions opts;
  opts.probes = probes;
  opts.restarts = restarts;
  opts.seed = g.seed;

  SlicedDistanceReport report;
  if (use_penalty_sphere) {
    RobustProblem prob(r, sigma, 0.0, pflags.build(a.dim()));
    report = rho_msw_empirical(a, b, prob, opts);
  } else {
    report = msw_empirical(a, b, r, base_norm_from_string(norm), opts);
  }

  json out;
  out["config"] = {{"file_a", file_a},   {"file_b", file_b}, {"outcome", outcome},
                   {"r", r},             {"norm", norm},     {"sigma", sigma},
                   {"probes", probes},   {"restarts", restarts},
                   {"penalty_sphere", use_penalty_sphere},
                   {"seed", g.seed}};
  if (use_penalty_sphere) out["config"]["penalty"] = pflags.echo();
  out["value"] = report.value;
  out["lower_bound"] = true;
  out["argmax_direction"] = to_std(report.argmax.direction);
  out["normalization"] = report.argmax.normalization;
  out["evaluations"] = report.evaluations;
  emit(out, g);
  return 0;
}

int run_rank(const GlobalOpts& g, const std::string& data_path,
             const std::string& outcome, const std::string& beta1_path,
             const std::string& beta2_path, double r, std::optional<double> delta,
             double sigma, double diam, double alpha,
             std::optional<double> c_rho_d, bool general_route, double s,
             double gamma) {
  const Dataset data = load_csv(data_path, outcome);
  const Eigen::VectorXd b1 = load_vector(beta1_path);
  const Eigen::VectorXd b2 = load_vector(beta2_path);

  double delta_used;
  if (delta) {
    delta_used = *delta;
  } else {
    TuningInputs t;
    t.n = data.n();
    t.d = data.dim();
    t.r = r;
    t.alpha = alpha;
    t.diam = diam;
    if (c_rho_d) t.c_d = 1.0 / std::max(*c_rho_d, 1.0);
    delta_used = delta_compact(t);
  }

  RobustProblem prob(r, sigma, delta_used, Penalty::l1(data.dim()));
  std::optional<GeneralRankingRoute> route;
  if (general_route) route = GeneralRankingRoute{s, gamma};
  const auto verdict =
      rank_estimators(data, prob, b1, b2, diam, alpha, c_rho_d, route);

  json out;
  out["config"] = {{"data", data_path}, {"outcome", outcome}, {"r", r},
                   {"delta", delta_used}, {"sigma", sigma},   {"diam", diam},
                   {"alpha", alpha},    {"general_route", general_route}};
  out["t_n"] = verdict.t_n;
  out["critical_value"] = verdict.critical_value;
  out["reject"] = verdict.reject;
  out["components"] = {{"rnorm1", verdict.components.rnorm1},
                       {"rnorm2", verdict.components.rnorm2},
                       {"rho1", verdict.components.rho1},
                       {"rho2", verdict.components.rho2}};
  emit(out, g);
  return 0;
}

void write_simulation_charts(const std::string& experiment,
                             const ExperimentResult& result,
                             const std::filesystem::path& dir) {
  if (experiment == "histogram") {
    // One grouped histogram per sample size.
    std::vector<long> ns;
    for (const auto& rec : result.records)
      if (std::find(ns.begin(), ns.end(), rec.n) == ns.end()) ns.push_back(rec.n);
    for (long n : ns) {
      long max_k = 0;
      for (const auto& rec : result.records)
        if (rec.n == n) max_k = std::max(max_k, rec.nonzero_count);
      max_k = std::min<long>(std::max<long>(max_k, 4), 10);
      std::vector<std::string> cats;
      for (long k = 0; k <= max_k; ++k) cats.push_back(std::to_string(k));
      std::vector<BarSeries> series;
      for (const char* rule : {"sqrt_lasso_new", "sqrt_lasso_bcw"}) {
        BarSeries s;
        s.label = rule;
        s.values.assign(cats.size(), 0.0);
        long total = 0;
        for (const auto& rec : result.records) {
          if (rec.n != n || rec.estimator != rule) continue;
          ++total;
          const auto k = static_cast<std::size_t>(std::min(rec.nonzero_count, max_k));
          s.values[k] += 1.0;
        }
        for (auto& v : s.values) v /= static_cast<double>(std::max<long>(total, 1));
        series.push_back(std::move(s));
      }
      write_histogram_svg(dir / ("histogram_n" + std::to_string(n) + ".svg"),
                          "selected nonzero coefficients, n = " + std::to_string(n),
                          cats, series);
    }
  } else if (experiment == "traintest") {
    std::vector<std::string> names;
    for (const auto& rec : result.records)
      if (std::find(names.begin(), names.end(), rec.estimator) == names.end())
        names.push_back(rec.estimator);
    std::vector<BarSeries> series(2);
    series[0].label = "train_rmspe";
    series[1].label = "test_rmspe";
    for (const auto& name : names) {
      series[0].values.push_back(
          result.aggregates.at("mean_train_rmspe").at(name).get<double>());
      series[1].values.push_back(
          result.aggregates.at("mean_test_rmspe").at(name).get<double>());
    }
    write_histogram_svg(dir / "train_test_rmspe.svg", "mean prediction error",
                        names, series);
  } else if (experiment == "bound") {
    LineSeries lhs, rhs;
    lhs.label = "test_rnorm";
    rhs.label = "bound";
    for (const auto& rec : result.records) {
      lhs.x.push_back(static_cast<double>(rec.rep));
      lhs.y.push_back(rec.bound_lhs);
      rhs.x.push_back(static_cast<double>(rec.rep));
      rhs.y.push_back(rec.bound_rhs);
    }
    write_line_chart_svg(dir / "bound_coverage.svg", "out-of-sample bound",
                         {lhs, rhs});
  } else if (experiment == "lasso-equiv") {
    LineSeries ratio;
    ratio.label = "lambda_ratio";
    for (const auto& rec : result.records) {
      ratio.x.push_back(static_cast<double>(rec.rep));
      ratio.y.push_back(rec.bound_lhs / rec.bound_rhs);
    }
    write_line_chart_svg(dir / "lambda_ratio.svg",
                         "reparameterized / oracle regularization", {ratio});
  }
}

int run_simulate(const GlobalOpts& g, const std::string& experiment,
                 const std::string& config_path, const std::string& out_dir) {
  std::ifstream cfg_in(config_path);
  if (!cfg_in) throw ValidationError("cannot open config: " + config_path);
  json cfg = json::parse(cfg_in);

  RunOptions opts;
  opts.reps = cfg.value("reps", 100L);
  opts.alpha = cfg.value("alpha", 0.05);
  opts.seed = cfg.value("seed", g.seed);
  opts.threads = g.threads;

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  ExperimentResult result;
  json extra;

  if (experiment == "histogram") {
    const auto design = design_from_json(cfg.at("design"));
    if (!std::holds_alternative<UniformDesign>(design))
      throw ValidationError("the histogram experiment uses the uniform design");
    result = run_selection_histogram(std::get<UniformDesign>(design),
                                     cfg.at("n_grid").get<std::vector<long>>(), opts);
  } else if (experiment == "traintest") {
    const auto design = design_from_json(cfg.at("design"));
    const long n_train = cfg.at("n_train").get<long>();
    const long n_test = cfg.value("n_test", 1000L);

    PerturbSpec perturb;
    if (cfg.contains("perturb")) {
      perturb.worst_case = cfg["perturb"].value("worst_case", false);
      perturb.sigma = cfg["perturb"].value("sigma", 1.0);
      if (cfg["perturb"].contains("delta"))
        perturb.delta = cfg["perturb"]["delta"].get<double>();
    }

    const auto d = std::visit([](const auto& dd) { return dd.d(); }, design);
    const double sigma_eps = std::holds_alternative<GaussianDesign>(design)
                                 ? std::get<GaussianDesign>(design).sigma_eps
                                 : std::get<UniformDesign>(design).sigma;
    const double beta_sq = std::visit(
        [](const auto& dd) { return dd.beta.squaredNorm(); }, design);

    std::vector<EstimatorSpec> ests;
    for (const auto& e : cfg.at("estimators")) {
      EstimatorSpec spec;
      const auto kind = e.at("kind").get<std::string>();
      const bool oracle = e.value("param", json()) == json("oracle");
      if (kind == "ols") {
        spec.kind = EstimatorSpec::Kind::Ols;
      } else if (kind == "ridge") {
        spec.kind = EstimatorSpec::Kind::Ridge;
        spec.param = oracle ? sigma_eps * sigma_eps * static_cast<double>(d) /
                                  (static_cast<double>(n_train) * beta_sq)
                            : e.at("param").get<double>();
      } else if (kind == "lasso") {
        spec.kind = EstimatorSpec::Kind::Lasso;
        spec.param = oracle
                         ? delta_bcw_practice(n_train, d, opts.alpha) * sigma_eps
                         : e.at("param").get<double>();
      } else if (kind == "sqrt_lasso") {
        spec.kind = EstimatorSpec::Kind::SqrtLasso;
        spec.param = e.at("param") == json("bcw")
                         ? delta_bcw_practice(n_train, d, opts.alpha)
                         : e.at("param").get<double>();
      } else {
        throw ValidationError("unknown estimator kind '" + kind + "'");
      }
      spec.name = e.value("name", kind);
      ests.push_back(std::move(spec));
    }
    if (perturb.worst_case && perturb.delta == 0.0 && cfg["perturb"].contains("delta_rule")) {
      if (cfg["perturb"]["delta_rule"] == "bcw_practice")
        perturb.delta = delta_bcw_practice(n_train, d, opts.alpha);
    }
    result = run_train_test(design, n_train, n_test, perturb, ests, opts);
  } else if (experiment == "bound") {
    const auto design = design_from_json(cfg.at("design"));
    if (!std::holds_alternative<UniformDesign>(design))
      throw ValidationError("the bound experiment uses the uniform design");
    const auto& ud = std::get<UniformDesign>(design);
    const long n = cfg.at("n").get<long>();
    const long n_test = cfg.value("n_test", 1000L);
    const double sigma = cfg.value("sigma", 1.0);

    BoundRule rule;
    const auto rule_cfg = cfg.value("rule", json("new"));
    if (rule_cfg.is_number()) {
      rule.kind = BoundRule::Kind::Fixed;
      rule.fixed_delta = rule_cfg.get<double>();
    } else if (rule_cfg == json("bcw")) {
      rule.kind = BoundRule::Kind::Bcw;
    } else {
      rule.kind = BoundRule::Kind::NewOracle;
    }

    double epsilon;
    const auto eps_cfg = cfg.value("epsilon", json("new_oracle"));
    if (eps_cfg.is_number()) {
      epsilon = eps_cfg.get<double>();
    } else {
      // The adversary moves as far as the sampling analysis allows.
      TuningInputs t;
      t.n = n;
      t.d = ud.d();
      t.r = 2.0;
      t.alpha = opts.alpha;
      t.diam = support_diameter_uniform_design(ud.sigma, ud.lambda_scale, ud.d(),
                                               ud.beta);
      epsilon = delta_asymptotic(t);
    }

    const auto out = verify_generalization_bound(ud, n, n_test, rule, epsilon,
                                                 sigma, opts);
    result = out.result;
    extra["coverage"] = out.coverage;
  } else if (experiment == "lasso-equiv") {
    const auto design = design_from_json(cfg.at("design"));
    if (!std::holds_alternative<GaussianDesign>(design))
      throw ValidationError("the lasso-equiv experiment uses the gaussian design");
    result = run_lasso_equivalence(std::get<GaussianDesign>(design),
                                   cfg.at("n_grid").get<std::vector<long>>(), opts);
  } else {
    throw CLI::ValidationError("--experiment",
                               "unknown experiment '" + experiment + "'");
  }

  write_records_csv(result, dir / "records.csv");
  json aggregates = result.aggregates;
  aggregates["config"] = cfg;
  aggregates["config"]["experiment"] = experiment;
  aggregates["config"]["threads"] = opts.threads;
  for (auto& [k, v] : extra.items()) aggregates[k] = v;
  {
    std::ofstream f(dir / "aggregates.json");
    f << aggregates.dump(2) << '\n';
  }
  write_simulation_charts(experiment, result, dir);

  json summary;
  summary["experiment"] = experiment;
  summary["records"] = result.records.size();
  summary["out"] = dir.string();
  for (auto& [k, v] : extra.items()) summary[k] = v;
  emit(summary, g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributionally robust linear prediction toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "global random seed");
  app.add_option("--threads", g.threads, "worker threads for simulations");
  app.add_option("--out", g.out, "write the JSON result here instead of stdout");
  app.add_option("--format", g.format, "output format (json)")
      ->check(CLI::IsMember({"json", "csv"}));

  // fit
  auto* fit = app.add_subcommand("fit", "solve the penalized regression");
  std::string fit_data, fit_outcome = "y";
  double fit_r = 2.0, fit_delta = 0.0, fit_sigma = 1.0, fit_kkt = 1e-7;
  long fit_max_iter = 100000;
  PenaltyFlags fit_pen;
  fit->add_option("--data", fit_data, "training CSV")->required();
  fit->add_option("--outcome", fit_outcome, "outcome column name");
  fit->add_option("--r", fit_r, "Wasserstein exponent (r >= 1)");
  fit->add_option("--delta", fit_delta, "regularization radius");
  fit->add_option("--sigma", fit_sigma, "outcome-scale hyperparameter");
  fit->add_option("--max-iter", fit_max_iter, "iteration cap");
  fit->add_option("--kkt-tol", fit_kkt, "stationarity tolerance");
  fit_pen.attach(fit);

  // tune
  auto* tune = app.add_subcommand("tune", "recommend the regularization radius");
  std::string tune_method = "asymptotic", tune_data, tune_outcome = "y";
  TuningInputs tinputs;
  double tune_sigma_noise = 1.0, tune_lambda = 10.0;
  std::optional<double> tune_c_rho_d;
  bool tune_gamma_plugin = false;
  std::string tune_norm = "l2";
  tune->add_option("--method", tune_method,
                   "general | compact | pivotal | asymptotic | bcw | blanchet");
  tune->add_option("--n", tinputs.n, "sample size");
  tune->add_option("--d", tinputs.d, "covariate dimension");
  tune->add_option("--r", tinputs.r, "Wasserstein exponent");
  tune->add_option("--s", tinputs.s, "moment order (s > 2r)");
  tune->add_option("--alpha", tinputs.alpha, "confidence level in (0,1)");
  double tune_gamma_val = 0.0;
  auto* gamma_opt = tune->add_option("--gamma", tune_gamma_val, "moment bound");
  tune->add_flag("--gamma-plugin", tune_gamma_plugin,
                 "estimate the moment bound from --data (plug-in, not oracle)");
  tune->add_option("--c-d", tinputs.c_d, "embedding constant c_d");
  double tune_diam_val = 0.0;
  auto* diam_opt = tune->add_option("--diam", tune_diam_val, "support diameter");
  double tune_c_rho_d_val = 0.0;
  auto* crd_opt =
      tune->add_option("--c-rho-d", tune_c_rho_d_val, "max(1/c_d, 1) directly");
  tune->add_option("--sigma-noise", tune_sigma_noise, "noise scale for --method bcw");
  tune->add_option("--lambda-scale", tune_lambda, "design scale for --method bcw");
  tune->add_option("--data", tune_data, "CSV for data-driven methods");
  tune->add_option("--outcome", tune_outcome, "outcome column name");
  tune->add_option("--norm", tune_norm, "base norm for the plug-in moment");

  // worstcase
  auto* wc = app.add_subcommand("worstcase",
                                "generate the worst-case perturbed sample");
  std::string wc_data, wc_outcome = "y", wc_beta;
  double wc_r = 2.0, wc_delta = 0.0, wc_sigma = 1.0;
  PenaltyFlags wc_pen;
  wc->add_option("data", wc_data, "training CSV")->required();
  wc->add_option("--outcome", wc_outcome, "outcome column name");
  wc->add_option("--beta-file", wc_beta, "coefficient file (one value per line)")
      ->required();
  wc->add_option("--r", wc_r, "Wasserstein exponent");
  wc->add_option("--delta", wc_delta, "perturbation radius");
  wc->add_option("--sigma", wc_sigma, "outcome-scale hyperparameter");
  wc_pen.attach(wc);

  // msw
  auto* msw = app.add_subcommand("msw", "max-sliced distance between two samples");
  std::string msw_a, msw_b, msw_outcome = "y", msw_norm = "l2";
  double msw_r = 2.0, msw_sigma = 1.0;
  bool msw_rho = false;
  int msw_probes = 512, msw_restarts = 16;
  PenaltyFlags msw_pen;
  msw->add_option("fileA", msw_a, "first CSV")->required();
  msw->add_option("fileB", msw_b, "second CSV")->required();
  msw->add_option("--outcome", msw_outcome, "outcome column name");
  msw->add_option("--r", msw_r, "Wasserstein exponent");
  msw->add_option("--norm", msw_norm, "sphere norm: l1 | l2 | linf");
  msw->add_flag("--rho", msw_rho, "use the penalty-normalized sphere");
  msw->add_option("--sigma", msw_sigma, "outcome coordinate scale (with --rho)");
  msw->add_option("--probes", msw_probes, "random probe directions");
  msw->add_option("--restarts", msw_restarts, "gradient ascent restarts");
  msw_pen.attach(msw);

  // rank
  auto* rank = app.add_subcommand("rank", "compare two estimators' worst-case error");
  std::string rank_data, rank_outcome = "y", rank_b1, rank_b2;
  double rank_r = 2.0, rank_sigma = 1.0, rank_diam = 0.0, rank_alpha = 0.05;
  double rank_delta_val = 0.0, rank_crd_val = 0.0, rank_s = 5.0, rank_gamma = 1.0;
  bool rank_general = false;
  rank->add_option("data", rank_data, "evaluation CSV")->required();
  rank->add_option("--outcome", rank_outcome, "outcome column name");
  rank->add_option("--beta1-file", rank_b1, "first coefficient file")->required();
  rank->add_option("--beta2-file", rank_b2, "second coefficient file")->required();
  rank->add_option("--r", rank_r, "Wasserstein exponent");
  auto* rank_delta_opt =
      rank->add_option("--delta", rank_delta_val,
                       "radius inside the statistic (default: compact rule)");
  rank->add_option("--sigma", rank_sigma, "outcome-scale hyperparameter");
  rank->add_option("--diam", rank_diam, "support diameter")->required();
  rank->add_option("--alpha", rank_alpha, "test size");
  auto* rank_crd_opt =
      rank->add_option("--c-rho-d", rank_crd_val, "max(1/c_d, 1) override");
  rank->add_flag("--general", rank_general, "moment-based critical value");
  rank->add_option("--s", rank_s, "moment order for --general");
  rank->add_option("--gamma", rank_gamma, "moment bound for --general");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a simulation experiment");
  std::string sim_experiment, sim_config, sim_out = "sim_out";
  sim->add_option("--experiment", sim_experiment,
                  "histogram | traintest | bound | lasso-equiv")
      ->required();
  sim->add_option("--config", sim_config, "experiment config JSON")->required();
  sim->add_option("--out", sim_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << '\n';
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*fit)
      return run_fit(g, fit_data, fit_outcome, fit_r, fit_delta, fit_sigma, fit_pen,
                     fit_max_iter, fit_kkt);
    if (*tune) {
      if (*gamma_opt) tinputs.gamma = tune_gamma_val;
      if (*diam_opt) tinputs.diam = tune_diam_val;
      if (*crd_opt) tune_c_rho_d = tune_c_rho_d_val;
      return run_tune(g, tune_method, tinputs, tune_c_rho_d, tune_data, tune_outcome,
                      tune_sigma_noise, tune_lambda, tune_gamma_plugin,
                      base_norm_from_string(tune_norm));
    }
    if (*wc)
      return run_worstcase(g, wc_data, wc_outcome, wc_beta, wc_r, wc_delta, wc_sigma,
                           wc_pen);
    if (*msw)
      return run_msw(g, msw_a, msw_b, msw_outcome, msw_r, msw_norm, msw_rho,
                     msw_sigma, msw_pen, msw_probes, msw_restarts);
    if (*rank) {
      std::optional<double> delta, crd;
      if (*rank_delta_opt) delta = rank_delta_val;
      if (*rank_crd_opt) crd = rank_crd_val;
      return run_rank(g, rank_data, rank_outcome, rank_b1, rank_b2, rank_r, delta,
                      rank_sigma, rank_diam, rank_alpha, crd, rank_general, rank_s,
                      rank_gamma);
    }
    if (*sim) return run_simulate(g, sim_experiment, sim_config, sim_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
