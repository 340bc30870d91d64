#include "doctest.h"

#include <numbers>

#include "oracles.hpp"
#include "robustlm/tuning.hpp"

using namespace robustlm;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Independent re-implementations of the radius arithmetic, written with a
// different operation order than the library.
double oracle_general(long n, long d, double r, double s, double alpha, double gamma,
                      double c_d) {
  const double term1 = 180.0 * std::sqrt(d + 2.0);
  const double term2 = std::sqrt(2.0 * std::log(1.0 / alpha));
  const double term3 =
      std::sqrt(gamma / alpha) * 8.0 / (s / 2.0 - r) * std::sqrt(std::log(8.0 / alpha) + d + 2.0);
  const double c = std::pow(2.0, r) * r * (term1 + term2 + term3);
  const double body = c * std::pow(std::log(2.0 * n + 1.0), r / s) / std::sqrt(double(n));
  return std::max(1.0 / c_d, 1.0) * std::exp(std::log(body) / r);
}

double oracle_compact(long n, long d, double r, double alpha, double diam, double c_d) {
  const double c =
      (180.0 * std::sqrt(d + 2.0) + std::sqrt(2.0 * std::log(1.0 / alpha))) *
      std::pow(diam, r);
  return std::max(1.0 / c_d, 1.0) * std::exp(std::log(c / std::sqrt(double(n))) / r);
}

// Alternating-series Kolmogorov CDF (valid for moderate x) plus bisection,
// as an independent route to the quantile.
double oracle_kolmogorov_quantile(double p) {
  const auto cdf = [](double x) {
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      sum += sign * std::exp(-2.0 * k * k * x * x);
      sign = -sign;
    }
    return 1.0 - 2.0 * sum;
  };
  double lo = 0.3, hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Bisection on the erfc-based CDF as the published-quantile cross-check.
double oracle_normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::numbers::sqrt2) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TuningInputs base_inputs() {
  TuningInputs t;
  t.n = 2500;
  t.d = 10;
  t.r = 2.0;
  t.s = 5.0;
  t.alpha = 0.05;
  t.gamma = 1.0;
  t.c_d = 1.0;
  return t;
}

}  // namespace

TEST_CASE("general radius matches the arithmetic oracle") {
  auto t = base_inputs();
  CHECK(delta_general(t) ==
        doctest::Approx(oracle_general(2500, 10, 2.0, 5.0, 0.05, 1.0, 1.0))
            .epsilon(1e-12));

  // Halving c_d doubles the value.
  auto t2 = t;
  t2.c_d = 0.5;
  CHECK(delta_general(t2) == doctest::Approx(2.0 * delta_general(t)).epsilon(1e-12));

  // Strictly decreasing in n.
  auto tn = t;
  double last = delta_general(tn);
  for (long n : {3000L, 5000L, 20000L, 100000L}) {
    tn.n = n;
    const double v = delta_general(tn);
    CHECK(v < last);
    last = v;
  }

  // Moment order must exceed 2r.
  auto bad = t;
  bad.s = 4.0;
  CHECK_THROWS_AS(delta_general(bad), ValidationError);
  bad.s = 5.0;
  bad.gamma.reset();
  CHECK_THROWS_AS(delta_general(bad), ValidationError);
}

TEST_CASE("compact radius matches the arithmetic oracle") {
  auto t = base_inputs();
  t.diam = 33.8;
  CHECK(delta_compact(t) ==
        doctest::Approx(oracle_compact(2500, 10, 2.0, 0.05, 33.8, 1.0)).epsilon(1e-12));

  // Doubling the diameter doubles the radius for any r.
  for (double r : {1.0, 1.7, 2.0, 3.0}) {
    auto ta = t, tb = t;
    ta.r = r;
    tb.r = r;
    tb.diam = 2.0 * *t.diam;
    CHECK(delta_compact(tb) == doctest::Approx(2.0 * delta_compact(ta)).epsilon(1e-12));
  }

  // Shrinking alpha strictly increases the radius.
  auto ta = t;
  ta.alpha = 0.01;
  CHECK(delta_compact(ta) > delta_compact(t));

  auto bad = t;
  bad.diam.reset();
  CHECK_THROWS_AS(delta_compact(bad), ValidationError);
}

TEST_CASE("pivotal rule pins the moment bound and plugs in the outcome scale") {
  Rng rng(151);
  Eigen::MatrixXd x(40, 3);
  Eigen::VectorXd y(40);
  for (Eigen::Index i = 0; i < 40; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = rng.normal();
  }
  const Dataset data(x, y);

  const auto piv = delta_pivotal(data, 2.0, 5.0, 0.05, 1.0);
  auto t = base_inputs();
  t.n = 40;
  t.d = 3;
  t.gamma = std::pow(2.0, 5.0);
  CHECK(piv.delta == delta_general(t));

  // All-zero outcome floors sigma at one.
  const Dataset zero_y(x, Eigen::VectorXd::Zero(40));
  CHECK(delta_pivotal(zero_y, 2.0, 5.0, 0.05, 1.0).sigma == 1.0);

  // Outcome with mean |y|^s = 2^s gives sigma = 2.
  const Dataset two_y(x, Eigen::VectorXd::Constant(40, 2.0));
  CHECK(delta_pivotal(two_y, 2.0, 5.0, 0.05, 1.0).sigma == doctest::Approx(2.0));
}

TEST_CASE("asymptotic radius reproduces the published example") {
  auto t = base_inputs();
  t.diam = 33.82;
  const double v = delta_asymptotic(t);
  // sqrt(1.358 / 50) * 33.82, evaluated independently.
  const double oracle =
      std::sqrt(oracle_kolmogorov_quantile(0.95) / std::sqrt(2500.0)) * 33.82;
  CHECK(v == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(v == doctest::Approx(5.575).epsilon(5e-4));

  // Quadrupling n halves the r = 1 value.
  auto t1 = t;
  t1.r = 1.0;
  auto t4 = t1;
  t4.n = 4 * t1.n;
  CHECK(delta_asymptotic(t4) == doctest::Approx(0.5 * delta_asymptotic(t1)).epsilon(1e-12));
}

TEST_CASE("literature oracle and its practice variant") {
  // d = 1, alpha = .05 passes through the 0.975 normal quantile.
  const double v = delta_bcw_sqrt_lasso(100, 1, 0.05, 1.0, 1.0);
  CHECK(v == doctest::Approx(oracle_normal_quantile(0.975) / (std::sqrt(3.0) * 10.0))
                 .epsilon(1e-9));
  CHECK(oracle_normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));

  // alpha -> 1 sends the quantile argument to 1/2 and the value to zero.
  CHECK(delta_bcw_sqrt_lasso(100, 4, 1.0 - 1e-12, 1.0, 1.0) < 1e-4);
  CHECK(delta_bcw_sqrt_lasso(100, 4, 1.0 - 1e-12, 1.0, 1.0) <
        delta_bcw_sqrt_lasso(100, 4, 0.5, 1.0, 1.0));

  // The ratio against the asymptotic radius exceeds ten at the published
  // configuration.
  auto t = base_inputs();
  t.diam = support_diameter_uniform_design(1.0, 10.0, 10, vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
  const double ratio =
      delta_asymptotic(t) / delta_bcw_sqrt_lasso(2500, 10, 0.05, 1.0, 10.0);
  CHECK(ratio > 10.0);

  const double practice = delta_bcw_practice(2500, 10, 0.05);
  CHECK(practice ==
        doctest::Approx(1.1 * oracle_normal_quantile(1.0 - 0.05 / 20.0) / 50.0)
            .epsilon(1e-9));
}

TEST_CASE("kolmogorov quantile") {
  CHECK(kolmogorov_quantile(0.95) == doctest::Approx(1.358).epsilon(1e-3 / 1.358));
  CHECK(kolmogorov_quantile(0.95) ==
        doctest::Approx(oracle_kolmogorov_quantile(0.95)).epsilon(1e-9));
  CHECK(kolmogorov_quantile(0.5) == doctest::Approx(0.8276).epsilon(1e-4));

  // Round trip across a grid.
  for (double p = 0.02; p < 0.999; p += 0.023)
    CHECK(kolmogorov_cdf(kolmogorov_quantile(p)) == doctest::Approx(p).epsilon(1e-9));

  CHECK_THROWS_AS(kolmogorov_quantile(0.0), ValidationError);
  CHECK_THROWS_AS(kolmogorov_quantile(1.0), ValidationError);
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(std::abs(normal_quantile(0.975) - 1.959964) < 1e-6);  // published value
  CHECK(std::abs(normal_quantile(0.975) - oracle_normal_quantile(0.975)) < 1e-9);
  for (double p = 0.001; p < 0.9995; p += 0.0173) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    CHECK(normal_quantile(p) ==
          doctest::Approx(oracle_normal_quantile(p)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(normal_quantile(-0.1), ValidationError);
}

TEST_CASE("blanchet comparator") {
  const double v = delta_blanchet_comparator(2500, 10, 0.05);
  const double pi = std::numbers::pi;
  CHECK(v == doctest::Approx(pi / (pi - 2.0) * oracle_normal_quantile(0.9975) / 50.0)
                 .epsilon(1e-9));
  CHECK(delta_blanchet_comparator(10000, 10, 0.05) == doctest::Approx(0.5 * v));
  CHECK(delta_blanchet_comparator(2500, 50, 0.05) > v);
}

TEST_CASE("covariate normalization") {
  Rng rng(157);
  Eigen::MatrixXd x(2, 1);
  x << 1.0, 2.0;
  const Dataset data(x, vec({0, 0}) + Eigen::VectorXd::Ones(2));
  const auto norm = normalize_covariates(data, 4.0, BaseNorm::L2);
  CHECK(norm.scale == doctest::Approx(std::pow((1.0 + 16.0) / 2.0, 0.25)));

  // Post-normalization moment is one; a second application is the identity.
  double moment = 0.0;
  for (Eigen::Index i = 0; i < 2; ++i)
    moment += std::pow(std::abs(norm.data.covariates()(i, 0)), 4.0);
  CHECK(moment / 2.0 == doctest::Approx(1.0).epsilon(1e-12));
  const auto again = normalize_covariates(norm.data, 4.0, BaseNorm::L2);
  CHECK(again.scale == doctest::Approx(1.0).epsilon(1e-12));

  // Scaling covariates by 3 triples the reported scale, same output.
  const Dataset scaled((3.0 * x).eval(), data.outcomes());
  const auto norm3 = normalize_covariates(scaled, 4.0, BaseNorm::L2);
  CHECK(norm3.scale == doctest::Approx(3.0 * norm.scale));
  CHECK((norm3.data.covariates() - norm.data.covariates()).isZero(1e-12));

  // Degenerate all-zero covariates are rejected.
  const Dataset zeros(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(3));
  CHECK_THROWS_AS(normalize_covariates(zeros, 2.0, BaseNorm::L2), ValidationError);

  // Already-normalized data reports scale one.
  Rng rng2(3);
  Eigen::MatrixXd xr(100, 2);
  for (Eigen::Index i = 0; i < 100; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) xr(i, j) = rng2.normal();
  const auto pre = normalize_covariates(Dataset(xr, Eigen::VectorXd::Ones(100)), 3.0,
                                        BaseNorm::Linf);
  const auto post = normalize_covariates(pre.data, 3.0, BaseNorm::Linf);
  CHECK(post.scale == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform-design support diameter") {
  const auto e1 = vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const double diam = support_diameter_uniform_design(1.0, 10.0, 10, e1);
  CHECK(diam == doctest::Approx(10.0 * std::sqrt(10.0 + 1.44)).epsilon(1e-12));
  CHECK(diam == doctest::Approx(33.82).epsilon(1e-3));

  // beta = 0 specialization.
  CHECK(support_diameter_uniform_design(1.0, 10.0, 4, Eigen::VectorXd::Zero(4)) ==
        doctest::Approx(10.0 * std::sqrt(4.0 + 0.04)));

  // Linear in sigma.
  CHECK(support_diameter_uniform_design(3.0, 10.0, 10, e1) == doctest::Approx(3.0 * diam));
}

TEST_CASE("zero-selection sample bound") {
  const auto e1 = vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const double bound = zero_solution_sample_bound(e1, 10.0, 10, 0.05);
  // 9 * q^2 * (10 + 1.44)^2 with the unit direction factor equal to one.
  const double q = oracle_kolmogorov_quantile(0.95);
  CHECK(bound == doctest::Approx(9.0 * q * q * 11.44 * 11.44).epsilon(1e-6));
  CHECK(bound == doctest::Approx(2200.0).epsilon(0.02));

  CHECK_THROWS_AS(zero_solution_sample_bound(Eigen::VectorXd::Zero(3), 10.0, 3, 0.05),
                  ValidationError);
}

TEST_CASE("every radius rule is positive, decreasing in n, increasing as alpha falls") {
  auto t = base_inputs();
  t.diam = 20.0;
  const auto rules = std::vector<std::function<double(const TuningInputs&)>>{
      [](const TuningInputs& a) { return delta_general(a); },
      [](const TuningInputs& a) { return delta_compact(a); },
      [](const TuningInputs& a) { return delta_asymptotic(a); },
      [](const TuningInputs& a) {
        return delta_bcw_sqrt_lasso(a.n, a.d, a.alpha, 1.0, 10.0);
      },
      [](const TuningInputs& a) { return delta_blanchet_comparator(a.n, a.d, a.alpha); }};
  for (const auto& rule : rules) {
    const double v = rule(t);
    CHECK(v > 0.0);
    auto tn = t;
    tn.n *= 9;
    CHECK(rule(tn) < v);
    auto ta = t;
    ta.alpha = t.alpha / 10.0;
    CHECK(rule(ta) > v);
  }
}
