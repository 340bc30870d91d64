#include "robustlm/tuning.hpp"

#include <cmath>
#include <numbers>

namespace robustlm {

namespace {

constexpr double kSeriesTol = 1e-16;

double self_check(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " is not finite");
  return v;
}

}  // namespace

void TuningInputs::validate_common() const {
  if (n < 1) throw ValidationError("sample size must be positive");
  if (d < 1) throw ValidationError("dimension must be positive");
  if (!(r >= 1.0)) throw ValidationError("exponent r must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (!(c_d > 0.0)) throw ValidationError("embedding constant must be positive");
}

double delta_general(const TuningInputs& t) {
  t.validate_common();
  if (!(t.s > 2.0 * t.r))
    throw ValidationError("moment order s must exceed 2r");
  if (!t.gamma || !(*t.gamma > 0.0))
    throw ValidationError("moment bound gamma is required and must be positive");

  const double d2 = static_cast<double>(t.d) + 2.0;
  const double c = std::pow(2.0, t.r) * t.r *
                   (180.0 * std::sqrt(d2) + std::sqrt(2.0 * std::log(1.0 / t.alpha)) +
                    std::sqrt(*t.gamma / t.alpha) * (8.0 / (t.s / 2.0 - t.r)) *
                        std::sqrt(std::log(8.0 / t.alpha) + d2));
  const double n = static_cast<double>(t.n);
  const double inner = c * std::pow(std::log(2.0 * n + 1.0), t.r / t.s) / std::sqrt(n);
  return self_check(t.c_rho_d() * std::pow(inner, 1.0 / t.r), "delta");
}

double delta_compact(const TuningInputs& t) {
  t.validate_common();
  if (!t.diam || !(*t.diam > 0.0))
    throw ValidationError("support diameter is required and must be positive");

  const double d2 = static_cast<double>(t.d) + 2.0;
  const double c = (180.0 * std::sqrt(d2) + std::sqrt(2.0 * std::log(1.0 / t.alpha))) *
                   std::pow(*t.diam, t.r);
  const double inner = c / std::sqrt(static_cast<double>(t.n));
  return self_check(t.c_rho_d() * std::pow(inner, 1.0 / t.r), "delta");
}

PivotalDelta delta_pivotal(const Dataset& data, double r, double s, double alpha,
                           double c_d) {
  TuningInputs t;
  t.n = data.n();
  t.d = data.dim();
  t.r = r;
  t.s = s;
  t.alpha = alpha;
  t.c_d = c_d;
  t.gamma = std::pow(2.0, s);

  PivotalDelta out;
  out.delta = delta_general(t);
  double moment = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    moment += std::pow(std::abs(data.outcomes()[i]), s);
  moment /= static_cast<double>(data.n());
  out.sigma = std::max(std::pow(moment, 1.0 / s), 1.0);
  return out;
}

double delta_asymptotic(const TuningInputs& t) {
  t.validate_common();
  if (!t.diam || !(*t.diam > 0.0))
    throw ValidationError("support diameter is required and must be positive");
  const double q = kolmogorov_quantile(1.0 - t.alpha);
  const double inner = q / std::sqrt(static_cast<double>(t.n));
  return self_check(t.c_rho_d() * std::pow(inner, 1.0 / t.r) * *t.diam, "delta");
}

double delta_bcw_sqrt_lasso(long n, long d, double alpha, double sigma_noise,
                            double lambda_scale) {
  if (n < 1 || d < 1) throw ValidationError("n and d must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const double arg = 0.5 + 0.5 * std::pow(1.0 - alpha, 1.0 / static_cast<double>(d));
  return sigma_noise * lambda_scale * normal_quantile(arg) /
         (std::sqrt(3.0) * std::sqrt(static_cast<double>(n)));
}

double delta_bcw_practice(long n, long d, double alpha) {
  if (n < 1 || d < 1) throw ValidationError("n and d must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  return 1.1 * normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(d))) /
         std::sqrt(static_cast<double>(n));
}

double delta_blanchet_comparator(long n, long d, double alpha) {
  if (n < 1 || d < 1) throw ValidationError("n and d must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const double pi = std::numbers::pi;
  return (pi / (pi - 2.0)) *
         normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(d))) /
         std::sqrt(static_cast<double>(n));
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) {
    // Alternating tail series 1 - 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k < 200; ++k) {
      const double term = std::exp(-2.0 * k * k * x * x);
      sum += sign * term;
      sign = -sign;
      if (term < kSeriesTol) break;
    }
    return 1.0 - 2.0 * sum;
  }
  // Theta-dual form of the same series, numerically stable for small x.
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double a = (2.0 * k - 1.0) * std::numbers::pi;
    const double term = std::exp(-a * a / (8.0 * x * x));
    sum += term;
    if (term < kSeriesTol) break;
  }
  return std::sqrt(2.0 * std::numbers::pi) / x * sum;
}

double kolmogorov_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("kolmogorov quantile needs p in (0, 1)");
  double lo = 1e-6, hi = 5.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("normal quantile needs p in (0, 1)");

  // Rational initial guess, then Newton polish against the erfc-based CDF.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double t = q * q;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * q /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }

  for (int it = 0; it < 2; ++it) {
    const double err = normal_cdf(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf <= 0.0) break;
    x -= err / pdf;
  }
  return x;
}

NormalizedData normalize_covariates(const Dataset& data, double s, BaseNorm norm) {
  if (!(s >= 1.0)) throw ValidationError("moment order s must be >= 1");

  // Dual norm of the base norm, applied to the covariate block.
  const auto dual = [&](const Eigen::VectorXd& x) {
    switch (norm) {
      case BaseNorm::L1: return x.cwiseAbs().maxCoeff();
      case BaseNorm::L2: return x.norm();
      case BaseNorm::Linf: return x.cwiseAbs().sum();
    }
    return x.norm();
  };

  double moment = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    moment += std::pow(dual(data.covariates().row(i).transpose()), s);
  moment /= static_cast<double>(data.n());
  if (moment <= 0.0)
    throw ValidationError("cannot normalize: all covariates are zero");

  const double scale = std::pow(moment, 1.0 / s);
  Eigen::MatrixXd x = data.covariates() / scale;
  return NormalizedData{Dataset(std::move(x), data.outcomes(), data.covariate_names(),
                                data.outcome_name()),
                        scale};
}

double support_diameter_uniform_design(double sigma, double lambda, long d,
                                       const Eigen::VectorXd& beta) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  const double b1 = beta.cwiseAbs().sum();
  const double inner = static_cast<double>(d) + (b1 + 2.0 / lambda) * (b1 + 2.0 / lambda);
  return sigma * lambda * std::sqrt(inner);
}

double zero_solution_sample_bound(const Eigen::VectorXd& beta, double lambda, long d,
                                  double alpha) {
  const double b2 = beta.norm();
  if (b2 <= 0.0) throw ValidationError("beta must be nonzero");
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  const double dir_inf = beta.cwiseAbs().maxCoeff() / b2;
  const double q = kolmogorov_quantile(1.0 - alpha);
  const double b1 = beta.cwiseAbs().sum();
  const double core = static_cast<double>(d) + (b1 + 2.0 / lambda) * (b1 + 2.0 / lambda);
  return 9.0 * std::pow(dir_inf, -4.0) * q * q * core * core;
}

}  // namespace robustlm
