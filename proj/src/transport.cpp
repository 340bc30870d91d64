#include "robustlm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "robustlm/rng.hpp"

namespace robustlm {

namespace {

double pow_r(double a, double r) {
  a = std::abs(a);
  if (r == 1.0) return a;
  if (r == 2.0) return a * a;
  return std::pow(a, r);
}

// Walks the merged quantile partition of two discrete quantile functions.
// Calls visit(i, j, mass) with indices into the sorted arrays for every
// segment of shared quantile mass.
template <typename Visit>
void merged_quantile_walk(std::span<const double> wa, std::span<const double> wb,
                          Visit&& visit) {
  std::size_t i = 0, j = 0;
  double ra = wa[0], rb = wb[0];
  while (i < wa.size() && j < wb.size()) {
    const double mass = std::min(ra, rb);
    if (mass > 0.0) visit(i, j, mass);
    ra -= mass;
    rb -= mass;
    if (ra <= 0.0 && i + 1 < wa.size()) ra = wa[++i];
    else if (ra <= 0.0) ++i;
    if (rb <= 0.0 && j + 1 < wb.size()) rb = wb[++j];
    else if (rb <= 0.0) ++j;
  }
}

struct SearchState {
  double best = 0.0;
  Eigen::VectorXd best_dir;
  long evaluations = 0;
};

}  // namespace

double wasserstein_1d(std::span<const double> a_sorted,
                      std::span<const double> b_sorted, double r) {
  if (a_sorted.empty() || b_sorted.empty())
    throw ValidationError("wasserstein_1d requires nonempty samples");
  if (r < 1.0) throw ValidationError("wasserstein_1d requires r >= 1");
  if (a_sorted.size() == b_sorted.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a_sorted.size(); ++i)
      acc += pow_r(a_sorted[i] - b_sorted[i], r);
    return std::pow(acc / static_cast<double>(a_sorted.size()), 1.0 / r);
  }
  const std::vector<double> wa(a_sorted.size(), 1.0 / static_cast<double>(a_sorted.size()));
  const std::vector<double> wb(b_sorted.size(), 1.0 / static_cast<double>(b_sorted.size()));
  return wasserstein_1d_weighted(a_sorted, wa, b_sorted, wb, r);
}

double wasserstein_1d_weighted(std::span<const double> a_sorted,
                               std::span<const double> a_weights,
                               std::span<const double> b_sorted,
                               std::span<const double> b_weights, double r) {
  if (a_sorted.empty() || b_sorted.empty())
    throw ValidationError("wasserstein_1d requires nonempty samples");
  if (a_sorted.size() != a_weights.size() || b_sorted.size() != b_weights.size())
    throw ValidationError("weight count does not match sample count");
  if (r < 1.0) throw ValidationError("wasserstein_1d requires r >= 1");
  for (double w : a_weights)
    if (w < 0.0) throw ValidationError("weights must be nonnegative");
  for (double w : b_weights)
    if (w < 0.0) throw ValidationError("weights must be nonnegative");

  double acc = 0.0;
  merged_quantile_walk(a_weights, b_weights,
                       [&](std::size_t i, std::size_t j, double mass) {
                         acc += mass * pow_r(a_sorted[i] - b_sorted[j], r);
                       });
  return std::pow(acc, 1.0 / r);
}

double projected_distance(const Dataset& p, const Dataset& q,
                          const Eigen::VectorXd& direction, double r) {
  if (direction.size() != p.dim() + 1 || p.dim() != q.dim())
    throw ValidationError("projection direction must live in R^{d+1}");
  Eigen::VectorXd a = p.covariates() * direction.head(p.dim()) +
                      direction[p.dim()] * p.outcomes();
  Eigen::VectorXd b = q.covariates() * direction.head(q.dim()) +
                      direction[q.dim()] * q.outcomes();
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  return wasserstein_1d({a.data(), static_cast<std::size_t>(a.size())},
                        {b.data(), static_cast<std::size_t>(b.size())}, r);
}

namespace {

// Shared direction search. `normalizer` returns the sphere norm of v,
// `norm_subgrad` a subgradient of it. The projected 1-D distance is
// 1-homogeneous, so the objective is W(v) / normalizer(v).
template <typename Normalizer, typename NormSubgrad, typename Sampler>
SlicedDistanceReport search_directions(const Dataset& p, const Dataset& q, double r,
                                       const std::string& norm_label,
                                       Normalizer&& normalizer,
                                       NormSubgrad&& norm_subgrad, Sampler&& sampler,
                                       const SliceSearchOptions& opts) {
  const Eigen::Index dim = p.dim() + 1;
  const Eigen::MatrixXd pj = p.joint();
  const Eigen::MatrixXd qj = q.joint();
  const std::vector<double> wp(static_cast<std::size_t>(pj.rows()),
                               1.0 / static_cast<double>(pj.rows()));
  const std::vector<double> wq(static_cast<std::size_t>(qj.rows()),
                               1.0 / static_cast<double>(qj.rows()));

  SearchState state;
  state.best_dir = Eigen::VectorXd::Zero(dim);

  struct Eval {
    double value = 0.0;            // W(v) / N(v)
    double raw = 0.0;              // W(v)
    Eigen::VectorXd grad_raw;      // gradient of W at v (matching held fixed)
  };

  const auto evaluate = [&](const Eigen::VectorXd& v, bool want_grad) {
    Eval out;
    Eigen::VectorXd a = pj * v;
    Eigen::VectorXd b = qj * v;
    std::vector<Eigen::Index> ia(static_cast<std::size_t>(a.size()));
    std::vector<Eigen::Index> ib(static_cast<std::size_t>(b.size()));
    std::iota(ia.begin(), ia.end(), Eigen::Index{0});
    std::iota(ib.begin(), ib.end(), Eigen::Index{0});
    std::sort(ia.begin(), ia.end(), [&](auto l, auto m) { return a[l] < a[m]; });
    std::sort(ib.begin(), ib.end(), [&](auto l, auto m) { return b[l] < b[m]; });

    double acc = 0.0;
    Eigen::VectorXd grad_pow = Eigen::VectorXd::Zero(dim);
    merged_quantile_walk(wp, wq, [&](std::size_t si, std::size_t sj, double mass) {
      const double diff = a[ia[si]] - b[ib[sj]];
      acc += mass * pow_r(diff, r);
      if (want_grad && diff != 0.0) {
        const double w = mass * r * std::pow(std::abs(diff), r - 1.0) *
                         (diff > 0.0 ? 1.0 : -1.0);
        grad_pow += w * (pj.row(ia[si]) - qj.row(ib[sj])).transpose();
      }
    });
    out.raw = std::pow(acc, 1.0 / r);
    const double nv = normalizer(v);
    out.value = nv > 0.0 ? out.raw / nv : 0.0;
    if (want_grad && out.raw > 0.0)
      out.grad_raw = (std::pow(out.raw, 1.0 - r) / r) * grad_pow;
    else if (want_grad)
      out.grad_raw = Eigen::VectorXd::Zero(dim);
    ++state.evaluations;
    if (out.value > state.best) {
      state.best = out.value;
      state.best_dir = v / nv;
    }
    return out;
  };

  // Deterministic axis probes plus the seeded random probes.
  std::vector<Eigen::VectorXd> starts;
  for (Eigen::Index k = 0; k < dim; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e[k] = 1.0;
    if (normalizer(e) > 0.0) {
      evaluate(e / normalizer(e), false);
      starts.push_back(e / normalizer(e));
    }
    e[k] = -1.0;
    if (normalizer(e) > 0.0) evaluate(e / normalizer(e), false);
  }

  Rng rng(opts.seed, 0);
  std::vector<std::pair<double, Eigen::VectorXd>> probe_pool;
  const int pool_budget = std::min(opts.probes, 64);
  for (int m = 0; m < opts.probes; ++m) {
    Eigen::VectorXd v = sampler(rng);
    const double nv = normalizer(v);
    if (nv <= 0.0) continue;
    v /= nv;
    const Eval e = evaluate(v, false);
    if (m < pool_budget) probe_pool.emplace_back(e.value, v);
  }
  std::sort(probe_pool.begin(), probe_pool.end(),
            [](const auto& l, const auto& m) { return l.first > m.first; });
  for (const auto& [val, v] : probe_pool) {
    starts.push_back(v);
    if (static_cast<int>(starts.size()) >= opts.restarts) break;
  }

  for (const auto& start : starts) {
    Eigen::VectorXd v = start;
    double step = 0.5;
    Eval cur = evaluate(v, true);
    for (int it = 0; it < opts.ascent_iters && step > 1e-12; ++it) {
      const double nv = normalizer(v);
      const Eigen::VectorXd grad_h =
          (cur.grad_raw * nv - cur.raw * norm_subgrad(v)) / (nv * nv);
      if (grad_h.norm() == 0.0) break;
      Eigen::VectorXd cand = v + step * grad_h / grad_h.norm();
      const double cn = normalizer(cand);
      if (cn <= 0.0) {
        step *= 0.5;
        continue;
      }
      cand /= cn;
      const Eval next = evaluate(cand, true);
      if (next.value > cur.value) {
        v = cand;
        cur = next;
        step *= 1.25;
      } else {
        step *= 0.5;
      }
    }
  }

  SlicedDistanceReport report;
  report.value = state.best;
  report.argmax = Projection{state.best_dir, norm_label};
  report.evaluations = state.evaluations;
  return report;
}

}  // namespace

SlicedDistanceReport msw_empirical(const Dataset& p, const Dataset& q, double r,
                                   BaseNorm norm, const SliceSearchOptions& opts) {
  if (p.dim() != q.dim()) throw ValidationError("datasets must share a dimension");
  const Eigen::Index dim = p.dim() + 1;

  const auto normalizer = [norm](const Eigen::VectorXd& v) {
    switch (norm) {
      case BaseNorm::L1: return v.cwiseAbs().sum();
      case BaseNorm::L2: return v.norm();
      case BaseNorm::Linf: return v.cwiseAbs().maxCoeff();
    }
    return v.norm();
  };
  const auto norm_subgrad = [norm](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    switch (norm) {
      case BaseNorm::L1: {
        Eigen::VectorXd s(v.size());
        for (Eigen::Index j = 0; j < v.size(); ++j)
          s[j] = v[j] > 0.0 ? 1.0 : (v[j] < 0.0 ? -1.0 : 0.0);
        return s;
      }
      case BaseNorm::L2:
        return v / std::max(v.norm(), 1e-300);
      case BaseNorm::Linf: {
        Eigen::Index k = 0;
        v.cwiseAbs().maxCoeff(&k);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(v.size());
        s[k] = v[k] >= 0.0 ? 1.0 : -1.0;
        return s;
      }
    }
    return v;
  };
  const auto sampler = [dim](Rng& rng) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) v[j] = rng.normal();
    return v;
  };

  return search_directions(p, q, r, to_string(norm), normalizer, norm_subgrad,
                           sampler, opts);
}

SlicedDistanceReport rho_msw_empirical(const Dataset& p, const Dataset& q,
                                       const RobustProblem& prob,
                                       const SliceSearchOptions& opts) {
  if (p.dim() != q.dim()) throw ValidationError("datasets must share a dimension");
  if (!prob.penalty.is_norm())
    throw UnsupportedOperation("the penalty-normalized sliced distance needs a norm penalty");
  if (prob.penalty.dim() != p.dim())
    throw ValidationError("penalty dimension does not match the data");

  const Eigen::Index d = p.dim();
  const double sigma = prob.sigma;
  const Penalty& pen = prob.penalty;

  const auto normalizer = [&](const Eigen::VectorXd& v) {
    return sigma * std::abs(v[d]) + pen(v.head(d));
  };
  const auto norm_subgrad = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd s(v.size());
    s.head(d) = pen.subgradient_certificate(v.head(d)).subgradient;
    s[d] = sigma * (v[d] > 0.0 ? 1.0 : (v[d] < 0.0 ? -1.0 : 0.0));
    return s;
  };
  const auto sampler = [&](Rng& rng) {
    // Penalty-sphere direction for the covariate block plus a free scalar for
    // the outcome coordinate; the caller renormalizes jointly.
    Eigen::VectorXd v(d + 1);
    for (Eigen::Index j = 0; j < d; ++j) v[j] = rng.normal();
    const double pv = pen(v.head(d));
    if (pv > 0.0) v.head(d) /= pv;
    v[d] = rng.normal();
    return v;
  };

  return search_directions(p, q, prob.r, "rho_sigma", normalizer, norm_subgrad,
                           sampler, opts);
}

GaussianExample gaussian_example(Eigen::Index d, double sigma_v, Eigen::Index n,
                                 Rng& rng) {
  if (d < 1 || n < 1) throw ValidationError("gaussian_example requires d, n >= 1");
  if (sigma_v < 0.0) throw ValidationError("sigma_v must be >= 0");

  Eigen::MatrixXd x(n, d), x_shift(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      x(i, j) = rng.normal();
      x_shift(i, j) = x(i, j) + sigma_v * rng.normal();
    }
    y[i] = rng.normal();
  }

  const double w2 = (std::sqrt(1.0 + sigma_v * sigma_v) - 1.0) * std::sqrt(double(d));
  return GaussianExample{w2, sigma_v * sigma_v, Dataset(std::move(x), y),
                         Dataset(std::move(x_shift), y)};
}

}  // namespace robustlm
