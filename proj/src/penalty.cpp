#include "robustlm/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace robustlm {

namespace {

constexpr double kSearchTol = 1e-10;

// Indices of v sorted by decreasing |v|, ties broken by index so the
// assignment is deterministic.
std::vector<Eigen::Index> abs_order(const Eigen::VectorXd& v) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  return idx;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double golden_min(double lo, double hi, const auto& f) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kSearchTol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

BaseNorm base_norm_from_string(const std::string& s) {
  if (s == "l1") return BaseNorm::L1;
  if (s == "l2") return BaseNorm::L2;
  if (s == "linf") return BaseNorm::Linf;
  throw ValidationError("unknown norm '" + s + "' (expected l1, l2 or linf)");
}

std::string to_string(BaseNorm b) {
  switch (b) {
    case BaseNorm::L1: return "l1";
    case BaseNorm::L2: return "l2";
    case BaseNorm::Linf: return "linf";
  }
  return "?";
}

Penalty Penalty::l1(Eigen::Index dim) {
  if (dim < 1) throw ValidationError("penalty dimension must be positive");
  return Penalty(PenaltyKind::L1, dim);
}

Penalty Penalty::lp(Eigen::Index dim, double p) {
  if (dim < 1) throw ValidationError("penalty dimension must be positive");
  if (!(p >= 1.0)) throw ValidationError("lp penalty requires p >= 1");
  Penalty pen(PenaltyKind::Lp, dim);
  pen.p_ = p;
  return pen;
}

Penalty Penalty::slope(Eigen::VectorXd weights) {
  if (weights.size() < 1) throw ValidationError("slope weights must be nonempty");
  for (Eigen::Index j = 0; j + 1 < weights.size(); ++j)
    if (weights[j] < weights[j + 1])
      throw ValidationError("slope weights must be nonincreasing");
  if (weights[weights.size() - 1] < 0.0)
    throw ValidationError("slope weights must be nonnegative");
  Penalty pen(PenaltyKind::Slope, weights.size());
  pen.weights_ = std::move(weights);
  return pen;
}

Penalty Penalty::support_set(Eigen::MatrixXd points) {
  if (points.rows() < 1) throw ValidationError("support set must be nonempty");
  // The set must be symmetric: every point needs its negation.
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    bool found = false;
    for (Eigen::Index k = 0; k < points.rows() && !found; ++k)
      found = (points.row(i) + points.row(k)).cwiseAbs().maxCoeff() <= 1e-12;
    if (!found)
      throw ValidationError("support set is not symmetric: point " +
                            std::to_string(i) + " has no negation");
  }
  Penalty pen(PenaltyKind::SupportSet, points.cols());
  pen.points_ = std::move(points);
  return pen;
}

bool Penalty::is_norm() const {
  switch (kind_) {
    case PenaltyKind::L1:
    case PenaltyKind::Lp:
      return true;
    case PenaltyKind::Slope:
      return weights_[0] > 0.0;
    case PenaltyKind::SupportSet:
      return false;
  }
  return false;
}

void Penalty::check_dim(const Eigen::VectorXd& v) const {
  if (v.size() != dim_)
    throw ValidationError("vector length " + std::to_string(v.size()) +
                          " does not match penalty dimension " + std::to_string(dim_));
}

double Penalty::value(const Eigen::VectorXd& v) const {
  check_dim(v);
  switch (kind_) {
    case PenaltyKind::L1:
      return v.cwiseAbs().sum();
    case PenaltyKind::Lp: {
      if (p_ == 1.0) return v.cwiseAbs().sum();
      if (p_ == 2.0) return v.norm();
      double acc = 0.0;
      for (Eigen::Index j = 0; j < v.size(); ++j) acc += std::pow(std::abs(v[j]), p_);
      return std::pow(acc, 1.0 / p_);
    }
    case PenaltyKind::Slope: {
      Eigen::VectorXd a = v.cwiseAbs();
      std::sort(a.data(), a.data() + a.size(), std::greater<double>());
      return weights_.dot(a);
    }
    case PenaltyKind::SupportSet:
      return (points_ * v).maxCoeff();
  }
  return 0.0;
}

double Penalty::dual_norm(const Eigen::VectorXd& x) const {
  check_dim(x);
  if (!is_norm())
    throw UnsupportedOperation("dual norm is undefined for this penalty kind");
  switch (kind_) {
    case PenaltyKind::L1:
      return x.cwiseAbs().maxCoeff();
    case PenaltyKind::Lp: {
      if (p_ == 1.0) return x.cwiseAbs().maxCoeff();
      if (p_ == 2.0) return x.norm();
      const double q = p_ / (p_ - 1.0);
      double acc = 0.0;
      for (Eigen::Index j = 0; j < x.size(); ++j) acc += std::pow(std::abs(x[j]), q);
      return std::pow(acc, 1.0 / q);
    }
    case PenaltyKind::Slope: {
      // sup over the unit ball is attained at a k-sparse vertex, which gives
      // max_k (sum of k largest |x_j|) / (sum of k largest weights).
      Eigen::VectorXd a = x.cwiseAbs();
      std::sort(a.data(), a.data() + a.size(), std::greater<double>());
      double best = 0.0, num = 0.0, den = 0.0;
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        num += a[k];
        den += weights_[k];
        if (den > 0.0) best = std::max(best, num / den);
      }
      return best;
    }
    case PenaltyKind::SupportSet:
      break;
  }
  throw UnsupportedOperation("dual norm is undefined for this penalty kind");
}

PenaltySubgradient Penalty::subgradient_certificate(const Eigen::VectorXd& beta) const {
  check_dim(beta);
  PenaltySubgradient cert;
  cert.beta = beta;
  cert.conjugate_value = 0.0;  // every supported kind has conjugate 0 on its subgradients

  Eigen::VectorXd sg = Eigen::VectorXd::Zero(dim_);
  const bool zero = beta.isZero(0.0);
  if (!zero) {
    switch (kind_) {
      case PenaltyKind::L1:
        for (Eigen::Index j = 0; j < dim_; ++j) sg[j] = sign(beta[j]);
        break;
      case PenaltyKind::Lp: {
        if (p_ == 1.0) {
          for (Eigen::Index j = 0; j < dim_; ++j) sg[j] = sign(beta[j]);
        } else {
          const double nrm = value(beta);
          for (Eigen::Index j = 0; j < dim_; ++j)
            sg[j] = std::pow(std::abs(beta[j]) / nrm, p_ - 1.0) * sign(beta[j]);
        }
        break;
      }
      case PenaltyKind::Slope: {
        const auto order = abs_order(beta);
        for (Eigen::Index rank = 0; rank < dim_; ++rank) {
          const Eigen::Index j = order[static_cast<std::size_t>(rank)];
          sg[j] = weights_[rank] * sign(beta[j]);
        }
        break;
      }
      case PenaltyKind::SupportSet: {
        Eigen::Index arg = 0;
        (points_ * beta).maxCoeff(&arg);
        sg = points_.row(arg).transpose();
        break;
      }
    }
  }
  cert.subgradient = sg;
  // conjugate_value is zero, so the ray correction vanishes.
  cert.loading = sg;
  return cert;
}

double Penalty::sphere_max_base_norm(BaseNorm base) const {
  // The maximizer over the penalty's unit sphere is a k-sparse vector with
  // equal-magnitude entries; scan k.
  const auto d = dim_;
  double best = 0.0;
  for (Eigen::Index k = 1; k <= d; ++k) {
    const double kk = static_cast<double>(k);
    double magnitude = 0.0;  // entry size of the k-sparse unit-penalty vector
    switch (kind_) {
      case PenaltyKind::L1:
        magnitude = 1.0 / kk;
        break;
      case PenaltyKind::Lp:
        magnitude = std::pow(kk, -1.0 / p_);
        break;
      case PenaltyKind::Slope: {
        const double wsum = weights_.head(k).sum();
        if (wsum <= 0.0) continue;
        magnitude = 1.0 / wsum;
        break;
      }
      case PenaltyKind::SupportSet:
        throw UnsupportedOperation("embedding constant needs a norm penalty");
    }
    double bn = 0.0;
    switch (base) {
      case BaseNorm::L1: bn = kk * magnitude; break;
      case BaseNorm::L2: bn = std::sqrt(kk) * magnitude; break;
      case BaseNorm::Linf: bn = magnitude; break;
    }
    best = std::max(best, bn);
  }
  return best;
}

NormEmbedding Penalty::embedding_constant(BaseNorm base) const {
  if (!is_norm())
    throw UnsupportedOperation("embedding constant is undefined for this penalty kind");
  const double mu = sphere_max_base_norm(base);

  // Profile of (penalty(v)+1)/||(v,-1)|| along the worst sphere direction,
  // parameterized by the penalty value t of v.
  const auto profile = [&](double t) {
    const double a = t * mu;  // base norm of the d-dimensional part
    double denom = 0.0;
    switch (base) {
      case BaseNorm::L1: denom = a + 1.0; break;
      case BaseNorm::L2: denom = std::hypot(a, 1.0); break;
      case BaseNorm::Linf: denom = std::max(a, 1.0); break;
    }
    return (t + 1.0) / denom;
  };

  double c = profile(0.0);
  if (mu > 0.0) c = std::min(c, 1.0 / mu);  // the t -> infinity limit
  double lo = 0.0;
  for (double hi = 1.0; hi <= 1e8; hi *= 16.0) {
    c = std::min(c, golden_min(lo, hi, profile));
    lo = hi;
  }

  NormEmbedding out;
  out.c_d = c;
  out.c_rho_d = std::max(1.0 / c, 1.0);
  return out;
}

nlohmann::json Penalty::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case PenaltyKind::L1:
      j["kind"] = "l1";
      break;
    case PenaltyKind::Lp:
      j["kind"] = "lp";
      j["p"] = p_;
      break;
    case PenaltyKind::Slope: {
      j["kind"] = "slope";
      j["lambda"] = std::vector<double>(weights_.data(), weights_.data() + weights_.size());
      break;
    }
    case PenaltyKind::SupportSet:
      j["kind"] = "support_function";
      break;
  }
  return j;
}

Penalty Penalty::from_json(const nlohmann::json& config, Eigen::Index dim) {
  const std::string kind = config.at("kind").get<std::string>();
  if (kind == "l1") return l1(dim);
  if (kind == "lp") return lp(dim, config.at("p").get<double>());
  if (kind == "slope") {
    const auto v = config.at("lambda").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != dim)
      throw ValidationError("slope weight count " + std::to_string(v.size()) +
                            " does not match dimension " + std::to_string(dim));
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    return slope(std::move(w));
  }
  throw ValidationError("unknown penalty kind '" + kind + "'");
}

std::string Penalty::description() const {
  switch (kind_) {
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::Lp: return "lp(p=" + std::to_string(p_) + ")";
    case PenaltyKind::Slope: return "slope";
    case PenaltyKind::SupportSet: return "support_function";
  }
  return "?";
}

}  // namespace robustlm
