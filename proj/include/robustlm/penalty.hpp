#pragma once

#include <Eigen/Dense>
#include <string>

#include "robustlm/errors.hpp"
#include "json.hpp"

namespace robustlm {

enum class PenaltyKind { L1, Lp, Slope, SupportSet };
enum class BaseNorm { L1, L2, Linf };

BaseNorm base_norm_from_string(const std::string& s);
std::string to_string(BaseNorm b);

/// Subgradient data attached to a coefficient vector: a subgradient of the
/// penalty, the conjugate value there, and the perturbation loading
///   subgradient - beta * conjugate / (beta' beta)
/// (equal to the subgradient whenever the conjugate value is zero, and in
/// particular at beta = 0). The loading g satisfies |v' g| <= penalty(v)
/// for every v, which is what makes the additive worst-case construction land
/// inside the ambiguity ball.
struct PenaltySubgradient {
  Eigen::VectorXd beta;
  Eigen::VectorXd subgradient;
  double conjugate_value = 0.0;
  Eigen::VectorXd loading;
};

/// Constants of the norm embedding  c_d * ||(v, -1)|| <= penalty(v) + 1.
struct NormEmbedding {
  double c_d = 1.0;      // largest constant for which the inequality holds
  double c_rho_d = 1.0;  // max(1 / c_d, 1)
};

/// A convex, symmetric, positively homogeneous penalty on R^d.
///
/// Supported kinds: the l1 norm, lp norms (p >= 1), the sorted-l1 (slope)
/// norm with nonincreasing nonnegative weights, and support functions of
/// finite symmetric point sets (not a norm in general).
class Penalty {
 public:
  static Penalty l1(Eigen::Index dim);
  static Penalty lp(Eigen::Index dim, double p);
  static Penalty slope(Eigen::VectorXd weights);
  /// Support function of the symmetric finite set whose points are the rows
  /// of `points`.
  static Penalty support_set(Eigen::MatrixXd points);

  PenaltyKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  double p() const { return p_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// True for the kinds with norm structure (dual norm, embedding constant).
  bool is_norm() const;

  double value(const Eigen::VectorXd& v) const;
  double operator()(const Eigen::VectorXd& v) const { return value(v); }

  /// Dual norm sup_{penalty(y) = 1} x'y. Norm kinds only.
  double dual_norm(const Eigen::VectorXd& x) const;

  PenaltySubgradient subgradient_certificate(const Eigen::VectorXd& beta) const;

  /// Largest c_d with c_d ||(v,-1)|| <= penalty(v) + 1 for all v, found by
  /// minimizing the scalar profile (t+1)/||(v_t,-1)|| along the worst sphere
  /// direction (search tolerance 1e-10). Norm kinds only.
  NormEmbedding embedding_constant(BaseNorm base) const;

  nlohmann::json to_json() const;
  static Penalty from_json(const nlohmann::json& config, Eigen::Index dim);

  std::string description() const;

 private:
  Penalty(PenaltyKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  PenaltyKind kind_;
  Eigen::Index dim_;
  double p_ = 1.0;            // lp only
  Eigen::VectorXd weights_;   // slope only
  Eigen::MatrixXd points_;    // support_set only

  void check_dim(const Eigen::VectorXd& v) const;
  /// max ||v||_b over the unit sphere of this penalty (norm kinds).
  double sphere_max_base_norm(BaseNorm base) const;
};

}  // namespace robustlm
