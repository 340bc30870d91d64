#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "robustlm/errors.hpp"

namespace robustlm {

/// An in-memory sample of n rows (x_i, y_i) with uniform empirical weights.
/// Immutable after construction; all entries are validated to be finite.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd outcomes);
  Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd outcomes,
          std::vector<std::string> covariate_names, std::string outcome_name);

  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index dim() const { return x_.cols(); }

  const Eigen::MatrixXd& covariates() const { return x_; }
  const Eigen::VectorXd& outcomes() const { return y_; }
  const std::vector<std::string>& covariate_names() const { return covariate_names_; }
  const std::string& outcome_name() const { return outcome_name_; }

  Eigen::VectorXd residuals(const Eigen::VectorXd& beta) const;

  /// Rows of the joint (x, y) cloud in R^{d+1}, outcome appended last.
  Eigen::MatrixXd joint() const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::vector<std::string> covariate_names_;
  std::string outcome_name_;
};

/// ((1/n) sum |y_i - x_i' beta|^r)^(1/r), the empirical r-norm of residuals.
double residual_rnorm(const Dataset& data, const Eigen::VectorXd& beta, double r);

/// A candidate coefficient vector together with its residual r-norm on the
/// dataset it was scored against.
struct CoefficientVector {
  Eigen::VectorXd beta;
  double residual_rnorm = 0.0;
};

CoefficientVector make_coefficient_vector(const Dataset& data,
                                          Eigen::VectorXd beta, double r);

/// Parses a comma-separated file with a header row; the named column becomes
/// the outcome, every other column a covariate. Row order is preserved.
Dataset load_csv(const std::filesystem::path& path, const std::string& outcome_column);

/// Writes the dataset back out with shortest-round-trip decimal formatting,
/// so a reload reproduces every value bit-exactly.
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace robustlm
