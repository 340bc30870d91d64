#include "robustlm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace robustlm {

namespace {

std::vector<std::string> default_names(Eigen::Index d) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

void validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() < 1) throw ValidationError("dataset must contain at least one row");
  if (x.rows() != y.size())
    throw ValidationError("covariate and outcome row counts differ");
  if (!x.allFinite() || !y.allFinite())
    throw ValidationError("dataset contains a non-finite value");
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd outcomes)
    : Dataset(std::move(covariates), std::move(outcomes), {}, "y") {}

Dataset::Dataset(Eigen::MatrixXd covariates, Eigen::VectorXd outcomes,
                 std::vector<std::string> covariate_names, std::string outcome_name)
    : x_(std::move(covariates)),
      y_(std::move(outcomes)),
      covariate_names_(std::move(covariate_names)),
      outcome_name_(std::move(outcome_name)) {
  validate(x_, y_);
  if (covariate_names_.empty()) covariate_names_ = default_names(x_.cols());
  if (static_cast<Eigen::Index>(covariate_names_.size()) != x_.cols())
    throw ValidationError("covariate name count does not match dimension");
}

Eigen::VectorXd Dataset::residuals(const Eigen::VectorXd& beta) const {
  if (beta.size() != dim())
    throw ValidationError("coefficient length " + std::to_string(beta.size()) +
                          " does not match covariate dimension " + std::to_string(dim()));
  return y_ - x_ * beta;
}

Eigen::MatrixXd Dataset::joint() const {
  Eigen::MatrixXd z(n(), dim() + 1);
  z.leftCols(dim()) = x_;
  z.col(dim()) = y_;
  return z;
}

double residual_rnorm(const Dataset& data, const Eigen::VectorXd& beta, double r) {
  if (r < 1.0) throw ValidationError("residual r-norm requires r >= 1");
  const Eigen::VectorXd res = data.residuals(beta);
  const double n = static_cast<double>(data.n());
  if (r == 2.0) return std::sqrt(res.squaredNorm() / n);
  if (r == 1.0) return res.cwiseAbs().sum() / n;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < res.size(); ++i) acc += std::pow(std::abs(res[i]), r);
  return std::pow(acc / n, 1.0 / r);
}

CoefficientVector make_coefficient_vector(const Dataset& data, Eigen::VectorXd beta,
                                          double r) {
  const double rnorm = residual_rnorm(data, beta, r);
  return CoefficientVector{std::move(beta), rnorm};
}

Dataset load_csv(const std::filesystem::path& path, const std::string& outcome_column) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty file: " + path.string());
  const auto header = split_line(line);
  if (header.empty()) throw ParseError("missing header row in " + path.string());

  Eigen::Index outcome_idx = -1;
  std::vector<std::string> covariate_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name = trim(header[j]);
    if (name == outcome_column) {
      outcome_idx = static_cast<Eigen::Index>(j);
    } else {
      covariate_names.push_back(name);
    }
  }
  if (outcome_idx < 0)
    throw ValidationError("outcome column '" + outcome_column + "' not found in " +
                          path.string());
  const auto ncol = static_cast<Eigen::Index>(header.size());
  const Eigen::Index d = ncol - 1;

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != ncol)
      throw ParseError("row " + std::to_string(line_no) + ": expected " +
                       std::to_string(ncol) + " cells, found " +
                       std::to_string(cells.size()));
    std::vector<double> row(static_cast<std::size_t>(ncol));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string cell = trim(cells[j]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw ParseError("row " + std::to_string(line_no) + ", column '" +
                         trim(header[j]) + "': cannot parse '" + cell + "'");
      if (!std::isfinite(v))
        throw ValidationError("row " + std::to_string(line_no) + ", column '" +
                              trim(header[j]) + "': non-finite value '" + cell + "'");
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("no data rows in " + path.string());

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < ncol; ++j) {
      if (j == outcome_idx) {
        y[i] = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      } else {
        x(i, k++) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
  }
  return Dataset(std::move(x), std::move(y), std::move(covariate_names),
                 outcome_column);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  for (Eigen::Index j = 0; j < data.dim(); ++j)
    out << data.covariate_names()[static_cast<std::size_t>(j)] << ',';
  out << data.outcome_name() << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j)
      out << format_double(data.covariates()(i, j)) << ',';
    out << format_double(data.outcomes()[i]) << '\n';
  }
}

}  // namespace robustlm
