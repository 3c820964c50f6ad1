#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "c3i/distributions.hpp"
#include "c3i/error.hpp"
#include "c3i/linalg.hpp"

namespace c3i {

/// Designs whose column-scaled X^T X is worse conditioned than this are
/// treated as rank deficient.
inline constexpr double kMaxGramCondition = 1e12;

/// Least-squares fit with classical (homoskedastic) inference.
struct OlsFit {
  std::vector<std::string> term_labels;
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  std::vector<std::pair<double, double>> confidence_intervals_95;
  std::vector<double> fitted;
  std::vector<double> residuals;
  double r_squared = 0.0;
  double adjusted_r_squared = 0.0;
  double residual_sum_sq = 0.0;
  /// Regression standard error sqrt(RSS / (n - k)).
  double root_residual = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  bool has_intercept = false;
  Eigen::MatrixXd covariance;  ///< s^2 (X^T X)^-1

  [[nodiscard]] std::size_t df_resid() const { return n - k; }

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view label) const {
    auto it = std::find(term_labels.begin(), term_labels.end(), label);
    if (it == term_labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - term_labels.begin());
  }

  [[nodiscard]] bool has(std::string_view label) const { return index_of(label).has_value(); }

  [[nodiscard]] double coefficient(std::string_view label) const {
    auto i = index_of(label);
    if (!i) throw DataError("fit has no term '" + std::string(label) + "'");
    return coefficients[*i];
  }
};

[[nodiscard]] inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) return {};
  Eigen::MatrixXd x(static_cast<Eigen::Index>(columns[0].size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != columns[0].size()) throw DataError("design columns differ in length");
    for (std::size_t i = 0; i < columns[j].size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i];
  }
  return x;
}

/// Ordinary least squares of y on the columns of X.
///
/// When `has_intercept` is set, X must already contain the constant column;
/// R^2 is then centred, otherwise uncentred.
[[nodiscard]] inline OlsFit ols_fit(std::span<const double> y, const Eigen::MatrixXd& x, std::vector<std::string> labels,
                                    bool has_intercept = true) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<std::size_t>(x.cols());
  if (labels.size() != k) throw DataError("ols_fit: " + std::to_string(labels.size()) + " labels for " + std::to_string(k) + " columns");
  if (y.size() != n) throw DataError("ols_fit: y has " + std::to_string(y.size()) + " rows, X has " + std::to_string(n));
  if (k == 0) throw DataError("ols_fit: design has no columns");
  if (n <= k) {
    throw NumericalError("ols_fit: " + std::to_string(n) + " observations are not enough for " + std::to_string(k) + " terms");
  }
  if (!x.allFinite()) throw DataError("ols_fit: design has non-finite entries");

  if (gram_condition(x) > kMaxGramCondition) {
    auto keep = independent_columns(x, 1e-6);
    std::size_t bad = k - 1;
    for (std::size_t j = 0; j < k; ++j) {
      if (std::find(keep.begin(), keep.end(), j) == keep.end()) {
        bad = j;
        break;
      }
    }
    throw NumericalError("ols_fit: design is rank deficient; column '" + labels[bad] + "' is (nearly) a linear combination of earlier columns");
  }

  Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::VectorXd beta = qr.solve(yv);
  Eigen::MatrixXd r = qr.matrixQR().topRows(static_cast<Eigen::Index>(k)).triangularView<Eigen::Upper>();
  Eigen::MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
  Eigen::MatrixXd xtx_inv = rinv * rinv.transpose();

  Eigen::VectorXd fitted = x * beta;
  Eigen::VectorXd resid = yv - fitted;

  OlsFit fit;
  fit.term_labels = std::move(labels);
  fit.n = n;
  fit.k = k;
  fit.has_intercept = has_intercept;
  fit.residual_sum_sq = resid.squaredNorm();
  const double df = static_cast<double>(n - k);
  const double s2 = fit.residual_sum_sq / df;
  fit.root_residual = std::sqrt(s2);
  fit.covariance = s2 * xtx_inv;

  double tss = 0.0;
  if (has_intercept) {
    const double ybar = yv.mean();
    tss = (yv.array() - ybar).square().sum();
  } else {
    tss = yv.squaredNorm();
  }
  fit.r_squared = tss > 0.0 ? std::clamp(1.0 - fit.residual_sum_sq / tss, 0.0, 1.0) : 0.0;
  const double nn = static_cast<double>(n);
  fit.adjusted_r_squared = has_intercept ? 1.0 - (1.0 - fit.r_squared) * (nn - 1.0) / df
                                         : 1.0 - (1.0 - fit.r_squared) * nn / df;

  const double tcrit = upper_quantile(DistSpec::t(df), 0.025);
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double b = beta(jj);
    const double se = std::sqrt(std::max(0.0, fit.covariance(jj, jj)));
    double t = 0.0, p = 1.0;
    if (se > 0.0) {
      t = b / se;
      p = two_sided_t_p(t, df);
    } else if (b != 0.0) {
      t = std::copysign(std::numeric_limits<double>::infinity(), b);
      p = 0.0;
    }
    fit.coefficients.push_back(b);
    fit.standard_errors.push_back(se);
    fit.t_values.push_back(t);
    fit.p_values.push_back(p);
    fit.confidence_intervals_95.emplace_back(b - tcrit * se, b + tcrit * se);
  }
  fit.fitted.assign(fitted.data(), fitted.data() + n);
  fit.residuals.assign(resid.data(), resid.data() + n);
  return fit;
}

/// Selects a subset of design columns.
[[nodiscard]] inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(cols[j]));
  return out;
}

}  // namespace c3i
