#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "c3i/distributions.hpp"
#include "c3i/error.hpp"
#include "c3i/ols.hpp"
#include "c3i/series.hpp"

namespace c3i {

/// One row of the VAR coefficient table (Coef. / Std. Err. / z / P>|z|).
struct VarCoefficient {
  std::string equation;
  std::string variable;  ///< regressor variable, or "const"
  std::size_t lag = 0;   ///< 0 for the intercept
  double coef = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

struct VarFit {
  std::vector<std::string> variables;
  std::size_t lag_order = 0;
  std::vector<std::string> regressor_labels;  ///< "const", then "<var>_L<lag>"
  std::vector<OlsFit> equations;              ///< one per variable, same order
  std::vector<VarCoefficient> table;
  std::size_t nobs = 0;

  [[nodiscard]] std::size_t equation_index(std::string_view label) const {
    auto it = std::find(variables.begin(), variables.end(), label);
    if (it == variables.end()) throw DataError("VAR has no variable '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - variables.begin());
  }

  [[nodiscard]] const OlsFit& equation(std::string_view label) const { return equations[equation_index(label)]; }
};

[[nodiscard]] inline std::string lag_label(std::string_view variable, std::size_t lag) {
  return std::string(variable) + "_L" + std::to_string(lag);
}

/// Equation-by-equation OLS estimate of a VAR(lag_order) with intercept.
[[nodiscard]] inline VarFit var_fit(const Panel& panel, std::size_t lag_order) {
  if (lag_order < 1) throw ConfigError("var_fit: lag order must be at least 1");
  const std::size_t m = panel.cols();
  const std::size_t k = 1 + m * lag_order;
  if (panel.rows() <= lag_order || panel.rows() - lag_order <= k) {
    throw DataError("var_fit: " + std::to_string(panel.rows()) + " observations are too few for " + std::to_string(m) +
                    " variables at lag " + std::to_string(lag_order));
  }
  const std::size_t n = panel.rows() - lag_order;

  VarFit fit;
  fit.variables = panel.labels();
  fit.lag_order = lag_order;
  fit.nobs = n;
  fit.regressor_labels.push_back("const");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  x.col(0).setOnes();
  Eigen::Index c = 1;
  for (std::size_t v = 0; v < m; ++v) {
    for (std::size_t l = 1; l <= lag_order; ++l, ++c) {
      fit.regressor_labels.push_back(lag_label(panel.labels()[v], l));
      for (std::size_t r = 0; r < n; ++r) x(static_cast<Eigen::Index>(r), c) = panel.value(r + lag_order - l, v);
    }
  }

  for (std::size_t e = 0; e < m; ++e) {
    auto col = panel.column(e);
    std::vector<double> y(col.begin() + static_cast<long>(lag_order), col.end());
    auto eq = ols_fit(y, x, fit.regressor_labels, true);
    for (std::size_t j = 0; j < k; ++j) {
      VarCoefficient row;
      row.equation = fit.variables[e];
      if (j == 0) {
        row.variable = "const";
      } else {
        row.variable = fit.variables[(j - 1) / lag_order];
        row.lag = (j - 1) % lag_order + 1;
      }
      row.coef = eq.coefficients[j];
      row.std_err = eq.standard_errors[j];
      row.z = eq.t_values[j];
      row.p_value = two_sided_normal_p(row.z);
      fit.table.push_back(row);
    }
    fit.equations.push_back(std::move(eq));
  }
  return fit;
}

struct GrangerResult {
  std::string equation;
  std::string excluded;  ///< variable label or "ALL"
  double chi2 = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

/// Wald test that all lags of `excluded` (or of every other variable when
/// `excluded` is "ALL") are zero in the `target` equation.
[[nodiscard]] inline GrangerResult granger_exclusion(const VarFit& fit, std::string_view target, std::string_view excluded) {
  const std::size_t e = fit.equation_index(target);
  std::vector<std::size_t> vars;
  if (excluded == "ALL") {
    for (std::size_t v = 0; v < fit.variables.size(); ++v)
      if (v != e) vars.push_back(v);
  } else {
    const std::size_t v = fit.equation_index(excluded);
    if (v == e) throw DataError("granger_exclusion: excluded variable equals the target equation");
    vars.push_back(v);
  }
  if (vars.empty()) throw DataError("granger_exclusion: nothing to exclude");

  std::vector<Eigen::Index> idx;
  for (auto v : vars)
    for (std::size_t l = 1; l <= fit.lag_order; ++l) idx.push_back(static_cast<Eigen::Index>(1 + v * fit.lag_order + (l - 1)));

  const auto& eq = fit.equations[e];
  const auto q = static_cast<Eigen::Index>(idx.size());
  Eigen::VectorXd b(q);
  Eigen::MatrixXd v(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    b(i) = eq.coefficients[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    for (Eigen::Index j = 0; j < q; ++j) v(i, j) = eq.covariance(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  GrangerResult r;
  r.equation = std::string(target);
  r.excluded = std::string(excluded);
  r.chi2 = std::max(0.0, b.dot(v.ldlt().solve(b)));
  r.df = idx.size();
  r.p_value = tail_probability(DistSpec::chi_square(static_cast<double>(r.df)), r.chi2);
  return r;
}

}  // namespace c3i
