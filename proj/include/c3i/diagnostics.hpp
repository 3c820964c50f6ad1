#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c3i/distributions.hpp"
#include "c3i/error.hpp"
#include "c3i/linalg.hpp"
#include "c3i/ols.hpp"
#include "c3i/series.hpp"

namespace c3i {

struct WhiteResult {
  double chi2 = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::vector<std::string> auxiliary_terms;  ///< regressors of the auxiliary regression, intercept excluded
  bool cross_products = true;                ///< false when only levels and squares fit in the sample
  std::vector<std::string> warnings;
};

namespace detail {

struct AuxColumn {
  std::string label;
  Eigen::VectorXd values;
};

inline bool is_constant(const Eigen::VectorXd& v) { return v.size() == 0 || v.maxCoeff() - v.minCoeff() == 0.0; }

inline bool same_column(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

inline std::vector<AuxColumn> white_candidates(const Eigen::MatrixXd& x, const std::vector<std::string>& labels, bool cross) {
  std::vector<std::size_t> reg;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (!is_constant(x.col(j))) reg.push_back(static_cast<std::size_t>(j));
  std::vector<AuxColumn> cand;
  auto add = [&](std::string label, Eigen::VectorXd v) {
    if (is_constant(v)) return;
    for (const auto& c : cand)
      if (same_column(c.values, v)) return;
    cand.push_back({std::move(label), std::move(v)});
  };
  for (auto j : reg) add(labels[j], x.col(static_cast<Eigen::Index>(j)));
  for (auto j : reg) {
    const auto c = x.col(static_cast<Eigen::Index>(j));
    add(labels[j] + "^2", c.cwiseProduct(c));
  }
  if (cross) {
    for (std::size_t a = 0; a < reg.size(); ++a)
      for (std::size_t b = a + 1; b < reg.size(); ++b)
        add(labels[reg[a]] + "*" + labels[reg[b]],
            x.col(static_cast<Eigen::Index>(reg[a])).cwiseProduct(x.col(static_cast<Eigen::Index>(reg[b]))));
  }
  return cand;
}

}  // namespace detail

/// White's general heteroskedasticity test: n R^2 from regressing squared
/// residuals on the regressors, their squares and cross-products.
[[nodiscard]] inline WhiteResult white_test(const OlsFit& fit, const Eigen::MatrixXd& x) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (fit.residuals.size() != n) throw DataError("white_test: residuals and design differ in length");
  if (fit.term_labels.size() != static_cast<std::size_t>(x.cols())) throw DataError("white_test: design does not match the fit");
  Eigen::VectorXd e2(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) e2(static_cast<Eigen::Index>(i)) = fit.residuals[i] * fit.residuals[i];

  WhiteResult out;
  out.n = n;
  for (bool cross : {true, false}) {
    auto cand = detail::white_candidates(x, fit.term_labels, cross);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cand.size() + 1));
    m.col(0).setOnes();
    for (std::size_t j = 0; j < cand.size(); ++j) m.col(static_cast<Eigen::Index>(j + 1)) = cand[j].values;
    auto keep = independent_columns(m, 1e-6);
    std::vector<std::string> dropped;
    std::vector<std::size_t> aux;
    for (std::size_t j = 1; j < static_cast<std::size_t>(m.cols()); ++j) {
      if (std::find(keep.begin(), keep.end(), j) != keep.end()) {
        aux.push_back(j);
      } else {
        dropped.push_back(cand[j - 1].label);
      }
    }
    if (aux.empty()) throw DataError("white_test: design has no non-constant regressors");
    if (aux.size() + 1 >= n) {
      out.warnings.push_back("auxiliary design with " + std::to_string(aux.size()) + " terms does not fit in " +
                             std::to_string(n) + " observations" + (cross ? "; cross-products omitted" : ""));
      continue;
    }
    std::vector<std::size_t> cols{0};
    cols.insert(cols.end(), aux.begin(), aux.end());
    Eigen::MatrixXd am = select_columns(m, cols);
    if (gram_condition(am) > kMaxGramCondition) {
      out.warnings.push_back(std::string("auxiliary design is ill-conditioned") + (cross ? "; cross-products omitted" : ""));
      continue;
    }
    if (!dropped.empty()) {
      std::string list;
      for (const auto& d : dropped) list += (list.empty() ? "" : ", ") + d;
      out.warnings.push_back("collinear auxiliary terms dropped: " + list);
    }
    std::vector<std::string> names{"const"};
    for (auto j : aux) {
      names.push_back(cand[j - 1].label);
      out.auxiliary_terms.push_back(cand[j - 1].label);
    }
    std::vector<double> yv(e2.data(), e2.data() + n);
    auto aux_fit = ols_fit(yv, am, names, true);
    out.cross_products = cross;
    out.df = aux.size();
    out.chi2 = static_cast<double>(n) * aux_fit.r_squared;
    out.p_value = tail_probability(DistSpec::chi_square(static_cast<double>(out.df)), out.chi2);
    return out;
  }
  throw NumericalError("white_test: no feasible auxiliary regression for " + std::to_string(n) + " observations");
}

struct AcfLag {
  std::size_t lag = 0;
  double acf = 0.0;
  double band = 0.0;  ///< half-width of the 95% band
  bool within = true;
};

struct BartlettResult {
  std::vector<AcfLag> lags;  ///< lag 0..max_lag
  std::size_t breaches = 0;
  bool no_autocorrelation = true;
};

/// Sample autocorrelation r_k = sum (e_t - m)(e_{t-k} - m) / sum (e_t - m)^2.
[[nodiscard]] inline std::vector<double> sample_acf(std::span<const double> e, std::size_t max_lag) {
  const double m = sample_mean(e);
  double c0 = 0.0;
  for (double v : e) c0 += (v - m) * (v - m);
  if (c0 == 0.0) throw DataError("sample_acf: series is constant");
  std::vector<double> r(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double c = 0.0;
    for (std::size_t t = k; t < e.size(); ++t) c += (e[t] - m) * (e[t - k] - m);
    r[k] = c / c0;
  }
  return r;
}

/// Autocorrelations with Bartlett's 95% bands +-1.96 sqrt((1 + 2 sum_{j<k} r_j^2) / T).
/// No autocorrelation is declared when at most 5% of lags 1..max_lag breach.
[[nodiscard]] inline BartlettResult bartlett_acf_check(std::span<const double> residuals, std::size_t max_lag) {
  const std::size_t t = residuals.size();
  if (max_lag < 1) throw ConfigError("bartlett_acf_check: max_lag must be at least 1");
  if (2 * max_lag >= t) {
    throw DataError("bartlett_acf_check: max_lag " + std::to_string(max_lag) + " is not below T/2 = " + std::to_string(t / 2));
  }
  if (sample_sd(residuals) == 0.0) throw DataError("bartlett_acf_check: residuals are constant");
  auto r = sample_acf(residuals, max_lag);
  BartlettResult out;
  out.lags.push_back({0, 1.0, 0.0, true});
  double acc = 0.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    AcfLag l;
    l.lag = k;
    l.acf = r[k];
    l.band = 1.96 * std::sqrt((1.0 + 2.0 * acc) / static_cast<double>(t));
    l.within = std::abs(l.acf) <= l.band;
    if (!l.within) ++out.breaches;
    out.lags.push_back(l);
    acc += r[k] * r[k];
  }
  out.no_autocorrelation = static_cast<double>(out.breaches) <= 0.05 * static_cast<double>(max_lag);
  return out;
}

}  // namespace c3i
