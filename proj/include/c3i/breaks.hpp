#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c3i/distributions.hpp"
#include "c3i/error.hpp"
#include "c3i/ols.hpp"
#include "c3i/series.hpp"

namespace c3i {

/// Single known break. Periods are counted t = 1, 2, ... from `origin`;
/// D_t = 0 for t <= t0 and 1 afterwards.
struct BreakDesign {
  long t0 = 47;
  MonthIndex origin{2006, 1};

  [[nodiscard]] long t_of(MonthIndex month) const { return month.minus(origin) + 1; }
  [[nodiscard]] MonthIndex month_of(long t) const { return origin.plus(t - 1); }
  [[nodiscard]] double dummy(long t) const { return t > t0 ? 1.0 : 0.0; }
  [[nodiscard]] double dummy_at(MonthIndex month) const { return dummy(t_of(month)); }
  /// Last month of the first regime.
  [[nodiscard]] MonthIndex last_pre_month() const { return month_of(t0); }

  [[nodiscard]] std::vector<double> dummies(std::span<const MonthIndex> months) const {
    std::vector<double> d;
    d.reserve(months.size());
    for (auto m : months) d.push_back(dummy_at(m));
    return d;
  }
};

struct BreakTestResult {
  double chow_f = 0.0;
  std::size_t chow_df1 = 0;  ///< k
  std::size_t chow_df2 = 0;  ///< n - 2k
  double wald = 0.0;
  double lr = 0.0;
  std::size_t df_chi = 0;
  double chow_p = 1.0;
  double wald_p = 1.0;
  double lr_p = 1.0;
  std::size_t n = 0;
  std::size_t n_pre = 0;
  double ssr_restricted = 0.0;
  double ssr_unrestricted = 0.0;
};

/// Statistics from the pooled and split-sample residual sums.
[[nodiscard]] inline BreakTestResult break_statistics(double ssr_restricted, double ssr_unrestricted, std::size_t n,
                                                      std::size_t k) {
  if (n <= 2 * k) throw DataError("break_statistics: n = " + std::to_string(n) + " leaves no residual df for k = " + std::to_string(k));
  if (!(ssr_unrestricted > 0.0)) throw NumericalError("break_statistics: split-sample fits are exact (SSR = 0)");
  BreakTestResult r;
  r.n = n;
  r.ssr_restricted = ssr_restricted;
  r.ssr_unrestricted = ssr_unrestricted;
  const double diff = std::max(0.0, ssr_restricted - ssr_unrestricted);
  const double nn = static_cast<double>(n);
  r.chow_df1 = k;
  r.chow_df2 = n - 2 * k;
  r.df_chi = k;
  r.chow_f = (diff / static_cast<double>(k)) / (ssr_unrestricted / static_cast<double>(r.chow_df2));
  r.wald = nn * diff / ssr_unrestricted;
  r.lr = nn * std::log1p(diff / ssr_unrestricted);
  r.chow_p = tail_probability(DistSpec::f(static_cast<double>(r.chow_df1), static_cast<double>(r.chow_df2)), r.chow_f);
  r.wald_p = tail_probability(DistSpec::chi_square(static_cast<double>(k)), r.wald);
  r.lr_p = tail_probability(DistSpec::chi_square(static_cast<double>(k)), r.lr);
  return r;
}

/// Chow, Wald and LR tests for a break after the first `n_pre` rows.
[[nodiscard]] inline BreakTestResult structural_break_tests(std::span<const double> y, const Eigen::MatrixXd& x,
                                                            std::size_t n_pre) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<std::size_t>(x.cols());
  if (y.size() != n) throw DataError("structural_break_tests: y and X differ in length");
  if (n_pre <= k || n - n_pre <= k) {
    throw DataError("structural_break_tests: sub-samples of " + std::to_string(n_pre) + " and " + std::to_string(n - n_pre) +
                    " rows are too small for " + std::to_string(k) + " regressors");
  }
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < k; ++j) labels.push_back("x" + std::to_string(j));
  const auto pre = static_cast<Eigen::Index>(n_pre);
  const auto post = static_cast<Eigen::Index>(n - n_pre);
  const double ssr_r = ols_fit(y, x, labels, false).residual_sum_sq;
  const double ssr_1 = ols_fit(y.first(n_pre), x.topRows(pre), labels, false).residual_sum_sq;
  const double ssr_2 = ols_fit(y.subspan(n_pre), x.bottomRows(post), labels, false).residual_sum_sq;
  auto r = break_statistics(ssr_r, ssr_1 + ssr_2, n, k);
  r.n_pre = n_pre;
  return r;
}

/// Same test with the split taken from a break design and the row months.
[[nodiscard]] inline BreakTestResult structural_break_tests(std::span<const double> y, const Eigen::MatrixXd& x,
                                                            std::span<const MonthIndex> months, const BreakDesign& brk) {
  if (months.size() != static_cast<std::size_t>(x.rows())) throw DataError("structural_break_tests: month index length mismatch");
  std::size_t n_pre = 0;
  for (std::size_t i = 0; i < months.size(); ++i) {
    if (brk.dummy_at(months[i]) == 0.0) {
      if (n_pre != i) throw DataError("structural_break_tests: rows are not in time order");
      ++n_pre;
    }
  }
  return structural_break_tests(y, x, n_pre);
}

struct BreakSearch {
  long t0 = 0;
  BreakTestResult best;
  std::vector<std::pair<long, double>> chow_path;  ///< (t0, F) for every candidate
};

/// Picks t0 maximizing the Chow F over candidates leaving at least `trim`
/// of the rows (and more than k) in each regime.
[[nodiscard]] inline BreakSearch search_break(std::span<const double> y, const Eigen::MatrixXd& x,
                                              std::span<const MonthIndex> months, MonthIndex origin, double trim = 0.15) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<std::size_t>(x.cols());
  const auto min_rows = std::max(k + 1, static_cast<std::size_t>(std::ceil(trim * static_cast<double>(n))));
  if (n < 2 * min_rows) throw DataError("search_break: sample of " + std::to_string(n) + " rows is too short to search");
  BreakSearch out;
  bool found = false;
  for (std::size_t n_pre = min_rows; n_pre + min_rows <= n; ++n_pre) {
    auto r = structural_break_tests(y, x, n_pre);
    const long t0 = months[n_pre - 1].minus(origin) + 1;
    out.chow_path.emplace_back(t0, r.chow_f);
    if (!found || r.chow_f > out.best.chow_f) {
      found = true;
      out.best = r;
      out.t0 = t0;
    }
  }
  return out;
}

}  // namespace c3i
