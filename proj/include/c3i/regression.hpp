#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c3i/breaks.hpp"
#include "c3i/error.hpp"
#include "c3i/ols.hpp"
#include "c3i/series.hpp"

namespace c3i {

inline constexpr const char* kInterceptLabel = "const";
inline constexpr const char* kDummyLabel = "dum";
inline constexpr const char* kCciLagLabel = "CCI_L1";

[[nodiscard]] inline std::string interaction_label(const std::string& term) { return "du_" + term; }
[[nodiscard]] inline std::string lag1_label(const std::string& term) { return term + "_L1"; }

/// Regression of CCI_t on the dummy-interacted design.
struct TransitionalDesign {
  std::vector<double> y;
  Eigen::MatrixXd x;
  std::vector<std::string> labels;
  std::vector<MonthIndex> months;
  std::vector<double> cci_prev;
  BreakDesign brk;

  [[nodiscard]] std::size_t rows() const { return y.size(); }

  [[nodiscard]] std::size_t column(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw DataError("design has no column '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }

  /// Intercept, base and lag terms: the regressors whose stability the break tests examine.
  [[nodiscard]] std::vector<std::size_t> break_test_columns() const {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const auto& l = labels[j];
      if (l == kDummyLabel || l == kCciLagLabel || l.rfind("du_", 0) == 0) continue;
      cols.push_back(j);
    }
    return cols;
  }
};

/// Builds const, dum, base terms, their lag-1 terms, all D_t interactions and CCI_{t-1}.
///
/// Rows run over the months where every base term, every requested lag and
/// CCI_{t-1} exist, optionally cut at `last`.
[[nodiscard]] inline TransitionalDesign build_transitional_design(std::span<const TimeSeries> base_terms,
                                                                  const std::vector<std::string>& lag_terms,
                                                                  const TimeSeries& cci, const BreakDesign& brk,
                                                                  std::optional<MonthIndex> last = std::nullopt) {
  if (base_terms.empty()) throw DataError("build_transitional_design: no base terms");
  std::vector<std::size_t> lag_index;
  for (const auto& l : lag_terms) {
    auto it = std::find_if(base_terms.begin(), base_terms.end(), [&](const TimeSeries& s) { return s.label() == l; });
    if (it == base_terms.end()) throw DataError("build_transitional_design: lag term '" + l + "' is not a base term");
    lag_index.push_back(static_cast<std::size_t>(it - base_terms.begin()));
  }

  MonthIndex first = cci.start_month().next();
  MonthIndex end = cci.end_month();
  for (std::size_t b = 0; b < base_terms.size(); ++b) {
    const auto& s = base_terms[b];
    const bool lagged = std::find(lag_index.begin(), lag_index.end(), b) != lag_index.end();
    first = std::max(first, lagged ? s.start_month().next() : s.start_month());
    end = std::min(end, s.end_month());
  }
  if (last) end = std::min(end, *last);
  if (end < first) {
    std::string ranges = "CCI " + cci.start_month().str() + ".." + cci.end_month().str();
    for (const auto& s : base_terms) ranges += ", " + s.label() + " " + s.start_month().str() + ".." + s.end_month().str();
    throw DataError("build_transitional_design: inputs do not overlap (" + ranges + ")");
  }

  TransitionalDesign d;
  d.brk = brk;
  d.labels = {kInterceptLabel, kDummyLabel};
  for (const auto& s : base_terms) d.labels.push_back(s.label());
  for (auto i : lag_index) d.labels.push_back(lag1_label(base_terms[i].label()));
  for (const auto& s : base_terms) d.labels.push_back(interaction_label(s.label()));
  for (auto i : lag_index) d.labels.push_back(interaction_label(lag1_label(base_terms[i].label())));
  d.labels.push_back(kCciLagLabel);

  const auto n = static_cast<std::size_t>(end.minus(first) + 1);
  const auto k = static_cast<Eigen::Index>(d.labels.size());
  d.x.resize(static_cast<Eigen::Index>(n), k);
  for (std::size_t r = 0; r < n; ++r) {
    const MonthIndex m = first.plus(static_cast<long>(r));
    const auto i = static_cast<Eigen::Index>(r);
    const double dum = brk.dummy_at(m);
    d.months.push_back(m);
    d.y.push_back(*cci.at(m));
    d.cci_prev.push_back(*cci.at(m.plus(-1)));
    Eigen::Index c = 0;
    d.x(i, c++) = 1.0;
    d.x(i, c++) = dum;
    std::vector<double> terms;
    for (const auto& s : base_terms) terms.push_back(*s.at(m));
    for (auto b : lag_index) terms.push_back(*base_terms[b].at(m.plus(-1)));
    for (double v : terms) d.x(i, c++) = v;
    for (double v : terms) d.x(i, c++) = dum * v;
    d.x(i, c++) = d.cci_prev.back();
  }
  return d;
}

struct StepwiseStep {
  std::size_t step = 0;
  std::string dropped;
  double p_value = 0.0;
  std::size_t terms_remaining = 0;
  double r_squared = 0.0;  ///< of the refit after the drop
  double adjusted_r_squared = 0.0;
};

struct StepwiseResult {
  OlsFit fit;
  std::vector<StepwiseStep> trace;
  std::vector<std::size_t> columns;  ///< surviving columns of the input design
  std::vector<std::string> warnings;
};

/// Backward elimination: refit, drop the single least significant term while
/// its p-value exceeds `threshold`. The intercept and `force_keep` terms stay.
[[nodiscard]] inline StepwiseResult stepwise_ols(std::span<const double> y, const Eigen::MatrixXd& x,
                                                 const std::vector<std::string>& labels, double threshold = 0.1,
                                                 const std::set<std::string>& force_keep = {}) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("stepwise_ols: threshold must lie in (0, 1)");
  if (labels.size() != static_cast<std::size_t>(x.cols())) throw DataError("stepwise_ols: label count mismatch");
  StepwiseResult out;
  for (const auto& f : force_keep) {
    if (std::find(labels.begin(), labels.end(), f) == labels.end()) out.warnings.push_back("force_keep term '" + f + "' is not in the design");
  }
  std::vector<std::size_t> cols(labels.size());
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  const bool has_intercept = std::find(labels.begin(), labels.end(), kInterceptLabel) != labels.end();

  for (std::size_t step = 1;; ++step) {
    std::vector<std::string> names;
    for (auto j : cols) names.push_back(labels[j]);
    auto fit = ols_fit(y, select_columns(x, cols), names, has_intercept);
    if (!out.trace.empty()) {
      out.trace.back().r_squared = fit.r_squared;
      out.trace.back().adjusted_r_squared = fit.adjusted_r_squared;
    }
    std::optional<std::size_t> worst;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto& l = names[j];
      if (l == kInterceptLabel || force_keep.count(l) != 0) continue;
      if (fit.p_values[j] > threshold && (!worst || fit.p_values[j] > fit.p_values[*worst])) worst = j;
    }
    if (!worst) {
      out.fit = std::move(fit);
      out.columns = cols;
      return out;
    }
    if (cols.size() == 1) throw NumericalError("stepwise_ols: empty model (every term was dropped)");
    StepwiseStep s;
    s.step = step;
    s.dropped = names[*worst];
    s.p_value = fit.p_values[*worst];
    cols.erase(cols.begin() + static_cast<long>(*worst));
    s.terms_remaining = cols.size();
    out.trace.push_back(s);
  }
}

}  // namespace c3i
