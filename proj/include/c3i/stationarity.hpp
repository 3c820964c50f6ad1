#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c3i/error.hpp"
#include "c3i/mackinnon.hpp"
#include "c3i/ols.hpp"
#include "c3i/series.hpp"

namespace c3i {

struct AdfSpec {
  Deterministic deterministic = Deterministic::constant;
  /// Fixed augmentation lag; empty selects by AIC over 0..max_lag.
  std::optional<std::size_t> lag_order;
  /// Upper bound for AIC search; empty uses floor(12 (T/100)^(1/4)).
  std::optional<std::size_t> max_lag;
  /// Number of I(1) variables behind the tested series (1 for a plain
  /// unit-root test). Selects the critical-value surface.
  std::size_t n_variables = 1;
};

struct AdfResult {
  double statistic = 0.0;  ///< t-ratio of the lagged level, Z(t)
  double p_value = 1.0;
  CriticalValues critical_values;
  std::size_t lags_used = 0;
  std::size_t nobs = 0;  ///< observations in the test regression
  Deterministic deterministic = Deterministic::constant;
  /// Smallest tabulated level (0.01, 0.05, 0.10) at which the unit root is rejected.
  std::optional<double> reject_unit_root_at;
};

namespace detail {

inline std::size_t trend_terms(Deterministic d) {
  switch (d) {
    case Deterministic::none: return 0;
    case Deterministic::constant: return 1;
    case Deterministic::constant_trend: return 2;
  }
  return 0;
}

/// ADF regression using rows t = first..T-1 of the level series (0-based).
inline OlsFit adf_regression(std::span<const double> y, std::size_t lags, std::size_t first, Deterministic det) {
  const std::size_t t_end = y.size();
  const std::size_t nobs = t_end - first;
  const std::size_t k = 1 + lags + trend_terms(det);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(nobs), static_cast<Eigen::Index>(k));
  std::vector<double> dy(nobs);
  std::vector<std::string> labels{"L1.level"};
  for (std::size_t j = 1; j <= lags; ++j) labels.push_back("L" + std::to_string(j) + ".diff");
  if (det != Deterministic::none) labels.push_back("const");
  if (det == Deterministic::constant_trend) labels.push_back("trend");
  for (std::size_t r = 0; r < nobs; ++r) {
    const std::size_t t = first + r;
    const auto i = static_cast<Eigen::Index>(r);
    dy[r] = y[t] - y[t - 1];
    x(i, 0) = y[t - 1];
    for (std::size_t j = 1; j <= lags; ++j) x(i, static_cast<Eigen::Index>(j)) = y[t - j] - y[t - j - 1];
    Eigen::Index c = static_cast<Eigen::Index>(1 + lags);
    if (det != Deterministic::none) x(i, c++) = 1.0;
    if (det == Deterministic::constant_trend) x(i, c) = static_cast<double>(t + 1);
  }
  return ols_fit(dy, x, std::move(labels), det != Deterministic::none);
}

}  // namespace detail

/// Default AIC search bound floor(12 (T/100)^(1/4)), capped by sample size.
[[nodiscard]] inline std::size_t default_max_lag(std::size_t t, Deterministic det) {
  auto lag = static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(t) / 100.0, 0.25)));
  const long cap = static_cast<long>(t) / 2 - static_cast<long>(detail::trend_terms(det)) - 1;
  const long third = (static_cast<long>(t) - 1) / 3;
  return static_cast<std::size_t>(std::max(0L, std::min({static_cast<long>(lag), cap, third})));
}

/// Augmented Dickey-Fuller test of a unit root in `y`.
[[nodiscard]] inline AdfResult adf_test(std::span<const double> y, const AdfSpec& spec = {}) {
  const std::size_t t = y.size();
  const std::size_t ntrend = detail::trend_terms(spec.deterministic);
  if (t < 6) throw DataError("adf_test: series of length " + std::to_string(t) + " is too short");
  if (sample_sd(y) == 0.0) throw DataError("adf_test: series is constant (zero variance)");

  auto too_short = [&](std::size_t lags) {
    // T - lags - 2 must exceed the number of estimated parameters.
    const std::size_t params = 1 + lags + ntrend;
    return static_cast<long>(t) - static_cast<long>(lags) - 2 <= static_cast<long>(params);
  };

  std::size_t lags = 0;
  if (spec.lag_order) {
    lags = *spec.lag_order;
    if (3 * lags >= t) throw DataError("adf_test: lag order " + std::to_string(lags) + " is not below T/3");
  } else {
    std::size_t max_lag = spec.max_lag ? *spec.max_lag : default_max_lag(t, spec.deterministic);
    if (3 * max_lag >= t) max_lag = (t - 1) / 3;
    while (max_lag > 0 && too_short(max_lag)) --max_lag;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= max_lag; ++p) {
      // Every candidate uses the same estimation sample.
      auto fit = detail::adf_regression(y, p, max_lag + 1, spec.deterministic);
      const double n = static_cast<double>(fit.n);
      const double aic = n * std::log(fit.residual_sum_sq / n) + 2.0 * static_cast<double>(fit.k);
      if (aic < best - 1e-12) {
        best = aic;
        lags = p;
      }
    }
  }
  if (too_short(lags)) {
    throw DataError("adf_test: series of length " + std::to_string(t) + " is too short for " + std::to_string(lags) +
                    " lags");
  }

  auto fit = detail::adf_regression(y, lags, lags + 1, spec.deterministic);
  AdfResult r;
  r.statistic = fit.t_values[0];
  r.lags_used = lags;
  r.nobs = fit.n;
  r.deterministic = spec.deterministic;
  r.critical_values = critical_values(spec.deterministic, spec.n_variables, fit.n);
  r.p_value = mackinnon_p_value(r.statistic, spec.deterministic, spec.n_variables, fit.n);
  for (double level : {0.01, 0.05, 0.10}) {
    if (r.statistic < r.critical_values.at(level)) {
      r.reject_unit_root_at = level;
      break;
    }
  }
  return r;
}

[[nodiscard]] inline AdfResult adf_test(const TimeSeries& series, const AdfSpec& spec = {}) {
  return adf_test(series.values(), spec);
}

enum class Order { I0, I1, I2plus };

[[nodiscard]] inline const char* to_string(Order o) {
  switch (o) {
    case Order::I0: return "I(0)";
    case Order::I1: return "I(1)";
    case Order::I2plus: return "I(2+)";
  }
  return "?";
}

struct IntegrationOrder {
  Order order = Order::I2plus;
  /// Differences needed before the unit root was rejected, if it ever was.
  std::optional<std::size_t> differences;
  std::vector<AdfResult> evidence;  ///< one test per differencing level, starting at the level
};

/// Tests the level and then successive differences until the unit root is
/// rejected at `level` or `max_d` differences have been tested.
[[nodiscard]] inline IntegrationOrder integration_order(const TimeSeries& series, const AdfSpec& spec, double level,
                                                        std::size_t max_d) {
  if (max_d < 1) throw ConfigError("integration_order: max_d must be at least 1");
  IntegrationOrder out;
  for (std::size_t d = 0; d <= max_d; ++d) {
    auto r = adf_test(d == 0 ? series : difference(series, d), spec);
    out.evidence.push_back(r);
    if (r.p_value < level) {
      out.differences = d;
      out.order = d == 0 ? Order::I0 : d == 1 ? Order::I1 : Order::I2plus;
      return out;
    }
  }
  out.order = Order::I2plus;
  return out;
}

enum class ATransformMode {
  pairwise,     ///< A_t = C_t + C_{t-1}
  running_sum,  ///< A_t = sum_{s<=t} C_s
};

[[nodiscard]] inline const char* to_string(ATransformMode m) {
  return m == ATransformMode::pairwise ? "pairwise" : "running_sum";
}

/// Two-term moving sum (default) or running sum of a series.
[[nodiscard]] inline TimeSeries a_transform(const TimeSeries& series, ATransformMode mode = ATransformMode::pairwise) {
  if (series.size() < 2) throw DataError("a_transform: series '" + series.label() + "' needs at least 2 values");
  auto v = series.values();
  if (mode == ATransformMode::running_sum) {
    std::vector<double> out(v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (acc += v[i]);
    return series.drop_front(0, std::move(out));
  }
  std::vector<double> out(v.size() - 1);
  for (std::size_t i = 1; i < v.size(); ++i) out[i - 1] = v[i] + v[i - 1];
  return series.drop_front(1, std::move(out));
}

struct CointegrationResult {
  AdfResult adf;
  bool cointegrated = false;
};

/// Residual-based verdict: cointegrated iff the statistic is below the 1% value.
[[nodiscard]] inline bool cointegration_verdict(double statistic, double critical_value_1pct) {
  return statistic < critical_value_1pct;
}

/// Engle-Granger style check: ADF on the residuals of a levels regression.
///
/// The default spec (constant, one variable) reproduces the conventional
/// Dickey-Fuller table applied to residuals; set `n_variables` to the number
/// of I(1) series in the regression for the stricter residual surface.
[[nodiscard]] inline CointegrationResult engle_granger(std::span<const double> residuals, const AdfSpec& spec = {}) {
  CointegrationResult r;
  r.adf = adf_test(residuals, spec);
  r.cointegrated = cointegration_verdict(r.adf.statistic, r.adf.critical_values.one);
  return r;
}

}  // namespace c3i
