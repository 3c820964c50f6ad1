#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "c3i/error.hpp"

namespace c3i {

/// Calendar month. Ordered chronologically.
struct MonthIndex {
  int year = 1970;
  int month = 1;  // 1..12

  friend constexpr auto operator<=>(const MonthIndex&, const MonthIndex&) = default;

  /// Months since year 0, January.
  [[nodiscard]] constexpr long ordinal() const { return static_cast<long>(year) * 12 + (month - 1); }

  [[nodiscard]] static constexpr MonthIndex from_ordinal(long ord) {
    long y = ord >= 0 ? ord / 12 : -((-ord + 11) / 12);
    return MonthIndex{static_cast<int>(y), static_cast<int>(ord - y * 12) + 1};
  }

  [[nodiscard]] constexpr MonthIndex plus(long months) const { return from_ordinal(ordinal() + months); }
  [[nodiscard]] constexpr MonthIndex next() const { return plus(1); }

  /// Signed number of months from `other` to this month.
  [[nodiscard]] constexpr long minus(const MonthIndex& other) const { return ordinal() - other.ordinal(); }

  [[nodiscard]] static MonthIndex of(std::chrono::year_month_day ymd) {
    return MonthIndex{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month()))};
  }

  [[nodiscard]] std::string str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
  }

  /// Parses "YYYY-MM".
  [[nodiscard]] static MonthIndex parse(std::string_view text) {
    int y = 0, m = 0;
    char tail = 0;
    std::string s(text);
    if (s.size() != 7 || std::sscanf(s.c_str(), "%4d-%2d%c", &y, &m, &tail) != 2 || m < 1 || m > 12) {
      throw DataError("invalid month '" + s + "', expected YYYY-MM");
    }
    return MonthIndex{y, m};
  }
};

/// Parses an ISO "YYYY-MM-DD" date.
[[nodiscard]] inline std::chrono::sys_days parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  std::string s(text);
  if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw DataError("invalid date '" + s + "', expected YYYY-MM-DD");
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + s + "'");
  return std::chrono::sys_days{ymd};
}

[[nodiscard]] inline std::string format_date(std::chrono::sys_days day) {
  std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

enum class Frequency { weekly, monthly };

/// Immutable, regularly spaced series of finite values.
///
/// Weekly series are keyed by the start date of their first week; monthly
/// series by their first month. Consecutive values are exactly one period
/// apart, so lagging or differencing simply moves the start forward.
class TimeSeries {
 public:
  [[nodiscard]] static TimeSeries monthly(std::string label, MonthIndex start, std::vector<double> values) {
    return TimeSeries(std::move(label), Frequency::monthly, start, {}, std::move(values));
  }

  [[nodiscard]] static TimeSeries weekly(std::string label, std::chrono::sys_days first_week_start,
                                         std::vector<double> values) {
    return TimeSeries(std::move(label), Frequency::weekly, MonthIndex::of(std::chrono::year_month_day{first_week_start}),
                      first_week_start, std::move(values));
  }

  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] Frequency frequency() const { return frequency_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  /// First month (monthly series only).
  [[nodiscard]] MonthIndex start_month() const {
    require(Frequency::monthly);
    return start_month_;
  }
  [[nodiscard]] MonthIndex end_month() const { return start_month().plus(static_cast<long>(size()) - 1); }
  [[nodiscard]] MonthIndex month_at(std::size_t i) const { return start_month().plus(static_cast<long>(i)); }

  /// Start date of the first week (weekly series only).
  [[nodiscard]] std::chrono::sys_days start_day() const {
    require(Frequency::weekly);
    return start_day_;
  }
  [[nodiscard]] std::chrono::sys_days week_start_at(std::size_t i) const {
    return start_day() + std::chrono::days{7 * static_cast<long>(i)};
  }

  /// Copy of this series with the first `periods` observations removed.
  [[nodiscard]] TimeSeries drop_front(std::size_t periods, std::vector<double> values) const {
    if (frequency_ == Frequency::monthly) {
      return monthly(label_, start_month_.plus(static_cast<long>(periods)), std::move(values));
    }
    return weekly(label_, start_day_ + std::chrono::days{7 * static_cast<long>(periods)}, std::move(values));
  }

  [[nodiscard]] TimeSeries relabel(std::string label) const {
    TimeSeries out = *this;
    out.label_ = std::move(label);
    return out;
  }

  /// Value at `month`, if covered.
  [[nodiscard]] std::optional<double> at(MonthIndex month) const {
    long offset = month.minus(start_month());
    if (offset < 0 || offset >= static_cast<long>(size())) return std::nullopt;
    return values_[static_cast<std::size_t>(offset)];
  }

 private:
  TimeSeries(std::string label, Frequency frequency, MonthIndex start_month, std::chrono::sys_days start_day,
             std::vector<double> values)
      : label_(std::move(label)),
        frequency_(frequency),
        start_month_(start_month),
        start_day_(start_day),
        values_(std::move(values)) {
    if (values_.empty()) throw DataError("series '" + label_ + "' is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DataError("series '" + label_ + "' has a non-finite value at position " + std::to_string(i));
      }
    }
  }

  void require(Frequency f) const {
    if (frequency_ != f) {
      throw DataError("series '" + label_ + "' is " + (frequency_ == Frequency::weekly ? "weekly" : "monthly") +
                      ", operation needs " + (f == Frequency::weekly ? "weekly" : "monthly"));
    }
  }

  std::string label_;
  Frequency frequency_;
  MonthIndex start_month_;
  std::chrono::sys_days start_day_{};
  std::vector<double> values_;
};

/// Month-aligned collection of named columns sharing one contiguous index.
class Panel {
 public:
  Panel(MonthIndex start, std::vector<std::string> labels, std::vector<std::vector<double>> columns)
      : start_(start), labels_(std::move(labels)), columns_(std::move(columns)) {
    if (labels_.size() != columns_.size()) throw DataError("panel: label count differs from column count");
    if (columns_.empty()) throw DataError("panel has no columns");
    std::set<std::string> seen;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (!seen.insert(labels_[j]).second) throw DataError("panel: duplicate column label '" + labels_[j] + "'");
      if (columns_[j].size() != columns_[0].size()) {
        throw DataError("panel: column '" + labels_[j] + "' has a different length");
      }
      for (double v : columns_[j]) {
        if (!std::isfinite(v)) throw DataError("panel: column '" + labels_[j] + "' has a non-finite value");
      }
    }
    if (columns_[0].empty()) throw DataError("panel has no rows");
  }

  [[nodiscard]] std::size_t rows() const { return columns_[0].size(); }
  [[nodiscard]] std::size_t cols() const { return columns_.size(); }
  [[nodiscard]] MonthIndex start() const { return start_; }
  [[nodiscard]] MonthIndex end() const { return month_at(rows() - 1); }
  [[nodiscard]] MonthIndex month_at(std::size_t t) const { return start_.plus(static_cast<long>(t)); }
  [[nodiscard]] const std::vector<std::string>& labels() const { return labels_; }
  [[nodiscard]] std::span<const double> column(std::size_t j) const { return columns_[j]; }
  [[nodiscard]] double value(std::size_t t, std::size_t j) const { return columns_[j][t]; }

  [[nodiscard]] std::vector<MonthIndex> index() const {
    std::vector<MonthIndex> out;
    out.reserve(rows());
    for (std::size_t t = 0; t < rows(); ++t) out.push_back(month_at(t));
    return out;
  }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  [[nodiscard]] std::span<const double> column(std::string_view label) const {
    auto j = find(label);
    if (!j) throw DataError("panel has no column '" + std::string(label) + "'");
    return columns_[*j];
  }

  [[nodiscard]] TimeSeries series(std::size_t j) const { return TimeSeries::monthly(labels_[j], start_, columns_[j]); }

  [[nodiscard]] std::vector<double> row(std::size_t t) const {
    std::vector<double> out(cols());
    for (std::size_t j = 0; j < cols(); ++j) out[j] = columns_[j][t];
    return out;
  }

  /// Row position of `month`, if covered.
  [[nodiscard]] std::optional<std::size_t> position(MonthIndex month) const {
    long offset = month.minus(start_);
    if (offset < 0 || offset >= static_cast<long>(rows())) return std::nullopt;
    return static_cast<std::size_t>(offset);
  }

  /// Rows whose month lies in [first, last].
  [[nodiscard]] Panel slice(MonthIndex first, MonthIndex last) const {
    auto a = position(first), b = position(last);
    if (!a || !b || *a > *b) throw DataError("panel slice " + first.str() + ".." + last.str() + " is out of range");
    std::vector<std::vector<double>> cols_out;
    for (const auto& c : columns_) cols_out.emplace_back(c.begin() + static_cast<long>(*a), c.begin() + static_cast<long>(*b) + 1);
    return Panel(first, labels_, std::move(cols_out));
  }

  [[nodiscard]] Panel select(const std::vector<std::string>& labels) const {
    std::vector<std::vector<double>> cols_out;
    for (const auto& l : labels) {
      auto c = column(l);
      cols_out.emplace_back(c.begin(), c.end());
    }
    return Panel(start_, labels, std::move(cols_out));
  }

 private:
  MonthIndex start_;
  std::vector<std::string> labels_;
  std::vector<std::vector<double>> columns_;
};

enum class WeekAssignment {
  by_last_day,   ///< week belongs to the month containing its final day
  by_first_day,  ///< week belongs to the month containing its start date
};

namespace detail {

inline MonthIndex week_month(std::chrono::sys_days week_start, WeekAssignment rule) {
  auto day = rule == WeekAssignment::by_last_day ? week_start + std::chrono::days{6} : week_start;
  return MonthIndex::of(std::chrono::year_month_day{day});
}

}  // namespace detail

/// Number of weekly observations that fall in each covered month.
[[nodiscard]] inline std::map<MonthIndex, std::size_t> weeks_per_month(
    const TimeSeries& weekly, WeekAssignment rule = WeekAssignment::by_last_day) {
  if (weekly.frequency() != Frequency::weekly) throw DataError("weeks_per_month: series '" + weekly.label() + "' is not weekly");
  std::map<MonthIndex, std::size_t> counts;
  for (std::size_t i = 0; i < weekly.size(); ++i) ++counts[detail::week_month(weekly.week_start_at(i), rule)];
  return counts;
}

/// Averages the weeks assigned to each month into a monthly series.
[[nodiscard]] inline TimeSeries resample_weekly_to_monthly(const TimeSeries& weekly,
                                                          WeekAssignment rule = WeekAssignment::by_last_day) {
  if (weekly.frequency() != Frequency::weekly) {
    throw DataError("resample: series '" + weekly.label() + "' is not weekly");
  }
  if (weekly.size() < 4) throw DataError("resample: series '" + weekly.label() + "' has fewer than 4 weeks");

  std::map<MonthIndex, std::pair<double, std::size_t>> buckets;
  for (std::size_t i = 0; i < weekly.size(); ++i) {
    auto& b = buckets[detail::week_month(weekly.week_start_at(i), rule)];
    b.first += weekly[i];
    ++b.second;
  }
  const MonthIndex first = buckets.begin()->first;
  const MonthIndex last = buckets.rbegin()->first;
  std::vector<double> out;
  for (MonthIndex m = first; m <= last; m = m.next()) {
    auto it = buckets.find(m);
    if (it == buckets.end()) throw DataError("resample: month " + m.str() + " of '" + weekly.label() + "' has no weeks");
    out.push_back(it->second.first / static_cast<double>(it->second.second));
  }
  return TimeSeries::monthly(weekly.label(), first, std::move(out));
}

/// d-th order difference; the result starts d periods later.
[[nodiscard]] inline TimeSeries difference(const TimeSeries& series, std::size_t d) {
  if (d >= series.size()) {
    throw DataError("difference: order " + std::to_string(d) + " needs more than " + std::to_string(series.size()) +
                    " observations");
  }
  std::vector<double> v(series.values().begin(), series.values().end());
  for (std::size_t pass = 0; pass < d; ++pass) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
    v.pop_back();
  }
  return series.drop_front(d, std::move(v));
}

/// Shifts the series so that the output at period t is the input at t-k.
/// The first k periods have no lagged value and are simply not covered.
[[nodiscard]] inline TimeSeries lag(const TimeSeries& series, std::size_t k) {
  if (k == 0) throw DataError("lag: order must be positive");
  if (k >= series.size()) {
    throw DataError("lag: order " + std::to_string(k) + " needs more than " + std::to_string(series.size()) +
                    " observations");
  }
  std::vector<double> v(series.values().begin(), series.values().end() - static_cast<long>(k));
  return series.drop_front(k, std::move(v));
}

/// Restricts monthly series to their common month range.
[[nodiscard]] inline Panel align(std::span<const TimeSeries> columns) {
  if (columns.empty()) throw DataError("align: no series given");
  MonthIndex first = columns[0].start_month();
  MonthIndex last = columns[0].end_month();
  std::string ranges;
  for (const auto& s : columns) {
    if (s.frequency() != Frequency::monthly) throw DataError("align: series '" + s.label() + "' is not monthly");
    first = std::max(first, s.start_month());
    last = std::min(last, s.end_month());
    ranges += " " + s.label() + "[" + s.start_month().str() + ".." + s.end_month().str() + "]";
  }
  if (first > last) throw DataError("align: series have no common months:" + ranges);
  std::vector<std::string> labels;
  std::vector<std::vector<double>> cols;
  for (const auto& s : columns) {
    labels.push_back(s.label());
    auto offset = static_cast<std::size_t>(first.minus(s.start_month()));
    auto n = static_cast<std::size_t>(last.minus(first)) + 1;
    cols.emplace_back(s.values().begin() + static_cast<long>(offset),
                      s.values().begin() + static_cast<long>(offset + n));
  }
  return Panel(first, std::move(labels), std::move(cols));
}

[[nodiscard]] inline Panel align(std::initializer_list<TimeSeries> columns) {
  std::vector<TimeSeries> v(columns);
  return align(std::span<const TimeSeries>(v));
}

[[nodiscard]] inline double sample_mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation with the n-1 denominator.
[[nodiscard]] inline double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

struct Standardized {
  Panel panel;
  std::vector<double> means;
  std::vector<double> sds;
};

[[nodiscard]] inline Standardized standardize(const Panel& panel) {
  if (panel.rows() < 2) throw DataError("standardize: need at least 2 rows");
  std::vector<double> means, sds;
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < panel.cols(); ++j) {
    auto c = panel.column(j);
    const double m = sample_mean(c);
    const double s = sample_sd(c);
    if (!(s > 0.0) || s < 1e-12 * std::max(1.0, std::abs(m))) {
      throw DataError("standardize: column '" + panel.labels()[j] + "' has zero variance");
    }
    std::vector<double> z(c.size());
    for (std::size_t t = 0; t < c.size(); ++t) z[t] = (c[t] - m) / s;
    means.push_back(m);
    sds.push_back(s);
    cols.push_back(std::move(z));
  }
  return Standardized{Panel(panel.start(), panel.labels(), std::move(cols)), std::move(means), std::move(sds)};
}

[[nodiscard]] inline Panel unstandardize(const Panel& z, std::span<const double> means, std::span<const double> sds) {
  if (means.size() != z.cols() || sds.size() != z.cols()) throw DataError("unstandardize: parameter size mismatch");
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < z.cols(); ++j) {
    auto c = z.column(j);
    std::vector<double> x(c.size());
    for (std::size_t t = 0; t < c.size(); ++t) x[t] = c[t] * sds[j] + means[j];
    cols.push_back(std::move(x));
  }
  return Panel(z.start(), z.labels(), std::move(cols));
}

}  // namespace c3i
