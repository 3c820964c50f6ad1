#include "c3i/series.hpp"

#include <gtest/gtest.h>

#include <array>
#include <map>
#include <random>
#include <utility>

#include "test_util.hpp"

using namespace c3i;

namespace {

// Independent calendar arithmetic: days-in-month table, no std::chrono.
int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

struct Ymd {
  int y, m, d;
};

Ymd add_days(Ymd date, int n) {
  while (n-- > 0) {
    if (++date.d > days_in_month(date.y, date.m)) {
      date.d = 1;
      if (++date.m > 12) {
        date.m = 1;
        ++date.y;
      }
    }
  }
  return date;
}

// Assigns each week to the month of its last day and averages the buckets.
std::map<std::pair<int, int>, double> bucket_oracle(Ymd first_start, const std::vector<double>& values) {
  std::map<std::pair<int, int>, std::pair<double, int>> acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Ymd end = add_days(first_start, static_cast<int>(7 * i + 6));
    auto& b = acc[{end.y, end.m}];
    b.first += values[i];
    ++b.second;
  }
  std::map<std::pair<int, int>, double> out;
  for (auto& [k, v] : acc) out[k] = v.first / v.second;
  return out;
}

TimeSeries monthly(std::vector<double> v, MonthIndex start = {2006, 1}, std::string label = "s") {
  return TimeSeries::monthly(std::move(label), start, std::move(v));
}

}  // namespace

TEST(MonthIndex, SuccessorWrapsYear) {
  EXPECT_EQ((MonthIndex{2009, 12}.next()), (MonthIndex{2010, 1}));
  EXPECT_LT((MonthIndex{2009, 12}), (MonthIndex{2010, 1}));
  EXPECT_EQ((MonthIndex{2006, 1}.plus(46)), (MonthIndex{2009, 11}));
  EXPECT_EQ(MonthIndex::parse("2013-06").str(), "2013-06");
  EXPECT_THROW((void)MonthIndex::parse("2013-13"), DataError);
}

TEST(TimeSeries, RejectsNonFinite) {
  EXPECT_THROW(monthly({1.0, std::nan("")}), DataError);
  EXPECT_THROW(monthly({}), DataError);
}

TEST(Resample, ConstantSeriesStaysConstant) {
  auto w = TimeSeries::weekly("q", parse_date("2006-01-02"), std::vector<double>(52, 5.0));
  auto m = resample_weekly_to_monthly(w);
  for (double v : m.values()) EXPECT_DOUBLE_EQ(v, 5.0);
  EXPECT_EQ(m.start_month(), (MonthIndex{2006, 1}));
}

TEST(Resample, MatchesBucketingOracle) {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  auto m = resample_weekly_to_monthly(TimeSeries::weekly("q", parse_date("2006-01-02"), v));
  auto oracle = bucket_oracle({2006, 1, 2}, v);
  ASSERT_EQ(m.size(), oracle.size());
  std::size_t i = 0;
  for (auto& [ym, mean] : oracle) {
    EXPECT_EQ(m.month_at(i), (MonthIndex{ym.first, ym.second}));
    EXPECT_DOUBLE_EQ(m[i], mean);
    ++i;
  }
  // Frozen from the oracle: weeks ending Jan 8..29 and Feb 5..26.
  EXPECT_DOUBLE_EQ(m[0], 2.5);
  EXPECT_DOUBLE_EQ(m[1], 6.5);
}

TEST(Resample, StraddlingWeekMovesToNextMonth) {
  // Week of 2006-01-30 ends 2006-02-05.
  std::vector<double> v{1, 1, 1, 1, 100};
  auto w = TimeSeries::weekly("q", parse_date("2006-01-02"), v);
  auto m = resample_weekly_to_monthly(w);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m[0], 1.0);
  EXPECT_DOUBLE_EQ(m[1], 100.0);
  EXPECT_EQ(m.month_at(1), (MonthIndex{2006, 2}));
  auto counts = weeks_per_month(w);
  EXPECT_EQ(counts.at({2006, 2}), 1u);
}

TEST(Resample, RandomSeriesAgreesWithOracle) {
  std::mt19937_64 rng(7);
  auto v = c3i::testing::normal_draws(rng, 200);
  auto m = resample_weekly_to_monthly(TimeSeries::weekly("q", parse_date("2007-03-15"), v));
  auto oracle = bucket_oracle({2007, 3, 15}, v);
  ASSERT_EQ(m.size(), oracle.size());
  std::size_t i = 0;
  for (auto& [ym, mean] : oracle) EXPECT_NEAR(m[i++], mean, 1e-12);
}

TEST(Resample, Errors) {
  EXPECT_THROW(resample_weekly_to_monthly(monthly({1, 2, 3, 4, 5})), DataError);
  EXPECT_THROW(resample_weekly_to_monthly(TimeSeries::weekly("q", parse_date("2006-01-02"), {1, 2, 3})), DataError);
}

TEST(Difference, Basics) {
  auto lin = difference(monthly({0, 1, 2, 3, 4}), 1);
  for (double v : lin.values()) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_EQ(lin.start_month(), (MonthIndex{2006, 2}));

  auto s = monthly({1, 4, 9, 16});
  auto id = difference(s, 0);
  EXPECT_EQ(std::vector<double>(id.values().begin(), id.values().end()), (std::vector<double>{1, 4, 9, 16}));

  auto d2 = difference(s, 2);
  EXPECT_EQ(std::vector<double>(d2.values().begin(), d2.values().end()), (std::vector<double>{2, 2}));
  EXPECT_THROW(difference(s, 4), DataError);
}

TEST(Difference, IteratedEqualsHigherOrder) {
  std::mt19937_64 rng(3);
  auto s = monthly(c3i::testing::normal_draws(rng, 40));
  auto a = difference(difference(s, 1), 1);
  auto b = difference(s, 2);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.start_month(), b.start_month());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i], b[i]);
}

TEST(Lag, AlignsToLaterPeriods) {
  auto s = monthly({1, 2, 3});
  auto l = lag(s, 1);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l.start_month(), (MonthIndex{2006, 2}));
  EXPECT_EQ(l.at({2006, 2}), 1.0);
  EXPECT_EQ(l.at({2006, 3}), 2.0);
  EXPECT_FALSE(l.at({2006, 1}).has_value());
  EXPECT_THROW(lag(s, 3), DataError);
}

TEST(Lag, CommutesWithDifference) {
  auto s = monthly({1, 3, 6, 10});
  auto a = difference(lag(s, 1), 1);
  auto b = lag(difference(s, 1), 1);
  // Overlap months: both cover 2006-03..2006-04.
  for (MonthIndex m{2006, 3}; m <= MonthIndex{2006, 4}; m = m.next()) {
    ASSERT_TRUE(a.at(m) && b.at(m));
    EXPECT_DOUBLE_EQ(*a.at(m), *b.at(m));
  }
}

TEST(Align, IntersectsRanges) {
  auto a = monthly(std::vector<double>(90, 1.0), {2006, 1}, "a");
  auto b = monthly(std::vector<double>(94, 2.0), {2006, 3}, "b");
  auto p = align({a, b});
  EXPECT_EQ(p.start(), (MonthIndex{2006, 3}));
  EXPECT_EQ(p.end(), (MonthIndex{2013, 6}));
  EXPECT_EQ(p.labels(), (std::vector<std::string>{"a", "b"}));

  auto same = align({a, a.relabel("a2")});
  EXPECT_EQ(same.rows(), 90u);

  auto c = monthly({1, 2}, {2015, 1}, "c");
  EXPECT_THROW(align({a, c}), DataError);
}

TEST(Align, Idempotent) {
  auto a = monthly({1, 2, 3, 4, 5}, {2006, 1}, "a");
  auto b = monthly({5, 6, 7, 8}, {2006, 3}, "b");
  auto p = align({a, b});
  std::vector<TimeSeries> again{p.series(0), p.series(1)};
  auto q = align(std::span<const TimeSeries>(again));
  EXPECT_EQ(q.start(), p.start());
  ASSERT_EQ(q.rows(), p.rows());
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t t = 0; t < p.rows(); ++t) EXPECT_EQ(q.value(t, j), p.value(t, j));
}

TEST(Standardize, MomentsAndRoundTrip) {
  Panel p({2006, 1}, {"a", "b"}, {{1, 2, 3}, {10, -4, 7.5}});
  auto s = standardize(p);
  EXPECT_NEAR(s.means[0], 2.0, 1e-15);
  EXPECT_NEAR(s.sds[0], 1.0, 1e-15);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LT(std::abs(sample_mean(s.panel.column(j))), 1e-10);
    EXPECT_LT(std::abs(sample_sd(s.panel.column(j)) - 1.0), 1e-10);
  }
  auto back = unstandardize(s.panel, s.means, s.sds);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(back.value(t, j), p.value(t, j), 1e-12);
}

TEST(Standardize, ZeroVarianceColumnNamed) {
  Panel p({2006, 1}, {"ok", "flat"}, {{1, 2, 3}, {4, 4, 4}});
  try {
    (void)standardize(p);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("flat"), std::string::npos);
  }
}

TEST(Standardize, RandomPanelsHaveUnitMoments) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> cols;
    for (int j = 0; j < 4; ++j) {
      auto v = c3i::testing::normal_draws(rng, 30, 1.0 + j);
      for (auto& x : v) x += 50.0 * j;
      cols.push_back(v);
    }
    Panel p({2006, 1}, {"a", "b", "c", "d"}, cols);
    auto s = standardize(p);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_LT(std::abs(sample_mean(s.panel.column(j))), 1e-10);
      EXPECT_LT(std::abs(sample_sd(s.panel.column(j)) - 1.0), 1e-10);
    }
  }
}
