#include "c3i/stationarity.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace c3i;
using c3i::testing::cumsum;
using c3i::testing::normal_draws;

namespace {

TimeSeries monthly(std::vector<double> v) { return TimeSeries::monthly("s", {2000, 1}, std::move(v)); }

std::vector<double> ar1(std::mt19937_64& rng, std::size_t n, double phi) {
  auto e = normal_draws(rng, n);
  std::vector<double> y(n);
  y[0] = e[0];
  for (std::size_t t = 1; t < n; ++t) y[t] = phi * y[t - 1] + e[t];
  return y;
}

}  // namespace

TEST(Adf, WhiteNoiseRejects) {
  std::mt19937_64 rng(42);
  auto e = normal_draws(rng, 200);
  auto r = adf_test(e);
  EXPECT_LT(r.statistic, r.critical_values.one);
  ASSERT_TRUE(r.reject_unit_root_at.has_value());
  EXPECT_EQ(*r.reject_unit_root_at, 0.01);
  EXPECT_LT(r.p_value, 0.01);
}

TEST(Adf, RandomWalkDoesNotReject) {
  std::mt19937_64 rng(42);
  auto rw = cumsum(normal_draws(rng, 200));
  auto r = adf_test(rw);
  EXPECT_GT(r.statistic, r.critical_values.five);
  EXPECT_GT(r.p_value, 0.05);
}

TEST(Adf, ResidualCriticalValueNearReported) {
  // 1% value reported next to Z(t) = -8.321 for the 89-month regression sample.
  auto cv = critical_values(Deterministic::constant, 1, 89);
  EXPECT_NEAR(cv.one, -3.527, 0.05);
  EXPECT_LT(cv.one, cv.five);
  EXPECT_LT(cv.five, cv.ten);
}

TEST(Adf, AsymptoticSurfaceAnchors) {
  EXPECT_NEAR(asymptotic_p_value(-2.86154, Deterministic::constant, 1), 0.05, 0.001);
  EXPECT_NEAR(asymptotic_p_value(-3.43035, Deterministic::constant, 1), 0.01, 0.001);
  EXPECT_NEAR(asymptotic_p_value(-1.94100, Deterministic::none, 1), 0.05, 0.001);
  EXPECT_NEAR(asymptotic_p_value(-3.41049, Deterministic::constant_trend, 1), 0.05, 0.001);
  EXPECT_EQ(asymptotic_p_value(-30.0, Deterministic::constant, 1), 0.0);
  EXPECT_EQ(asymptotic_p_value(5.0, Deterministic::constant, 1), 1.0);
}

TEST(Adf, PValueConsistentWithCriticalValues) {
  for (auto det : {Deterministic::none, Deterministic::constant, Deterministic::constant_trend}) {
    const std::size_t max_vars = det == Deterministic::none ? 1 : 3;
    for (std::size_t nv = 1; nv <= max_vars; ++nv) {
      for (std::size_t t : {25u, 50u, 89u, 100u, 500u}) {
        auto cv = critical_values(det, nv, t);
        for (double level : {0.01, 0.05, 0.10}) {
          EXPECT_NEAR(mackinnon_p_value(cv.at(level), det, nv, t), level, 0.002)
              << to_string(det) << " N=" << nv << " T=" << t << " L=" << level;
        }
      }
    }
  }
}

TEST(Adf, PValueMonotone) {
  double prev = 0.0;
  for (double tau = -10.0; tau < 3.0; tau += 0.01) {
    const double p = mackinnon_p_value(tau, Deterministic::constant, 1, 100);
    EXPECT_GE(p, prev - 1e-12);
    prev = p;
  }
}

TEST(Adf, AffineInvariance) {
  std::mt19937_64 rng(3);
  auto y = ar1(rng, 120, 0.8);
  AdfSpec spec;
  spec.lag_order = 2;
  auto a = adf_test(y, spec);
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = -3.5 * y[i] + 42.0;
  auto b = adf_test(z, spec);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-8);
  // Auto lag selection is also invariant.
  EXPECT_EQ(adf_test(y).lags_used, adf_test(z).lags_used);
}

TEST(Adf, LagSelectionBounds) {
  std::mt19937_64 rng(4);
  auto y = ar1(rng, 90, 0.5);
  auto r = adf_test(y);
  EXPECT_LE(r.lags_used, default_max_lag(90, Deterministic::constant));
  EXPECT_LT(3 * r.lags_used, 90u);
  EXPECT_EQ(r.nobs, 90 - 1 - r.lags_used);
  AdfSpec bad;
  bad.lag_order = 30;
  EXPECT_THROW((void)adf_test(y, bad), DataError);
}

TEST(Adf, Errors) {
  EXPECT_THROW((void)adf_test(std::vector<double>{1, 2, 3, 4}), DataError);
  EXPECT_THROW((void)adf_test(std::vector<double>(50, 3.0)), DataError);
  AdfSpec spec;
  spec.deterministic = Deterministic::none;
  spec.n_variables = 2;
  std::mt19937_64 rng(1);
  EXPECT_THROW((void)adf_test(normal_draws(rng, 50), spec), ConfigError);
}

TEST(IntegrationOrder, StationaryAr1) {
  std::mt19937_64 rng(42);
  auto r = integration_order(monthly(ar1(rng, 200, 0.3)), {}, 0.01, 2);
  EXPECT_EQ(r.order, Order::I0);
  EXPECT_EQ(r.differences, 0u);
  EXPECT_EQ(r.evidence.size(), 1u);
}

TEST(IntegrationOrder, RandomWalk) {
  std::mt19937_64 rng(42);
  auto s = monthly(cumsum(normal_draws(rng, 200)));
  auto r = integration_order(s, {}, 0.01, 2);
  EXPECT_EQ(r.order, Order::I1);
  ASSERT_EQ(r.evidence.size(), 2u);
  EXPECT_LT(r.evidence[1].p_value, 0.01);
  // The differenced series is I(0) under the same spec.
  EXPECT_EQ(integration_order(difference(s, 1), {}, 0.01, 2).order, Order::I0);
}

TEST(IntegrationOrder, TwiceIntegrated) {
  std::mt19937_64 rng(42);
  auto s = monthly(cumsum(cumsum(normal_draws(rng, 200))));
  auto one = integration_order(s, {}, 0.01, 1);
  EXPECT_EQ(one.order, Order::I2plus);
  EXPECT_FALSE(one.differences.has_value());
  auto two = integration_order(s, {}, 0.01, 2);
  EXPECT_EQ(two.order, Order::I2plus);
  EXPECT_EQ(two.differences, 2u);
  EXPECT_THROW(integration_order(s, {}, 0.01, 0), ConfigError);
}

TEST(ATransform, Examples) {
  auto a = a_transform(monthly({1, 2, 3}));
  EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()), (std::vector<double>{3, 5}));
  EXPECT_EQ(a.start_month(), (MonthIndex{2000, 2}));
  auto flat = a_transform(monthly({4, 4, 4, 4}));
  for (double v : flat.values()) EXPECT_EQ(v, 8.0);
  auto alternating = a_transform(monthly({1, -1, 1, -1, 1}));
  for (double v : alternating.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(a_transform(monthly({1})), DataError);
  auto r = a_transform(monthly({1, 2, 3}), ATransformMode::running_sum);
  EXPECT_EQ(std::vector<double>(r.values().begin(), r.values().end()), (std::vector<double>{1, 3, 6}));
}

TEST(ATransform, Linear) {
  std::mt19937_64 rng(6);
  auto x = normal_draws(rng, 30), y = normal_draws(rng, 30);
  std::vector<double> combo(30);
  for (std::size_t i = 0; i < 30; ++i) combo[i] = 2.5 * x[i] - y[i];
  auto ax = a_transform(monthly(x)), ay = a_transform(monthly(y)), ac = a_transform(monthly(combo));
  for (std::size_t i = 0; i < ac.size(); ++i) EXPECT_NEAR(ac[i], 2.5 * ax[i] - ay[i], 1e-12);
}

TEST(EngleGranger, CointegratedPair) {
  std::mt19937_64 rng(42);
  auto x = cumsum(normal_draws(rng, 200));
  auto u = ar1(rng, 200, 0.2);
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) y[i] = 2.0 * x[i] + u[i];
  Eigen::MatrixXd X(200, 2);
  for (int i = 0; i < 200; ++i) X.row(i) << 1.0, x[static_cast<std::size_t>(i)];
  auto fit = ols_fit(y, X, {"const", "x"});
  EXPECT_NEAR(fit.coefficient("x"), 2.0, 0.05);
  auto eg = engle_granger(fit.residuals);
  EXPECT_TRUE(eg.cointegrated);
  AdfSpec strict;
  strict.n_variables = 2;
  EXPECT_TRUE(engle_granger(fit.residuals, strict).cointegrated);
}

TEST(EngleGranger, IndependentWalks) {
  std::mt19937_64 rng(42);
  auto x = cumsum(normal_draws(rng, 200));
  auto y = cumsum(normal_draws(rng, 200));
  Eigen::MatrixXd X(200, 2);
  for (int i = 0; i < 200; ++i) X.row(i) << 1.0, x[static_cast<std::size_t>(i)];
  auto fit = ols_fit(y, X, {"const", "x"});
  auto eg = engle_granger(fit.residuals);
  EXPECT_FALSE(eg.cointegrated);
  EXPECT_GT(eg.adf.statistic, eg.adf.critical_values.five);
}

TEST(EngleGranger, ReportedVerdict) { EXPECT_TRUE(cointegration_verdict(-8.321, -3.527)); }
