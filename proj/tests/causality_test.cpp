#include "c3i/causality.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace c3i;

namespace {

// y_t = 0.7 y_{t-1} + 0.3 x_{t-1} + e ; x_t = 0.5 x_{t-1} + u
Panel bivariate(std::uint64_t seed, std::size_t t, double x_to_y = 0.3, double y_coef = 0.7) {
  std::mt19937_64 rng(seed);
  auto e = c3i::testing::normal_draws(rng, t + 50);
  auto u = c3i::testing::normal_draws(rng, t + 50);
  std::vector<double> x(t + 50), y(t + 50);
  for (std::size_t i = 1; i < t + 50; ++i) {
    x[i] = 0.5 * x[i - 1] + u[i];
    y[i] = y_coef * y[i - 1] + x_to_y * x[i - 1] + e[i];
  }
  return Panel({2000, 1}, {"y", "x"}, {std::vector<double>(y.begin() + 50, y.end()), std::vector<double>(x.begin() + 50, x.end())});
}

}  // namespace

TEST(Var, RecoversCoefficientsAndMatchesNormalEquations) {
  auto p = bivariate(42, 400);
  auto fit = var_fit(p, 1);
  ASSERT_EQ(fit.regressor_labels, (std::vector<std::string>{"const", "y_L1", "x_L1"}));
  const auto& eq = fit.equation("y");
  EXPECT_LT(std::abs(eq.coefficient("y_L1") - 0.7), 3 * eq.standard_errors[1]);
  EXPECT_LT(std::abs(eq.coefficient("x_L1") - 0.3), 3 * eq.standard_errors[2]);

  // Normal-equations oracle per equation.
  const std::size_t n = p.rows() - 1;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd yv(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    X.row(static_cast<Eigen::Index>(r)) << 1.0, p.value(r, 0), p.value(r, 1);
    yv(static_cast<Eigen::Index>(r)) = p.value(r + 1, 0);
  }
  Eigen::VectorXd beta = c3i::testing::cofactor_inverse(X.transpose() * X) * X.transpose() * yv;
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(eq.coefficients[static_cast<std::size_t>(j)], beta(j), 1e-9);

  for (const auto& e : fit.equations) {
    ASSERT_EQ(e.residuals.size(), n);
    EXPECT_EQ(e.k, 1 + 2 * fit.lag_order);
  }
  // z-table rows: (const + 2 vars x 1 lag) per equation.
  EXPECT_EQ(fit.table.size(), 6u);
}

TEST(Var, FittedPlusResidualReconstructs) {
  auto p = bivariate(7, 120);
  auto fit = var_fit(p, 2);
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t r = 0; r < fit.nobs; ++r) {
      EXPECT_NEAR(fit.equations[e].fitted[r] + fit.equations[e].residuals[r], p.value(r + 2, e), 1e-10);
    }
  }
}

TEST(Var, ConstantColumnIsRankDeficient) {
  auto p = bivariate(1, 60);
  auto y = p.column(0);
  Panel q(p.start(), {"y", "flat"}, {std::vector<double>(y.begin(), y.end()), std::vector<double>(60, 2.0)});
  EXPECT_THROW(var_fit(q, 2), NumericalError);
}

TEST(Var, TooShort) {
  auto p = bivariate(1, 6);
  EXPECT_THROW(var_fit(p, 2), DataError);
}

TEST(Granger, DetectsTrueDirectionOnly) {
  auto p = bivariate(42, 300);
  auto fit = var_fit(p, 2);
  auto causal = granger_exclusion(fit, "y", "x");
  EXPECT_LT(causal.p_value, 0.01);
  EXPECT_EQ(causal.df, 2u);
  EXPECT_THROW(granger_exclusion(fit, "y", "y"), DataError);
  EXPECT_THROW(granger_exclusion(fit, "y", "z"), DataError);
}

TEST(Granger, NullDirectionHasNominalSize) {
  int rejections = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    auto fit = var_fit(bivariate(1000 + static_cast<std::uint64_t>(r), 200), 2);
    if (granger_exclusion(fit, "x", "y").p_value < 0.05) ++rejections;
  }
  EXPECT_NEAR(static_cast<double>(rejections) / reps, 0.05, 0.03);
}

TEST(Granger, AllExclusionDfBookkeeping) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<double>> cols;
  std::vector<std::string> labels{"CCI"};
  for (int j = 0; j < 10; ++j) cols.push_back(c3i::testing::normal_draws(rng, 90));
  for (int j = 1; j <= 9; ++j) labels.push_back("C" + std::to_string(j));
  auto fit = var_fit(Panel({2006, 1}, labels, cols), 2);
  auto all = granger_exclusion(fit, "CCI", "ALL");
  EXPECT_EQ(all.df, 18u);
  EXPECT_EQ(granger_exclusion(fit, "CCI", "C3").df, 2u);
}

TEST(Granger, InvariantToRescalingExcludedVariable) {
  auto p = bivariate(11, 150);
  auto a = granger_exclusion(var_fit(p, 2), "y", "x");
  auto y = p.column(0), x = p.column(1);
  std::vector<double> xs(x.begin(), x.end());
  for (auto& v : xs) v *= 37.0;
  Panel q(p.start(), {"y", "x"}, {std::vector<double>(y.begin(), y.end()), xs});
  auto b = granger_exclusion(var_fit(q, 2), "y", "x");
  EXPECT_NEAR(a.chi2, b.chi2, 1e-8 * std::max(1.0, a.chi2));
}
