#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "c3i/distributions.hpp"
#include "c3i/ols.hpp"
#include "test_util.hpp"

using namespace c3i;

namespace {

// Composite Simpson integral of the Student-t density over [a, b].
double t_density_integral(double df, double a, double b, int steps = 20000) {
  auto pdf = [df](double x) {
    const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
    return c * std::pow(1.0 + x * x / df, -(df + 1) / 2);
  };
  const double h = (b - a) / steps;
  double s = pdf(a) + pdf(b);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(TailProbability, GrangerTableChiSquareValues) {
  const std::array<std::pair<double, double>, 9> rows{{{6.661, 0.036},
                                                       {0.802, 0.670},
                                                       {6.015, 0.049},
                                                       {0.980, 0.613},
                                                       {11.491, 0.003},
                                                       {3.013, 0.222},
                                                       {0.371, 0.831},
                                                       {1.783, 0.410},
                                                       {0.708, 0.702}}};
  for (auto [stat, p] : rows) EXPECT_NEAR(tail_probability(DistSpec::chi_square(2), stat), p, 0.001) << stat;
}

TEST(TailProbability, ChiSquareTwoDfClosedForm) {
  for (double x = 0.0; x < 60.0; x += 0.37) {
    EXPECT_NEAR(tail_probability(DistSpec::chi_square(2), x), std::exp(-x / 2.0), 1e-10);
  }
  for (double df : {1.0, 5.0, 41.0}) EXPECT_EQ(tail_probability(DistSpec::chi_square(df), 0.0), 1.0);
}

TEST(TailProbability, FOneEqualsSquaredT) {
  for (double m : {3.0, 10.0, 62.0, 150.0}) {
    for (double x : {0.1, 1.0, 2.5, 7.0, 20.0}) {
      EXPECT_NEAR(tail_probability(DistSpec::f(1, m), x), two_sided_t_p(std::sqrt(x), m), 1e-9);
    }
  }
}

TEST(TailProbability, StudentTMatchesQuadrature) {
  for (double df : {2.0, 5.0, 30.0}) {
    for (double x : {0.5, 1.5, 3.0}) {
      const double oracle = 0.5 - t_density_integral(df, 0.0, x);
      EXPECT_NEAR(tail_probability(DistSpec::t(df), x), oracle, 1e-9);
    }
  }
}

TEST(TailProbability, MonotoneInStatistic) {
  for (auto spec : {DistSpec::chi_square(3), DistSpec::f(13, 62), DistSpec::t(7), DistSpec::standard_normal()}) {
    double prev = 1.0;
    for (double x = 0.0; x < 30.0; x += 0.25) {
      const double p = tail_probability(spec, x);
      EXPECT_LE(p, prev + 1e-15);
      EXPECT_GE(p, 0.0);
      prev = p;
    }
  }
}

TEST(TailProbability, Errors) {
  EXPECT_THROW(tail_probability(DistSpec::chi_square(2), std::nan("")), NumericalError);
  EXPECT_THROW(tail_probability(DistSpec::chi_square(2), INFINITY), NumericalError);
  EXPECT_THROW(tail_probability(DistSpec::chi_square(0), 1.0), NumericalError);
}

TEST(TailProbability, WhiteTableHasConsistentDf) {
  // The reported chi2 = 51.74 with p = 0.4058 pins df to 50.
  int matches = 0;
  for (int df = 1; df <= 120; ++df) {
    if (std::abs(tail_probability(DistSpec::chi_square(df), 51.74) - 0.4058) < 0.0005) ++matches;
  }
  EXPECT_EQ(matches, 1);
  EXPECT_NEAR(tail_probability(DistSpec::chi_square(50), 51.74), 0.4058, 0.0005);
}

TEST(Ols, ExactLine) {
  std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v);
  Eigen::MatrixXd X(6, 2);
  for (int i = 0; i < 6; ++i) X.row(i) << 1.0, x[static_cast<std::size_t>(i)];
  auto fit = ols_fit(y, X, {"const", "x"});
  EXPECT_NEAR(fit.coefficient("x"), 2.0, 1e-12);
  EXPECT_NEAR(fit.coefficient("const"), 0.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  for (double e : fit.residuals) EXPECT_NEAR(e, 0.0, 1e-12);
}

TEST(Ols, FivePointMatchesCofactorOracle) {
  std::vector<double> y{1.2, 1.9, 3.2, 3.8, 5.3};
  Eigen::MatrixXd X(5, 3);
  X << 1, 1, 0.5,  //
      1, 2, -0.3,  //
      1, 3, 0.8,   //
      1, 4, 0.1,   //
      1, 5, -0.6;
  auto fit = ols_fit(y, X, {"const", "a", "b"});
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), 5);
  Eigen::MatrixXd inv = c3i::testing::cofactor_inverse(X.transpose() * X);
  Eigen::VectorXd beta = inv * X.transpose() * yv;
  const double s2 = (yv - X * beta).squaredNorm() / 2.0;
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(fit.coefficients[static_cast<std::size_t>(j)], beta(j), 1e-10);
    EXPECT_NEAR(fit.standard_errors[static_cast<std::size_t>(j)], std::sqrt(s2 * inv(j, j)), 1e-10);
  }
  EXPECT_EQ(fit.df_resid(), 2u);
  EXPECT_NEAR(fit.root_residual, std::sqrt(s2), 1e-12);
}

TEST(Ols, RankDeficiencyNamesColumn) {
  Eigen::MatrixXd X(6, 3);
  X << 1, 1, 1, 1, 2, 2, 1, 3, 3, 1, 4, 4, 1, 5, 5, 1, 6, 6;
  std::vector<double> y{1, 2, 3, 4, 5, 7};
  try {
    (void)ols_fit(y, X, {"const", "x", "x_copy"});
    FAIL() << "expected rank deficiency";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("x_copy"), std::string::npos);
  }
}

TEST(Ols, TooFewObservations) {
  Eigen::MatrixXd X(2, 2);
  X << 1, 1, 1, 2;
  std::vector<double> y{1, 2};
  EXPECT_THROW(ols_fit(y, X, {"const", "x"}), NumericalError);
}

TEST(Ols, InvariantsOnRandomDesigns) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 30, k = 4;
    Eigen::MatrixXd X(n, k);
    X.col(0).setOnes();
    auto draws = c3i::testing::normal_draws(rng, static_cast<std::size_t>(n * (k - 1)));
    for (int i = 0; i < n; ++i)
      for (int j = 1; j < k; ++j) X(i, j) = draws[static_cast<std::size_t>(i * (k - 1) + j - 1)];
    auto noise = c3i::testing::normal_draws(rng, n);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = 1.0 + 0.5 * X(i, 1) - X(i, 2) + noise[static_cast<std::size_t>(i)];
    auto fit = ols_fit(y, X, {"const", "a", "b", "c"});

    Eigen::Map<const Eigen::VectorXd> e(fit.residuals.data(), n);
    for (int j = 0; j < k; ++j) EXPECT_LT(std::abs(X.col(j).dot(e)), 1e-8 * X.col(j).norm() * std::max(1.0, e.norm()));
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(fit.fitted[static_cast<std::size_t>(i)] + fit.residuals[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)], 1e-10);
    }
    EXPECT_GE(fit.r_squared, fit.adjusted_r_squared);
    for (double p : fit.p_values) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
    for (std::size_t j = 0; j < fit.k; ++j) {
      EXPECT_LT(fit.confidence_intervals_95[j].first, fit.coefficients[j]);
      EXPECT_GT(fit.confidence_intervals_95[j].second, fit.coefficients[j]);
    }

    auto extra = c3i::testing::normal_draws(rng, n);
    Eigen::MatrixXd X2(n, k + 1);
    X2 << X, Eigen::Map<const Eigen::VectorXd>(extra.data(), n);
    auto bigger = ols_fit(y, X2, {"const", "a", "b", "c", "noise"});
    EXPECT_GE(bigger.r_squared, fit.r_squared - 1e-12);
  }
}
