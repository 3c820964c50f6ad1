#include "c3i/pca.hpp"

#include <gtest/gtest.h>

#include <random>

#include "c3i/ols.hpp"
#include "test_util.hpp"

using namespace c3i;

namespace {

Panel random_panel(std::mt19937_64& rng, std::size_t n, std::size_t t, double common = 0.0) {
  auto f = c3i::testing::normal_draws(rng, t);
  std::vector<std::vector<double>> cols;
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < n; ++j) {
    auto e = c3i::testing::normal_draws(rng, t);
    for (std::size_t i = 0; i < t; ++i) e[i] = 10.0 * static_cast<double>(j) + (1.0 + 0.3 * static_cast<double>(j)) * (common * f[i] + e[i]);
    cols.push_back(e);
    labels.push_back("x" + std::to_string(j + 1));
  }
  return Panel({2006, 1}, labels, cols);
}

}  // namespace

TEST(Jacobi, MatchesEigenSolverOracle) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd a(6, 6);
    auto d = c3i::testing::normal_draws(rng, 36);
    for (int i = 0; i < 36; ++i) a(i / 6, i % 6) = d[static_cast<std::size_t>(i)];
    a = a * a.transpose();
    auto mine = jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(mine.values(i), ref.eigenvalues()(5 - i), 1e-9 * ref.eigenvalues().maxCoeff());
    Eigen::MatrixXd recon = mine.vectors * mine.values.asDiagonal() * mine.vectors.transpose();
    EXPECT_LT((recon - a).cwiseAbs().maxCoeff(), 1e-9 * a.norm());
  }
}

TEST(Pca, PerfectlyCorrelatedPair) {
  Panel p({2006, 1}, {"a", "b"}, {{1, 2, 3, 4, 6}, {2, 4, 6, 8, 12}});
  auto m = pca_fit(p, 1);
  EXPECT_NEAR(m.loadings(0, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.loadings(1, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.proportions(0), 1.0, 1e-12);
}

TEST(Pca, SpectralReconstructionAndOrthonormality) {
  std::mt19937_64 rng(99);
  auto p = random_panel(rng, 5, 30, 0.8);
  auto m = pca_fit(p, 5);
  Eigen::MatrixXd r = correlation_matrix(p);
  Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) recon += m.eigenvalues(i) * m.loadings.col(i) * m.loadings.col(i).transpose();
  EXPECT_LT((recon - r).cwiseAbs().maxCoeff(), 1e-8);
  Eigen::MatrixXd gram = m.loadings.transpose() * m.loadings;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(m.all_eigenvalues.sum(), 5.0, 1e-8);
  for (int i = 1; i < 5; ++i) {
    EXPECT_LE(m.eigenvalues(i), m.eigenvalues(i - 1));
    EXPECT_GE(m.cumulative(i), m.cumulative(i - 1));
  }
  EXPECT_LE(m.cumulative(4), 1.0 + 1e-12);
}

TEST(Pca, SignConvention) {
  std::mt19937_64 rng(17);
  auto p = random_panel(rng, 4, 40, 1.0);
  auto m = pca_fit(p, 4);
  for (int j = 0; j < 4; ++j) {
    Eigen::Index arg;
    m.loadings.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(m.loadings(arg, j), 0.0);
  }
  // Flipping an input column keeps the spectrum; loadings change only in that row up to column sign.
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < 4; ++j) {
    auto c = p.column(j);
    cols.emplace_back(c.begin(), c.end());
  }
  for (auto& v : cols[2]) v = -v;
  auto flipped = pca_fit(Panel(p.start(), p.labels(), cols), 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(flipped.eigenvalues(i), m.eigenvalues(i), 1e-10);
  for (int j = 0; j < 4; ++j) {
    Eigen::VectorXd expect = m.loadings.col(j);
    expect(2) = -expect(2);
    const double s = expect.dot(flipped.loadings.col(j)) > 0 ? 1.0 : -1.0;
    EXPECT_LT((s * expect - flipped.loadings.col(j)).cwiseAbs().maxCoeff(), 1e-8);
  }
  // Determinism.
  auto again = pca_fit(p, 4);
  EXPECT_EQ((again.loadings - m.loadings).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Pca, Errors) {
  Panel p({2006, 1}, {"a", "b"}, {{1, 2, 3}, {3, 1, 2}});
  EXPECT_THROW(pca_fit(p, 3), DataError);
  EXPECT_THROW(pca_fit(p, 0), DataError);
  Panel flat({2006, 1}, {"a", "b"}, {{1, 2, 3}, {5, 5, 5}});
  EXPECT_THROW(pca_fit(flat, 1), DataError);
}

TEST(PcaProject, CentredRowProjectsToZero) {
  std::mt19937_64 rng(1);
  auto p = random_panel(rng, 4, 25, 0.5);
  auto m = pca_fit(p, 3);
  std::vector<double> mean_row(m.means.data(), m.means.data() + 4);
  auto c = project_row(m, mean_row);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(c(i), 0.0, 1e-12);
}

TEST(PcaProject, ComponentVarianceEqualsEigenvalue) {
  std::mt19937_64 rng(2);
  auto p = random_panel(rng, 6, 50, 0.7);
  auto m = pca_fit(p, 6);
  auto comps = pca_project(m, p);
  for (std::size_t i = 0; i < 6; ++i) {
    const double sd = sample_sd(comps.series.column(i));
    EXPECT_NEAR(sd * sd, m.eigenvalues(static_cast<Eigen::Index>(i)), 1e-8);
  }
  EXPECT_EQ(comps.series.labels()[0], "C1");
}

TEST(PcaProject, SingleTopicEqualsStandardizedSeries) {
  Panel p({2006, 1}, {"a"}, {{3, 1, 4, 1, 5, 9}});
  auto m = pca_fit(p, 1);
  auto comps = pca_project(m, p);
  auto z = standardize(p).panel;
  for (std::size_t t = 0; t < 6; ++t) EXPECT_NEAR(comps.series.value(t, 0), z.value(t, 0), 1e-12);
}

TEST(PcaProject, LabelMismatch) {
  Panel p({2006, 1}, {"a", "b"}, {{1, 2, 3, 5}, {3, 1, 2, 2}});
  auto m = pca_fit(p, 1);
  Panel q({2006, 1}, {"a", "c"}, {{1, 2, 3, 5}, {3, 1, 2, 2}});
  try {
    (void)pca_project(m, q);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("+c"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("-b"), std::string::npos);
  }
}

TEST(Kmo, MatchesCofactorOracle) {
  Panel p({2006, 1}, {"a", "b", "c"}, {{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 6.1, 2.2},
                                        {1.0, 2.2, 1.5, 4.1, 3.9, 2.0, 5.5, 1.1},
                                        {0.3, 0.1, 0.9, 0.8, 0.2, 0.7, 0.4, 0.6}});
  Eigen::MatrixXd r(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto a = p.column(static_cast<std::size_t>(i));
      auto b = p.column(static_cast<std::size_t>(j));
      const double ma = sample_mean(a), mb = sample_mean(b);
      double sab = 0, saa = 0, sbb = 0;
      for (std::size_t t = 0; t < 8; ++t) {
        sab += (a[t] - ma) * (b[t] - mb);
        saa += (a[t] - ma) * (a[t] - ma);
        sbb += (b[t] - mb) * (b[t] - mb);
      }
      r(i, j) = sab / std::sqrt(saa * sbb);
    }
  Eigen::MatrixXd inv = c3i::testing::cofactor_inverse(r);
  double r2 = 0, q2 = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      r2 += r(i, j) * r(i, j);
      const double q = -inv(i, j) / std::sqrt(inv(i, i) * inv(j, j));
      q2 += q * q;
    }
  EXPECT_NEAR(kmo_statistic(p), r2 / (r2 + q2), 1e-12);
  auto smc = smc_vector(p);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(smc[static_cast<std::size_t>(i)], 1.0 - 1.0 / inv(i, i), 1e-12);
}

TEST(Kmo, UncorrelatedVariablesHaveNoCommonVariance) {
  Panel p({2006, 1}, {"a", "b", "c"}, {{1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}});
  EXPECT_THROW((void)kmo_statistic(p), NumericalError);
}

TEST(Kmo, OneFactorIsAdequate) {
  std::mt19937_64 rng(42);
  const std::size_t t = 300;
  auto f = c3i::testing::normal_draws(rng, t);
  std::vector<std::vector<double>> cols;
  std::vector<std::string> labels;
  for (int j = 0; j < 8; ++j) {
    auto e = c3i::testing::normal_draws(rng, t, 0.3);
    for (std::size_t i = 0; i < t; ++i) e[i] += f[i];
    cols.push_back(e);
    labels.push_back("v" + std::to_string(j));
  }
  EXPECT_GT(kmo_statistic(Panel({2006, 1}, labels, cols)), 0.8);
}

TEST(Smc, DuplicateVariableIsSingular) {
  Panel p({2006, 1}, {"a", "b", "c"}, {{1, 2, 3, 4, 6}, {1, 2, 3, 4, 6}, {0, 3, 1, 2, 2}});
  EXPECT_THROW(smc_vector(p), NumericalError);
}

TEST(Smc, MatchesOlsRSquared) {
  std::mt19937_64 rng(8);
  auto p = random_panel(rng, 3, 40, 0.9);
  auto smc = smc_vector(p);
  for (std::size_t i = 0; i < 3; ++i) {
    Eigen::MatrixXd X(40, 3);
    std::vector<std::string> labels{"const"};
    Eigen::Index c = 1;
    X.col(0).setOnes();
    for (std::size_t j = 0; j < 3; ++j) {
      if (j == i) continue;
      for (Eigen::Index t = 0; t < 40; ++t) X(t, c) = p.value(static_cast<std::size_t>(t), j);
      labels.push_back(p.labels()[j]);
      ++c;
    }
    auto y = p.column(i);
    auto fit = ols_fit(std::vector<double>(y.begin(), y.end()), X, labels);
    EXPECT_NEAR(smc[i], fit.r_squared, 1e-10);
  }
}

TEST(Smc, IndependentColumnsNearZero) {
  std::mt19937_64 rng(31);
  auto p = random_panel(rng, 5, 1000, 0.0);
  for (double s : smc_vector(p)) EXPECT_LT(s, 0.05);
}

TEST(BackProject, IdentityForUnitStandardization) {
  PcaModel m;
  m.topic_labels = {"a", "b", "c"};
  m.means = Eigen::VectorXd::Zero(3);
  m.sds = Eigen::VectorXd::Ones(3);
  m.loadings = Eigen::MatrixXd(3, 2);
  m.loadings << 0.6, 0.0, 0.8, 0.0, 0.0, 1.0;
  auto bp = pca_back_project(m, {{1, 1.0}});
  EXPECT_NEAR(bp.weights(0), 0.6, 1e-15);
  EXPECT_NEAR(bp.weights(1), 0.8, 1e-15);
  EXPECT_NEAR(bp.weights(2), 0.0, 1e-15);
  EXPECT_EQ(bp.constant, 0.0);
  EXPECT_THROW(pca_back_project(m, {{3, 1.0}}), DataError);
  EXPECT_THROW(pca_back_project(m, {{0, 1.0}}), DataError);
}

TEST(BackProject, RoundTripOverSeeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    auto p = random_panel(rng, 6, 30, 0.6);
    auto m = pca_fit(p, 4);
    auto comps = pca_project(m, p);
    auto coeffs = c3i::testing::normal_draws(rng, 4);
    std::map<std::size_t, double> cm;
    for (std::size_t i = 0; i < 4; ++i) cm[i + 1] = coeffs[i];
    auto bp = pca_back_project(m, cm);
    for (std::size_t t = 0; t < p.rows(); ++t) {
      auto row = p.row(t);
      Eigen::Map<const Eigen::VectorXd> x(row.data(), 6);
      double direct = 0.0;
      for (std::size_t i = 0; i < 4; ++i) direct += coeffs[i] * comps.series.value(t, i);
      EXPECT_NEAR(x.dot(bp.weights) + bp.constant, direct, 1e-10);
    }
  }
}
