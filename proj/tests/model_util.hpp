#pragma once

#include <random>
#include <string>
#include <vector>

#include "c3i/model.hpp"
#include "test_util.hpp"

namespace c3i::testing {

// Random topic panel driven by a few common factors so the PCA is well posed.
inline Panel random_topic_panel(std::mt19937_64& rng, std::size_t topics, std::size_t months, std::size_t factors = 3) {
  std::vector<std::vector<double>> f;
  for (std::size_t j = 0; j < factors; ++j) f.push_back(normal_draws(rng, months));
  std::normal_distribution<double> load(0.0, 1.0);
  std::uniform_real_distribution<double> level(20.0, 80.0);
  std::vector<std::vector<double>> cols;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < topics; ++i) {
    std::vector<double> w(factors);
    for (auto& v : w) v = load(rng);
    auto e = normal_draws(rng, months, 0.5);
    const double base = level(rng);
    std::vector<double> c(months);
    for (std::size_t t = 0; t < months; ++t) {
      c[t] = base + e[t];
      for (std::size_t j = 0; j < factors; ++j) c[t] += 5.0 * w[j] * f[j][t];
    }
    cols.push_back(std::move(c));
    labels.push_back("topic" + std::to_string(i + 1));
  }
  return Panel({2006, 1}, labels, cols);
}

// Random piecewise model over a random PCA, drawing terms of every shape.
inline C3IModel random_c3i_model(std::mt19937_64& rng, std::size_t topics = 8, std::size_t k = 4) {
  auto panel = random_topic_panel(rng, topics, 60);
  auto pca = pca_fit(panel, k);
  std::normal_distribution<double> coef(0.0, 1.0);
  std::bernoulli_distribution keep(0.5);
  C3IModel m;
  m.alpha = 40.0 + coef(rng);
  m.gamma0 = coef(rng);
  m.delta = 0.5 + 0.1 * coef(rng);
  m.brk = BreakDesign{30, {2006, 1}};
  for (std::size_t i = 1; i <= k; ++i) {
    for (const std::string kind : {"C", "A"}) {
      for (const std::string suffix : {"", "_L1"}) {
        const std::string label = kind + std::to_string(i) + suffix;
        if (keep(rng)) m.betas[label] = coef(rng);
        if (keep(rng)) m.gammas[label] = coef(rng);
      }
    }
  }
  m.pca = pca;
  return m;
}

}  // namespace c3i::testing
