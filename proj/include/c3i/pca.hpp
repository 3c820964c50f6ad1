#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "c3i/error.hpp"
#include "c3i/linalg.hpp"
#include "c3i/series.hpp"

namespace c3i {

/// Correlation-matrix PCA of a topic panel.
struct PcaModel {
  std::vector<std::string> topic_labels;
  Eigen::VectorXd means;            // N
  Eigen::VectorXd sds;              // N
  Eigen::MatrixXd loadings;         // N x k, unit columns c_1..c_k
  Eigen::VectorXd eigenvalues;      // k, descending
  Eigen::VectorXd all_eigenvalues;  // N, descending (scree)
  Eigen::VectorXd proportions;      // k
  Eigen::VectorXd cumulative;       // k
  int sweeps = 0;

  [[nodiscard]] std::size_t topics() const { return topic_labels.size(); }
  [[nodiscard]] std::size_t components() const { return static_cast<std::size_t>(loadings.cols()); }
};

/// Component scores C_1..C_k over the projected panel's months.
struct ComponentSet {
  Panel series;

  [[nodiscard]] std::size_t components() const { return series.cols(); }
  [[nodiscard]] TimeSeries component(std::size_t id) const { return series.series(id - 1); }
};

[[nodiscard]] inline std::string component_label(std::size_t id) { return "C" + std::to_string(id); }

/// Sample correlation matrix of the panel's columns.
[[nodiscard]] inline Eigen::MatrixXd correlation_matrix(const Panel& panel) {
  const auto z = standardize(panel).panel;
  const auto t = static_cast<Eigen::Index>(z.rows());
  const auto n = static_cast<Eigen::Index>(z.cols());
  Eigen::MatrixXd m(t, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < t; ++i) m(i, j) = z.value(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::MatrixXd r = (m.transpose() * m) / static_cast<double>(t - 1);
  for (Eigen::Index j = 0; j < n; ++j) r(j, j) = 1.0;
  return r;
}

/// Flips each column so that its largest-magnitude entry is positive.
inline void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > std::abs(vectors(arg, j)) + 1e-12) arg = i;
    }
    if (vectors(arg, j) < 0) vectors.col(j) *= -1.0;
  }
}

[[nodiscard]] inline PcaModel pca_fit(const Panel& panel, std::size_t k) {
  const std::size_t n = panel.cols();
  if (panel.rows() < 3) throw DataError("pca_fit: need at least 3 observations");
  if (k < 1 || k > n) {
    throw DataError("pca_fit: cannot retain " + std::to_string(k) + " components from " + std::to_string(n) + " topics");
  }
  auto st = standardize(panel);
  auto eig = jacobi_eigen(correlation_matrix(panel));
  Eigen::MatrixXd vectors = eig.vectors;
  normalize_signs(vectors);

  PcaModel m;
  m.topic_labels = panel.labels();
  m.means = Eigen::Map<const Eigen::VectorXd>(st.means.data(), static_cast<Eigen::Index>(n));
  m.sds = Eigen::Map<const Eigen::VectorXd>(st.sds.data(), static_cast<Eigen::Index>(n));
  m.all_eigenvalues = eig.values.cwiseMax(0.0);
  const auto kk = static_cast<Eigen::Index>(k);
  m.loadings = vectors.leftCols(kk);
  m.eigenvalues = m.all_eigenvalues.head(kk);
  m.proportions = m.eigenvalues / static_cast<double>(n);
  m.cumulative.resize(kk);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < kk; ++i) m.cumulative(i) = (acc += m.proportions(i));
  m.sweeps = eig.sweeps;
  return m;
}

/// Component scores of one raw topic observation.
[[nodiscard]] inline Eigen::VectorXd project_row(const PcaModel& model, std::span<const double> x) {
  if (x.size() != model.topics()) {
    throw DataError("project_row: observation has " + std::to_string(x.size()) + " topics, model has " +
                    std::to_string(model.topics()));
  }
  Eigen::VectorXd z(static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    z(jj) = (x[j] - model.means(jj)) / model.sds(jj);
  }
  return model.loadings.transpose() * z;
}

[[nodiscard]] inline ComponentSet pca_project(const PcaModel& model, const Panel& panel) {
  if (panel.labels() != model.topic_labels) {
    std::string diff;
    for (const auto& l : panel.labels())
      if (std::find(model.topic_labels.begin(), model.topic_labels.end(), l) == model.topic_labels.end()) diff += " +" + l;
    for (const auto& l : model.topic_labels)
      if (std::find(panel.labels().begin(), panel.labels().end(), l) == panel.labels().end()) diff += " -" + l;
    if (diff.empty()) diff = " (same topics, different order)";
    throw DataError("pca_project: panel topics differ from model:" + diff);
  }
  const std::size_t k = model.components();
  std::vector<std::vector<double>> cols(k, std::vector<double>(panel.rows()));
  for (std::size_t t = 0; t < panel.rows(); ++t) {
    auto c = project_row(model, panel.row(t));
    for (std::size_t i = 0; i < k; ++i) cols[i][t] = c(static_cast<Eigen::Index>(i));
  }
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= k; ++i) labels.push_back(component_label(i));
  return ComponentSet{Panel(panel.start(), std::move(labels), std::move(cols))};
}

namespace detail {

inline Eigen::MatrixXd inverse_correlation(const Panel& panel, const char* who) {
  if (panel.cols() < 2) throw DataError(std::string(who) + ": need at least 2 variables");
  Eigen::MatrixXd r = correlation_matrix(panel);
  auto eig = jacobi_eigen(r);
  const double lmax = eig.values(0);
  const double lmin = eig.values(eig.values.size() - 1);
  if (!(lmin > 1e-12 * lmax)) throw NumericalError(std::string(who) + ": correlation matrix is singular");
  Eigen::VectorXd inv = eig.values.cwiseInverse();
  return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

}  // namespace detail

/// Kaiser-Meyer-Olkin sampling adequacy.
[[nodiscard]] inline double kmo_statistic(const Panel& panel) {
  Eigen::MatrixXd rinv = detail::inverse_correlation(panel, "kmo_statistic");
  Eigen::MatrixXd r = correlation_matrix(panel);
  double r2 = 0.0, q2 = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      if (i == j) continue;
      const double q = -rinv(i, j) / std::sqrt(rinv(i, i) * rinv(j, j));
      r2 += r(i, j) * r(i, j);
      q2 += q * q;
    }
  }
  if (r2 < 1e-20) throw NumericalError("kmo_statistic: no common variance (all correlations are zero)");
  return r2 / (r2 + q2);
}

/// Squared multiple correlation of each variable on all the others.
[[nodiscard]] inline std::vector<double> smc_vector(const Panel& panel) {
  Eigen::MatrixXd rinv = detail::inverse_correlation(panel, "smc_vector");
  std::vector<double> out;
  for (Eigen::Index i = 0; i < rinv.rows(); ++i) out.push_back(std::clamp(1.0 - 1.0 / rinv(i, i), 0.0, 1.0));
  return out;
}

/// Topic-space weights for a linear combination of components.
///
/// sum_i coeff_i * C_{i,t} == weights . x_t + constant for raw topic rows x_t.
struct BackProjection {
  Eigen::VectorXd weights;
  double constant = 0.0;
};

/// `coefficients` maps 1-based component ids to their coefficients.
[[nodiscard]] inline BackProjection pca_back_project(const PcaModel& model,
                                                     const std::map<std::size_t, double>& coefficients) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.topics()));
  for (const auto& [id, coeff] : coefficients) {
    if (id < 1 || id > model.components()) {
      throw DataError("pca_back_project: unknown component C" + std::to_string(id) + " (model has " +
                      std::to_string(model.components()) + ")");
    }
    v += coeff * model.loadings.col(static_cast<Eigen::Index>(id - 1));
  }
  BackProjection out;
  out.weights = v.cwiseQuotient(model.sds);
  out.constant = -out.weights.dot(model.means);
  return out;
}

}  // namespace c3i
