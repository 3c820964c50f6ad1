#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "c3i/breaks.hpp"
#include "c3i/error.hpp"
#include "c3i/ols.hpp"
#include "c3i/pca.hpp"
#include "c3i/regression.hpp"
#include "c3i/series.hpp"

namespace c3i {

/// A component term C_i or A_i = C_i + C_{i,t-1}, possibly lagged once.
struct TermRef {
  char kind = 'C';
  std::size_t component = 0;  // 1-based
  std::size_t lag = 0;

  /// Deepest topic lag the term reads.
  [[nodiscard]] std::size_t depth() const { return lag + (kind == 'A' ? 1 : 0); }
};

[[nodiscard]] inline std::optional<TermRef> parse_term(std::string_view label) {
  if (label.size() < 2 || (label[0] != 'C' && label[0] != 'A')) return std::nullopt;
  TermRef t;
  t.kind = label[0];
  std::size_t i = 1;
  while (i < label.size() && label[i] >= '0' && label[i] <= '9') t.component = t.component * 10 + static_cast<std::size_t>(label[i++] - '0');
  if (i == 1 || t.component == 0) return std::nullopt;
  if (i == label.size()) return t;
  if (label.substr(i) == "_L1") {
    t.lag = 1;
    return t;
  }
  return std::nullopt;
}

enum class Regime { pre = 1, post = 2 };

/// Piecewise model: intercept alpha (+ gamma0 after the break), delta on
/// CCI_{t-1}, base coefficients beta and interaction coefficients gamma.
struct C3IModel {
  double alpha = 0.0;
  double gamma0 = 0.0;
  double delta = 0.0;
  std::map<std::string, double> betas;
  std::map<std::string, double> gammas;
  BreakDesign brk;
  std::vector<std::string> retained_terms;
  std::vector<std::string> force_keep;
  std::optional<PcaModel> pca;

  double alpha_se = 0.0;
  double post_intercept_se = 0.0;
  double delta_se = 0.0;

  [[nodiscard]] Regime regime(long t) const { return brk.dummy(t) > 0.0 ? Regime::post : Regime::pre; }

  [[nodiscard]] double intercept(Regime r) const { return r == Regime::pre ? alpha : alpha + gamma0; }

  [[nodiscard]] double coefficient(const std::string& term, Regime r) const {
    double c = 0.0;
    if (auto it = betas.find(term); it != betas.end()) c += it->second;
    if (r == Regime::post)
      if (auto it = gammas.find(term); it != gammas.end()) c += it->second;
    return c;
  }

  /// Every component term appearing in either regime, in label order.
  [[nodiscard]] std::vector<std::string> terms() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : betas) out.push_back(k);
    for (const auto& [k, v] : gammas)
      if (betas.count(k) == 0) out.push_back(k);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Deepest topic lag with a non-zero coefficient in the regime.
  [[nodiscard]] std::size_t depth(Regime r) const {
    std::size_t d = 0;
    for (const auto& t : terms())
      if (coefficient(t, r) != 0.0) d = std::max(d, parse_term(t)->depth());
    return d;
  }
};

[[nodiscard]] inline C3IModel fit_c3i(const OlsFit& fit, const BreakDesign& brk) {
  for (const char* m : {kInterceptLabel, kDummyLabel, kCciLagLabel}) {
    if (!fit.has(m)) throw DataError(std::string("fit_c3i: fit lacks the mandatory term '") + m + "'");
  }
  C3IModel model;
  model.brk = brk;
  model.retained_terms = fit.term_labels;
  const auto ia = *fit.index_of(kInterceptLabel);
  const auto ig = *fit.index_of(kDummyLabel);
  const auto id = *fit.index_of(kCciLagLabel);
  model.alpha = fit.coefficients[ia];
  model.gamma0 = fit.coefficients[ig];
  model.delta = fit.coefficients[id];
  const auto a = static_cast<Eigen::Index>(ia), g = static_cast<Eigen::Index>(ig);
  model.alpha_se = fit.standard_errors[ia];
  model.post_intercept_se = std::sqrt(std::max(0.0, fit.covariance(a, a) + fit.covariance(g, g) + 2.0 * fit.covariance(a, g)));
  model.delta_se = fit.standard_errors[id];
  for (std::size_t j = 0; j < fit.k; ++j) {
    const auto& l = fit.term_labels[j];
    if (j == ia || j == ig || j == id) continue;
    const bool interaction = l.rfind("du_", 0) == 0;
    const std::string base = interaction ? l.substr(3) : l;
    if (!parse_term(base)) throw DataError("fit_c3i: term '" + l + "' is not a component term");
    (interaction ? model.gammas : model.betas)[base] = fit.coefficients[j];
  }
  return model;
}

[[nodiscard]] inline C3IModel fit_c3i(const OlsFit& fit, const BreakDesign& brk, const PcaModel& pca) {
  auto model = fit_c3i(fit, brk);
  for (const auto& t : model.terms()) {
    if (parse_term(t)->component > pca.components()) {
      throw DataError("fit_c3i: term '" + t + "' refers to a component the PCA does not retain");
    }
  }
  model.pca = pca;
  return model;
}

/// Component scores at t, t-1 and t-2; trailing entries may be left empty
/// when the model does not read them.
struct ComponentInputs {
  Eigen::VectorXd current;
  Eigen::VectorXd prev;
  Eigen::VectorXd prev2;

  [[nodiscard]] const Eigen::VectorXd& at(std::size_t lag) const { return lag == 0 ? current : lag == 1 ? prev : prev2; }
};

namespace detail {

inline double term_value(const TermRef& t, const ComponentInputs& in, const std::string& label) {
  auto read = [&](std::size_t lag) {
    const auto& v = in.at(lag);
    if (static_cast<std::size_t>(v.size()) < t.component) {
      throw DataError("term '" + label + "' needs component scores at t-" + std::to_string(lag));
    }
    return v(static_cast<Eigen::Index>(t.component - 1));
  };
  double v = read(t.lag);
  if (t.kind == 'A') v += read(t.lag + 1);
  return v;
}

}  // namespace detail

/// Component-space evaluation.
[[nodiscard]] inline double predict_c3i_components(const C3IModel& model, const ComponentInputs& in, double cci_prev, long t) {
  const Regime r = model.regime(t);
  double y = model.intercept(r) + model.delta * cci_prev;
  for (const auto& label : model.terms()) {
    const double c = model.coefficient(label, r);
    if (c == 0.0) continue;
    y += c * detail::term_value(*parse_term(label), in, label);
  }
  return y;
}

/// Topic-space weights of one regime: sum_l x_{t-l} . weights[l] + constant.
struct InfluenceRegime {
  std::array<Eigen::VectorXd, 3> weights;
  double constant = 0.0;
  double intercept = 0.0;
};

struct TopicInfluence {
  std::vector<std::string> topic_labels;
  InfluenceRegime pre;
  InfluenceRegime post;
  double delta = 0.0;
  BreakDesign brk;

  [[nodiscard]] const Eigen::VectorXd& A() const { return pre.weights[0]; }
  [[nodiscard]] const Eigen::VectorXd& B() const { return post.weights[0]; }
  [[nodiscard]] const Eigen::VectorXd& C() const { return post.weights[1]; }
  [[nodiscard]] const InfluenceRegime& regime(Regime r) const { return r == Regime::pre ? pre : post; }
  [[nodiscard]] std::size_t depth(Regime r) const {
    const auto& w = regime(r).weights;
    for (std::size_t l = 3; l-- > 0;)
      if (!w[l].isZero(0.0)) return l;
    return 0;
  }
};

/// Back-projects each regime's component coefficients onto topics. An A-term
/// with coefficient b adds b at its own lag and b one period further back.
[[nodiscard]] inline TopicInfluence topic_influence(const C3IModel& model, const PcaModel& pca) {
  TopicInfluence inf;
  inf.topic_labels = pca.topic_labels;
  inf.delta = model.delta;
  inf.brk = model.brk;
  for (Regime r : {Regime::pre, Regime::post}) {
    std::array<std::map<std::size_t, double>, 3> per_lag;
    for (const auto& label : model.terms()) {
      const double c = model.coefficient(label, r);
      if (c == 0.0) continue;
      const auto t = *parse_term(label);
      per_lag[t.lag][t.component] += c;
      if (t.kind == 'A') per_lag[t.lag + 1][t.component] += c;
    }
    InfluenceRegime& reg = r == Regime::pre ? inf.pre : inf.post;
    reg.intercept = model.intercept(r);
    for (std::size_t l = 0; l < 3; ++l) {
      auto bp = pca_back_project(pca, per_lag[l]);
      reg.weights[l] = bp.weights;
      reg.constant += bp.constant;
    }
  }
  return inf;
}

[[nodiscard]] inline TopicInfluence topic_influence(const C3IModel& model) {
  if (!model.pca) throw DataError("topic_influence: model carries no PCA");
  return topic_influence(model, *model.pca);
}

/// Topic-space evaluation. Lagged topic vectors may be empty when the
/// active regime does not read them.
[[nodiscard]] inline double predict_c3i(const TopicInfluence& inf, std::span<const double> x_t, std::span<const double> x_prev,
                                        std::span<const double> x_prev2, double cci_prev, long t) {
  if (t < 1) throw DataError("predict_c3i: t must be at least 1");
  const Regime r = inf.brk.dummy(t) > 0.0 ? Regime::post : Regime::pre;
  const auto& reg = inf.regime(r);
  const std::array<std::span<const double>, 3> xs{x_t, x_prev, x_prev2};
  double y = reg.intercept + inf.delta * cci_prev + reg.constant;
  const std::size_t n = inf.topic_labels.size();
  for (std::size_t l = 0; l < 3; ++l) {
    if (reg.weights[l].isZero(0.0)) continue;
    if (xs[l].size() != n) {
      throw DataError("predict_c3i: topic vector at t-" + std::to_string(l) + " has " + std::to_string(xs[l].size()) +
                      " entries, model has " + std::to_string(n));
    }
    y += Eigen::Map<const Eigen::VectorXd>(xs[l].data(), static_cast<Eigen::Index>(n)).dot(reg.weights[l]);
  }
  return y;
}

[[nodiscard]] inline double predict_c3i(const C3IModel& model, std::span<const double> x_t, std::span<const double> x_prev,
                                        double cci_prev, long t, std::span<const double> x_prev2 = {}) {
  return predict_c3i(topic_influence(model), x_t, x_prev, x_prev2, cci_prev, t);
}

/// Same prediction through projection onto components.
[[nodiscard]] inline double predict_c3i_via_components(const C3IModel& model, std::span<const double> x_t,
                                                       std::span<const double> x_prev, std::span<const double> x_prev2,
                                                       double cci_prev, long t) {
  if (!model.pca) throw DataError("predict_c3i_via_components: model carries no PCA");
  ComponentInputs in;
  in.current = project_row(*model.pca, x_t);
  if (!x_prev.empty()) in.prev = project_row(*model.pca, x_prev);
  if (!x_prev2.empty()) in.prev2 = project_row(*model.pca, x_prev2);
  return predict_c3i_components(model, in, cci_prev, t);
}

/// Search-volume part of the fit: prediction minus intercept and delta CCI_{t-1}.
[[nodiscard]] inline TimeSeries trends_contribution(const TopicInfluence& inf, const Panel& topics) {
  if (topics.labels() != inf.topic_labels) throw DataError("trends_contribution: panel topics differ from the model");
  const std::size_t depth = std::max(inf.depth(Regime::pre), inf.depth(Regime::post));
  if (topics.rows() <= depth) throw DataError("trends_contribution: panel is shorter than the model's lag depth");
  std::vector<double> out;
  for (std::size_t r = depth; r < topics.rows(); ++r) {
    const long t = inf.brk.t_of(topics.month_at(r));
    const Regime reg = inf.brk.dummy(t) > 0.0 ? Regime::post : Regime::pre;
    const auto& w = inf.regime(reg);
    double c = w.constant;
    for (std::size_t l = 0; l <= depth; ++l) {
      auto row = topics.row(r - l);
      c += Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())).dot(w.weights[l]);
    }
    out.push_back(c);
  }
  return TimeSeries::monthly("contribution", topics.month_at(depth), std::move(out));
}

[[nodiscard]] inline TimeSeries trends_contribution(const C3IModel& model, const Panel& topics) {
  return trends_contribution(topic_influence(model), topics);
}

struct PolarityEntry {
  std::string topic;
  double b = 0.0;
  double c = 0.0;
};

/// Topics split by the signs of (B, C); quadrants are (+,+), (+,-), (-,-), (-,+).
struct PolarityTable {
  std::array<std::vector<PolarityEntry>, 4> quadrants;
  std::vector<PolarityEntry> zero;

  [[nodiscard]] static const char* quadrant_name(std::size_t q) {
    static constexpr std::array<const char*, 4> names{"B+ C+", "B+ C-", "B- C-", "B- C+"};
    return names[q];
  }
};

[[nodiscard]] inline PolarityTable polarity_table(const TopicInfluence& inf) {
  PolarityTable out;
  for (std::size_t i = 0; i < inf.topic_labels.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    PolarityEntry e{inf.topic_labels[i], inf.B()(ii), inf.C()(ii)};
    if (e.b == 0.0 || e.c == 0.0) {
      out.zero.push_back(e);
      continue;
    }
    const std::size_t q = e.b > 0 ? (e.c > 0 ? 0 : 1) : (e.c < 0 ? 2 : 3);
    out.quadrants[q].push_back(e);
  }
  for (auto& q : out.quadrants) {
    std::stable_sort(q.begin(), q.end(), [](const PolarityEntry& a, const PolarityEntry& b) { return std::abs(a.b) > std::abs(b.b); });
  }
  return out;
}

}  // namespace c3i
