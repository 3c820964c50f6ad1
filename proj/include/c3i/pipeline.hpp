#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "c3i/breaks.hpp"
#include "c3i/causality.hpp"
#include "c3i/config.hpp"
#include "c3i/csv.hpp"
#include "c3i/diagnostics.hpp"
#include "c3i/error.hpp"
#include "c3i/model.hpp"
#include "c3i/pca.hpp"
#include "c3i/regression.hpp"
#include "c3i/series.hpp"
#include "c3i/stationarity.hpp"
#include "json.hpp"

namespace c3i {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "c3i.report/1";

enum class ErrorKind { none, config, data, numerical, other };

[[nodiscard]] inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::none: return 0;
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::numerical: return 4;
    case ErrorKind::other: return 1;
  }
  return 1;
}

/// Report tables are {"columns": [...], "rows": [[...], ...]}.
[[nodiscard]] inline Json make_table(std::vector<std::string> columns) {
  Json t;
  t["columns"] = std::move(columns);
  t["rows"] = Json::array();
  return t;
}

[[nodiscard]] inline bool is_table(const Json& j) {
  return j.is_object() && j.size() == 2 && j.contains("columns") && j.contains("rows");
}

/// Non-finite values are written as null.
[[nodiscard]] inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct RunReport {
  Json json;
  ErrorKind error_kind = ErrorKind::none;
  std::string failed_stage;
  std::string error;

  [[nodiscard]] bool ok() const { return error_kind == ErrorKind::none; }
};

struct PipelineInputs {
  std::vector<TimeSeries> topics;  ///< weekly or monthly, one per topic
  TimeSeries official = TimeSeries::monthly("CCI", {2000, 1}, {0.0});
  std::vector<std::string> warnings;
};

/// Typed results of the stages that completed.
struct PipelineArtifacts {
  std::optional<Panel> topics;  ///< monthly, whole sample
  MonthIndex estimation_end{};
  std::optional<PcaModel> pca;
  std::optional<ComponentSet> components;
  std::vector<IntegrationOrder> orders;
  std::vector<TimeSeries> base_terms;
  std::optional<VarFit> var;
  std::vector<GrangerResult> granger;
  std::vector<std::string> lag_terms;
  std::optional<BreakDesign> brk;
  std::optional<BreakTestResult> breaks;
  std::optional<TransitionalDesign> design;
  std::optional<StepwiseResult> stepwise;
  std::optional<WhiteResult> white;
  std::optional<BartlettResult> bartlett;
  std::optional<CointegrationResult> cointegration;
  std::optional<C3IModel> model;
  std::optional<TopicInfluence> influence;
  std::optional<TimeSeries> contribution;
};

struct PipelineRun {
  RunReport report;
  PipelineArtifacts artifacts;
};

[[nodiscard]] inline PipelineInputs load_inputs(const PipelineConfig& cfg) {
  if (cfg.topics.empty()) throw ConfigError("no topics CSV configured (key 'topics')");
  if (cfg.official.empty()) throw ConfigError("no official index CSV configured (key 'official')");
  PipelineInputs in;
  auto topics = ingest_csv(cfg.topics, cfg.topics_kind);
  auto official = ingest_csv(cfg.official, CsvKind::official_index);
  in.topics = std::move(topics.series);
  in.official = official.series.front().relabel("CCI");
  in.warnings = std::move(topics.warnings);
  return in;
}

struct Prediction {
  MonthIndex month;
  std::optional<double> official;
  double predicted = 0.0;
};

/// One-step predictions through the topic-space model for months [first, last],
/// each using the official index of the previous month.
[[nodiscard]] inline std::vector<Prediction> one_step_predictions(const TopicInfluence& inf, const Panel& topics, const TimeSeries& official,
                                                                  MonthIndex first, MonthIndex last) {
  if (topics.labels() != inf.topic_labels) throw DataError("predictions: topic columns differ from the model's topics");
  std::vector<Prediction> out;
  for (auto m = first; m <= last; m = m.next()) {
    const auto r = topics.position(m);
    if (!r) throw DataError("predictions: no topic values for " + m.str());
    const auto prev = official.at(m.plus(-1));
    if (!prev) throw DataError("predictions: official index missing for " + m.plus(-1).str());
    const auto x0 = topics.row(*r);
    const auto x1 = *r >= 1 ? topics.row(*r - 1) : std::vector<double>{};
    const auto x2 = *r >= 2 ? topics.row(*r - 2) : std::vector<double>{};
    out.push_back({m, official.at(m), predict_c3i(inf, x0, x1, x2, *prev, inf.brk.t_of(m))});
  }
  return out;
}

[[nodiscard]] inline Json predictions_table(const std::vector<Prediction>& preds) {
  auto t = make_table({"Month", "Official", "Predicted", "Error"});
  for (const auto& p : preds) {
    t["rows"].push_back(Json::array({p.month.str(), p.official ? Json(*p.official) : Json(nullptr), p.predicted,
                                     p.official ? Json(*p.official - p.predicted) : Json(nullptr)}));
  }
  return t;
}

/// RMSE and MAE over months with an official value.
[[nodiscard]] inline std::optional<std::pair<double, double>> prediction_accuracy(const std::vector<Prediction>& preds) {
  double sse = 0.0, sae = 0.0;
  std::size_t n = 0;
  for (const auto& p : preds) {
    if (!p.official) continue;
    const double e = *p.official - p.predicted;
    sse += e * e;
    sae += std::abs(e);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return std::pair{std::sqrt(sse / static_cast<double>(n)), sae / static_cast<double>(n)};
}

/// Rebuilds the topic-space model stored in a report's "model" and
/// "influence" sections.
[[nodiscard]] inline TopicInfluence influence_from_report(const Json& report) {
  if (!report.contains("influence") || !report.contains("model")) {
    throw DataError("report has no fitted topic-space model (sections 'model' and 'influence' are required)");
  }
  try {
    const auto& m = report.at("model");
    const auto& in = report.at("influence");
    TopicInfluence inf;
    inf.topic_labels = in.at("topics").get<std::vector<std::string>>();
    inf.delta = in.at("delta").get<double>();
    inf.brk.t0 = m.at("t0").get<long>();
    inf.brk.origin = MonthIndex::parse(m.at("origin").get<std::string>());
    const auto n = static_cast<Eigen::Index>(inf.topic_labels.size());
    for (auto [key, reg] : {std::pair{"pre", &inf.pre}, std::pair{"post", &inf.post}}) {
      const auto& r = in.at(key);
      reg->intercept = r.at("intercept").get<double>();
      reg->constant = r.at("constant").get<double>();
      const auto& w = r.at("weights");
      if (w.size() != 3) throw DataError(std::string("influence.") + key + ".weights must hold 3 lags");
      for (std::size_t l = 0; l < 3; ++l) {
        const auto v = w[l].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(v.size()) != n) throw DataError(std::string("influence.") + key + ".weights: wrong length");
        reg->weights[l] = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
      }
    }
    return inf;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model in report: ") + e.what());
  }
}

namespace detail {

inline Json months_json(MonthIndex a, MonthIndex b) {
  Json j;
  j["first"] = a.str();
  j["last"] = b.str();
  j["count"] = b.minus(a) + 1;
  return j;
}

inline Json regression_table(const OlsFit& fit) {
  auto t = make_table({"Variable", "Coef.", "Std. Err.", "t", "P>|t|", "CI 95% low", "CI 95% high"});
  for (std::size_t j = 0; j < fit.k; ++j) {
    t["rows"].push_back(Json::array({fit.term_labels[j], num(fit.coefficients[j]), num(fit.standard_errors[j]), num(fit.t_values[j]),
                                     num(fit.p_values[j]), num(fit.confidence_intervals_95[j].first),
                                     num(fit.confidence_intervals_95[j].second)}));
  }
  return t;
}

inline Json weights_json(const InfluenceRegime& r) {
  Json j;
  j["intercept"] = r.intercept;
  j["constant"] = r.constant;
  Json w = Json::array();
  for (const auto& v : r.weights) w.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  j["weights"] = std::move(w);
  return j;
}

class StageRunner {
 public:
  StageRunner(RunReport& report, Json& sections) : report_(report), sections_(sections) {}

  bool run(const std::string& name, const std::function<Json()>& body) {
    if (!report_.ok()) return false;
    try {
      Json section = body();
      if (!section.is_null()) sections_[name] = std::move(section);
      completed_.push_back(name);
      return true;
    } catch (const ConfigError& e) {
      fail(name, ErrorKind::config, e.what());
    } catch (const DataError& e) {
      fail(name, ErrorKind::data, e.what());
    } catch (const NumericalError& e) {
      fail(name, ErrorKind::numerical, e.what());
    } catch (const std::exception& e) {
      fail(name, ErrorKind::other, e.what());
    }
    return false;
  }

  [[nodiscard]] const std::vector<std::string>& completed() const { return completed_; }

 private:
  void fail(const std::string& name, ErrorKind kind, const std::string& what) {
    report_.error_kind = kind;
    report_.failed_stage = name;
    report_.error = what;
  }

  RunReport& report_;
  Json& sections_;
  std::vector<std::string> completed_;
};

}  // namespace detail

/// Runs every stage in order on in-memory inputs. A failing stage stops the
/// run; the report then holds every earlier section plus the failure.
[[nodiscard]] inline PipelineRun run_pipeline(const PipelineConfig& cfg, const PipelineInputs& inputs) {
  PipelineRun run;
  auto& rep = run.report;
  auto& art = run.artifacts;
  Json sections = Json::object();
  std::vector<std::string> warnings = inputs.warnings;
  detail::StageRunner stages(rep, sections);

  MonthIndex sample_start{}, sample_end{};
  std::optional<Panel> est_topics;
  Deterministic det = cfg.adf_deterministic;

  stages.run("resample", [&] {
    if (inputs.topics.empty()) throw DataError("no topic series");
    Json s;
    std::vector<TimeSeries> monthly;
    if (inputs.topics.front().frequency() == Frequency::weekly) {
      s["input"] = "weekly";
      s["weeks"] = inputs.topics.front().size();
      s["week_rule"] = cfg.week_rule == WeekAssignment::by_last_day ? "last_day" : "first_day";
      for (const auto& t : inputs.topics) monthly.push_back(resample_weekly_to_monthly(t, cfg.week_rule));
    } else {
      s["input"] = "monthly";
      monthly = inputs.topics;
    }
    auto panel = align(std::span<const TimeSeries>(monthly));
    sample_start = std::max(panel.start(), inputs.official.start_month());
    sample_end = std::min(panel.end(), inputs.official.end_month());
    if (sample_end < sample_start) {
      throw DataError("topics (" + panel.start().str() + ".." + panel.end().str() + ") and official index (" +
                      inputs.official.start_month().str() + ".." + inputs.official.end_month().str() + ") do not overlap");
    }
    art.topics = panel.slice(sample_start, sample_end);
    art.estimation_end = sample_end;
    if (cfg.holdout_start) {
      if (*cfg.holdout_start <= sample_start.plus(1) || *cfg.holdout_start > sample_end) {
        throw ConfigError("holdout_start " + cfg.holdout_start->str() + " must fall inside the sample " + sample_start.str() +
                          ".." + sample_end.str());
      }
      art.estimation_end = cfg.holdout_start->plus(-1);
    }
    est_topics = art.topics->slice(sample_start, art.estimation_end);
    s["topics"] = art.topics->labels();
    s["sample"] = detail::months_json(sample_start, sample_end);
    s["estimation"] = detail::months_json(sample_start, art.estimation_end);
    return s;
  });

  stages.run("pca", [&] {
    art.pca = pca_fit(*est_topics, cfg.k_components);
    const auto& p = *art.pca;
    Json s;
    s["components"] = p.components();
    s["topics"] = p.topics();
    s["jacobi_sweeps"] = p.sweeps;
    auto ev = make_table({"Component", "Eigenvalue", "Proportion", "Cumulative"});
    for (std::size_t i = 0; i < p.components(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      ev["rows"].push_back(Json::array({component_label(i + 1), p.eigenvalues(ii), p.proportions(ii), p.cumulative(ii)}));
    }
    s["eigenvalues"] = std::move(ev);
    auto scree = make_table({"Index", "Eigenvalue"});
    for (Eigen::Index i = 0; i < p.all_eigenvalues.size(); ++i) scree["rows"].push_back(Json::array({i + 1, p.all_eigenvalues(i)}));
    s["scree"] = std::move(scree);
    std::vector<std::string> cols{"Topic"};
    for (std::size_t i = 1; i <= p.components(); ++i) cols.push_back(component_label(i));
    auto load = make_table(cols);
    for (std::size_t t = 0; t < p.topics(); ++t) {
      Json row = Json::array({p.topic_labels[t]});
      for (std::size_t i = 0; i < p.components(); ++i) row.push_back(p.loadings(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)));
      load["rows"].push_back(std::move(row));
    }
    s["loadings"] = std::move(load);
    return s;
  });

  stages.run("suitability", [&] {
    Json s;
    try {
      s["kmo"] = kmo_statistic(*est_topics);
      auto smc = smc_vector(*est_topics);
      auto t = make_table({"Topic", "SMC"});
      for (std::size_t i = 0; i < smc.size(); ++i) t["rows"].push_back(Json::array({est_topics->labels()[i], smc[i]}));
      s["smc"] = std::move(t);
    } catch (const Error& e) {
      warnings.push_back(std::string("suitability checks skipped: ") + e.what());
      s["skipped"] = e.what();
    }
    return s;
  });

  stages.run("projection", [&] {
    art.components = pca_project(*art.pca, *art.topics);
    const auto& cs = art.components->series;
    std::vector<std::string> cols{"Month"};
    for (const auto& l : cs.labels()) cols.push_back(l);
    auto t = make_table(cols);
    for (std::size_t r = 0; r < cs.rows(); ++r) {
      Json row = Json::array({cs.month_at(r).str()});
      for (std::size_t j = 0; j < cs.cols(); ++j) row.push_back(cs.value(r, j));
      t["rows"].push_back(std::move(row));
    }
    Json s;
    s["components"] = std::move(t);
    return s;
  });

  std::optional<TimeSeries> cci_est;
  stages.run("stationarity", [&] {
    AdfSpec spec;
    spec.deterministic = det;
    spec.max_lag = cfg.adf_max_lag;
    auto t = make_table({"Variable", "Level", "Level Z(t)", "Level p", "Level lags", "Difference", "Difference Z(t)", "Difference p", "Order",
                         "Base term"});
    auto add = [&](const TimeSeries& s, const IntegrationOrder& io, const std::string& base) {
      const auto& lvl = io.evidence[0];
      const bool lvl_rej = lvl.p_value < cfg.stationarity_level;
      Json row = Json::array({s.label(), lvl_rej ? "I(0)" : "I(1)", num(lvl.statistic), num(lvl.p_value), lvl.lags_used});
      if (io.evidence.size() > 1) {
        const auto& d = io.evidence[1];
        row.push_back(d.p_value < cfg.stationarity_level ? "I(0)" : "I(1)");
        row.push_back(num(d.statistic));
        row.push_back(num(d.p_value));
      } else {
        row.push_back(nullptr);
        row.push_back(nullptr);
        row.push_back(nullptr);
      }
      row.push_back(to_string(io.order));
      row.push_back(base);
      t["rows"].push_back(std::move(row));
    };
    const auto& cs = art.components->series;
    for (std::size_t j = 0; j < cs.cols(); ++j) {
      const auto full = cs.series(j);
      const auto est = TimeSeries::monthly(full.label(), full.start_month(),
                                           std::vector<double>(full.values().begin(),
                                                               full.values().begin() + (art.estimation_end.minus(full.start_month()) + 1)));
      auto io = integration_order(est, spec, cfg.stationarity_level, cfg.max_differences);
      art.orders.push_back(io);
      if (io.order == Order::I0) {
        art.base_terms.push_back(a_transform(full, cfg.a_transform).relabel("A" + std::to_string(j + 1)));
      } else {
        art.base_terms.push_back(full);
      }
      add(est, io, art.base_terms.back().label());
    }
    std::vector<double> cv;
    for (auto m = sample_start; m <= art.estimation_end; m = m.next()) cv.push_back(*inputs.official.at(m));
    cci_est = TimeSeries::monthly("CCI", sample_start, cv);
    add(*cci_est, integration_order(*cci_est, spec, cfg.stationarity_level, cfg.max_differences), "");
    Json s;
    s["deterministic"] = to_string(det);
    s["level"] = cfg.stationarity_level;
    s["a_transform"] = to_string(cfg.a_transform);
    s["adf"] = std::move(t);
    return s;
  });

  stages.run("var", [&] {
    std::vector<TimeSeries> vars;
    for (const auto& b : art.base_terms) vars.push_back(b);
    vars.push_back(*cci_est);
    auto panel = align(std::span<const TimeSeries>(vars));
    panel = panel.slice(panel.start(), std::min(panel.end(), art.estimation_end));
    art.var = var_fit(panel, cfg.var_lag);
    auto t = make_table({"Equation", "Variable", "Lag", "Coef.", "Std. Err.", "z", "P>|z|"});
    for (const auto& r : art.var->table) {
      t["rows"].push_back(Json::array({r.equation, r.variable, r.lag, num(r.coef), num(r.std_err), num(r.z), num(r.p_value)}));
    }
    Json s;
    s["lag_order"] = cfg.var_lag;
    s["variables"] = art.var->variables;
    s["observations"] = art.var->nobs;
    s["coefficients"] = std::move(t);
    return s;
  });

  stages.run("granger", [&] {
    auto t = make_table({"Equation", "Excluded", "chi2", "df", "Prob > chi2"});
    std::vector<std::string> significant;
    for (const auto& b : art.base_terms) {
      auto g = granger_exclusion(*art.var, "CCI", b.label());
      if (g.p_value < cfg.granger_level) significant.push_back(b.label());
      art.granger.push_back(g);
    }
    art.granger.push_back(granger_exclusion(*art.var, "CCI", "ALL"));
    for (const auto& g : art.granger) t["rows"].push_back(Json::array({g.equation, g.excluded, num(g.chi2), g.df, num(g.p_value)}));
    if (cfg.lag_terms) {
      for (const auto& l : *cfg.lag_terms) {
        if (std::none_of(art.base_terms.begin(), art.base_terms.end(), [&](const TimeSeries& b) { return b.label() == l; })) {
          throw ConfigError("lag_terms: '" + l + "' is not a base term of this run");
        }
      }
      art.lag_terms = *cfg.lag_terms;
    } else {
      art.lag_terms = significant;
    }
    Json s;
    s["level"] = cfg.granger_level;
    s["tests"] = std::move(t);
    s["significant"] = significant;
    s["lag_terms"] = art.lag_terms;
    s["lag_terms_source"] = cfg.lag_terms ? "config" : "granger";
    return s;
  });

  stages.run("break", [&] {
    BreakDesign brk;
    brk.origin = cfg.break_origin.value_or(sample_start);
    brk.t0 = cfg.break_t0.value_or(1);
    auto design = build_transitional_design(art.base_terms, art.lag_terms, inputs.official, brk, art.estimation_end);
    const auto cols = design.break_test_columns();
    const Eigen::MatrixXd xr = select_columns(design.x, cols);
    Json s;
    if (!cfg.break_t0) {
      auto search = search_break(design.y, xr, design.months, brk.origin, cfg.break_trim);
      brk.t0 = search.t0;
      auto path = make_table({"t0", "Month", "Chow F"});
      for (const auto& [t0, f] : search.chow_path) path["rows"].push_back(Json::array({t0, brk.month_of(t0).str(), num(f)}));
      s["search"] = std::move(path);
    }
    const long t_first = brk.t_of(design.months.front()), t_last = brk.t_of(design.months.back());
    if (brk.t0 < t_first || brk.t0 >= t_last) {
      throw ConfigError("break_t0 = " + std::to_string(brk.t0) + " leaves a regime empty: the estimation sample spans t = " +
                        std::to_string(t_first) + ".." + std::to_string(t_last) + " (origin " + brk.origin.str() + ")");
    }
    auto r = structural_break_tests(design.y, xr, design.months, brk);
    art.brk = brk;
    art.breaks = r;
    auto t = make_table({"Test", "Statistic", "df", "p"});
    t["rows"].push_back(Json::array({"Chow", num(r.chow_f), std::to_string(r.chow_df1) + ", " + std::to_string(r.chow_df2), num(r.chow_p)}));
    t["rows"].push_back(Json::array({"Wald", num(r.wald), std::to_string(r.df_chi), num(r.wald_p)}));
    t["rows"].push_back(Json::array({"Likelihood Ratio", num(r.lr), std::to_string(r.df_chi), num(r.lr_p)}));
    s["t0"] = brk.t0;
    s["t0_source"] = cfg.break_t0 ? "config" : "search";
    s["origin"] = brk.origin.str();
    s["last_pre_break_month"] = brk.last_pre_month().str();
    s["observations"] = r.n;
    s["pre_break_observations"] = r.n_pre;
    std::vector<std::string> regressors;
    for (auto c : cols) regressors.push_back(design.labels[c]);
    s["regressors"] = regressors;
    s["tests"] = std::move(t);
    return s;
  });

  stages.run("design", [&] {
    art.design = build_transitional_design(art.base_terms, art.lag_terms, inputs.official, *art.brk, art.estimation_end);
    Json s;
    s["columns"] = art.design->labels;
    s["rows"] = detail::months_json(art.design->months.front(), art.design->months.back());
    return s;
  });

  stages.run("stepwise", [&] {
    std::set<std::string> keep(cfg.force_keep.begin(), cfg.force_keep.end());
    keep.insert(kDummyLabel);
    keep.insert(kCciLagLabel);
    const auto& d = *art.design;
    art.stepwise = stepwise_ols(d.y, d.x, d.labels, cfg.stepwise_threshold, keep);
    for (const auto& w : art.stepwise->warnings) warnings.push_back(w);
    const auto& fit = art.stepwise->fit;
    auto trace = make_table({"Step", "Dropped", "p-value", "Terms remaining", "R2", "Adj R2"});
    for (const auto& st : art.stepwise->trace) {
      trace["rows"].push_back(Json::array({st.step, st.dropped, num(st.p_value), st.terms_remaining, num(st.r_squared), num(st.adjusted_r_squared)}));
    }
    Json s;
    s["threshold"] = cfg.stepwise_threshold;
    s["always_kept"] = std::vector<std::string>(keep.begin(), keep.end());
    s["trace"] = std::move(trace);
    s["regression"] = detail::regression_table(fit);
    s["observations"] = fit.n;
    s["terms"] = fit.k;
    s["r_squared"] = num(fit.r_squared);
    s["adjusted_r_squared"] = num(fit.adjusted_r_squared);
    s["root_residual"] = num(fit.root_residual);
    s["residual_sum_sq"] = num(fit.residual_sum_sq);
    return s;
  });

  stages.run("diagnostics", [&] {
    const auto& fit = art.stepwise->fit;
    const Eigen::MatrixXd x = select_columns(art.design->x, art.stepwise->columns);
    art.white = white_test(fit, x);
    for (const auto& w : art.white->warnings) warnings.push_back("white test: " + w);
    const std::size_t max_lag = std::min(cfg.bartlett_max_lag, (fit.n - 1) / 2);
    art.bartlett = bartlett_acf_check(fit.residuals, max_lag);
    art.cointegration = engle_granger(fit.residuals);
    Json s;
    Json w;
    w["chi2"] = num(art.white->chi2);
    w["df"] = art.white->df;
    w["p"] = num(art.white->p_value);
    w["cross_products"] = art.white->cross_products;
    s["white"] = std::move(w);
    auto acf = make_table({"Lag", "ACF", "Band", "Within"});
    for (const auto& l : art.bartlett->lags) acf["rows"].push_back(Json::array({l.lag, num(l.acf), num(l.band), l.within}));
    s["acf"] = std::move(acf);
    s["acf_breaches"] = art.bartlett->breaches;
    s["no_autocorrelation"] = art.bartlett->no_autocorrelation;
    const auto& a = art.cointegration->adf;
    auto ct = make_table({"Z(t)", "p", "1% critical value", "5% critical value", "10% critical value", "Lags", "Observations"});
    ct["rows"].push_back(Json::array({num(a.statistic), num(a.p_value), a.critical_values.one, a.critical_values.five, a.critical_values.ten,
                                      a.lags_used, a.nobs}));
    s["cointegration"] = std::move(ct);
    s["cointegrated"] = art.cointegration->cointegrated;
    return s;
  });

  stages.run("model", [&] {
    art.model = fit_c3i(art.stepwise->fit, *art.brk, *art.pca);
    art.model->force_keep = cfg.force_keep;
    const auto& m = *art.model;
    Json s;
    s["t0"] = m.brk.t0;
    s["origin"] = m.brk.origin.str();
    s["alpha"] = m.alpha;
    s["gamma0"] = m.gamma0;
    s["delta"] = m.delta;
    s["intercept_pre"] = m.intercept(Regime::pre);
    s["intercept_post"] = m.intercept(Regime::post);
    s["intercept_pre_se"] = m.alpha_se;
    s["intercept_post_se"] = m.post_intercept_se;
    s["delta_se"] = m.delta_se;
    auto t = make_table({"Term", "Regime 1", "Regime 2"});
    for (const auto& term : m.terms()) t["rows"].push_back(Json::array({term, m.coefficient(term, Regime::pre), m.coefficient(term, Regime::post)}));
    s["coefficients"] = std::move(t);
    return s;
  });

  const bool has_a_terms = art.model && std::any_of(art.model->retained_terms.begin(), art.model->retained_terms.end(), [](const std::string& l) {
                             auto b = l.rfind("du_", 0) == 0 ? l.substr(3) : l;
                             auto t = parse_term(b);
                             return t && t->kind == 'A';
                           });
  const bool projectable = cfg.a_transform == ATransformMode::pairwise || !has_a_terms;
  if (rep.ok() && !projectable) {
    warnings.push_back("running-sum A-terms have no finite topic expansion; influence, polarity, contribution and holdout stages skipped");
  }

  if (projectable) {
    stages.run("influence", [&] {
      art.influence = topic_influence(*art.model);
      const auto& inf = *art.influence;
      auto t = make_table({"Topic", "A", "B", "C", "pre t-1", "pre t-2", "post t-2"});
      for (std::size_t i = 0; i < inf.topic_labels.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        t["rows"].push_back(Json::array({inf.topic_labels[i], inf.A()(ii), inf.B()(ii), inf.C()(ii), inf.pre.weights[1](ii),
                                         inf.pre.weights[2](ii), inf.post.weights[2](ii)}));
      }
      Json s;
      s["delta"] = inf.delta;
      s["topics"] = inf.topic_labels;
      s["pre"] = detail::weights_json(inf.pre);
      s["post"] = detail::weights_json(inf.post);
      s["matrices"] = std::move(t);
      return s;
    });

    stages.run("polarity", [&] {
      auto p = polarity_table(*art.influence);
      auto t = make_table({"Quadrant", "Topic", "B", "C"});
      for (std::size_t q = 0; q < 4; ++q)
        for (const auto& e : p.quadrants[q]) t["rows"].push_back(Json::array({PolarityTable::quadrant_name(q), e.topic, e.b, e.c}));
      for (const auto& e : p.zero) t["rows"].push_back(Json::array({"zero", e.topic, e.b, e.c}));
      Json s;
      s["table"] = std::move(t);
      return s;
    });

    stages.run("contribution", [&] {
      art.contribution = trends_contribution(*art.influence, *art.topics);
      const auto& d = *art.design;
      const auto& fit = art.stepwise->fit;
      const auto& m = *art.model;
      auto t = make_table({"Month", "Official", "Fitted", "Residual", "Contribution"});
      double gap = 0.0;
      for (std::size_t r = 0; r < d.rows(); ++r) {
        const double c = *art.contribution->at(d.months[r]);
        const double rebuilt = m.intercept(m.regime(m.brk.t_of(d.months[r]))) + m.delta * d.cci_prev[r] + c;
        gap = std::max(gap, std::abs(rebuilt - fit.fitted[r]));
        t["rows"].push_back(Json::array({d.months[r].str(), d.y[r], fit.fitted[r], fit.residuals[r], c}));
      }
      Json s;
      s["series"] = std::move(t);
      s["decomposition_max_abs_gap"] = gap;
      return s;
    });

    if (cfg.holdout_start) {
      stages.run("holdout", [&] {
        auto preds = one_step_predictions(*art.influence, *art.topics, inputs.official, *cfg.holdout_start, art.topics->end());
        Json s;
        s["start"] = cfg.holdout_start->str();
        s["predictions"] = predictions_table(preds);
        if (auto acc = prediction_accuracy(preds)) {
          s["rmse"] = acc->first;
          s["mae"] = acc->second;
        }
        return s;
      });
    }
  }

  Json& j = rep.json;
  j["schema"] = kReportSchema;
  j["status"] = rep.ok() ? "ok" : "failed";
  if (!rep.ok()) {
    j["failed_stage"] = rep.failed_stage;
    j["error"] = rep.error;
  }
  j["config"] = cfg.to_json();
  j["warnings"] = warnings;
  j["stages_completed"] = stages.completed();
  for (auto& [k, v] : sections.items()) j[k] = std::move(v);
  return run;
}

/// Loads the configured CSVs, then runs the stages. Ingestion failures yield
/// a report with only the "ingest" failure recorded.
[[nodiscard]] inline PipelineRun run_pipeline(const PipelineConfig& cfg) {
  PipelineInputs inputs;
  try {
    inputs = load_inputs(cfg);
  } catch (const Error& e) {
    PipelineRun run;
    auto& rep = run.report;
    rep.error_kind = dynamic_cast<const ConfigError*>(&e) ? ErrorKind::config
                     : dynamic_cast<const DataError*>(&e) ? ErrorKind::data
                                                          : ErrorKind::numerical;
    rep.failed_stage = "ingest";
    rep.error = e.what();
    rep.json["schema"] = kReportSchema;
    rep.json["status"] = "failed";
    rep.json["failed_stage"] = rep.failed_stage;
    rep.json["error"] = rep.error;
    rep.json["config"] = cfg.to_json();
    rep.json["warnings"] = Json::array();
    rep.json["stages_completed"] = Json::array();
    return run;
  }
  return run_pipeline(cfg, inputs);
}

}  // namespace c3i
