#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "c3i/c3i.hpp"
#include "synthetic.hpp"

namespace {

using c3i::Json;

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

/// Monthly panel from a CSV of either topic kind.
c3i::Panel load_monthly(const std::string& path, const std::string& kind, c3i::WeekAssignment rule) {
  auto data = c3i::ingest_csv(path, c3i::parse_csv_kind(kind));
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
  if (data.kind != c3i::CsvKind::weekly_topics) return data.panel();
  std::vector<c3i::TimeSeries> monthly;
  for (const auto& s : data.series) monthly.push_back(c3i::resample_weekly_to_monthly(s, rule));
  return c3i::align(std::span<const c3i::TimeSeries>(monthly));
}

c3i::TimeSeries pick(const c3i::Panel& p, const std::string& column) {
  if (column.empty()) {
    if (p.cols() != 1) throw c3i::ConfigError("input has " + std::to_string(p.cols()) + " value columns; choose one with --column");
    return p.series(0);
  }
  auto j = p.find(column);
  if (!j) throw c3i::ConfigError("no column '" + column + "' in input");
  return p.series(*j);
}

c3i::WeekAssignment week_rule(const std::string& s) {
  if (s == "last_day") return c3i::WeekAssignment::by_last_day;
  if (s == "first_day") return c3i::WeekAssignment::by_first_day;
  throw c3i::ConfigError("week rule '" + s + "' (last_day|first_day)");
}

Json adf_json(const std::string& label, const c3i::AdfResult& r) {
  Json j;
  j["variable"] = label;
  j["deterministic"] = c3i::to_string(r.deterministic);
  j["statistic"] = c3i::num(r.statistic);
  j["p_value"] = c3i::num(r.p_value);
  j["lags"] = r.lags_used;
  j["observations"] = r.nobs;
  j["critical_values"] = {{"1%", r.critical_values.one}, {"5%", r.critical_values.five}, {"10%", r.critical_values.ten}};
  return j;
}

struct PipelineArgs {
  std::string config;
  std::string output_dir;
  std::vector<std::string> overrides;
};

/// Precedence: config file, then the environment, then the command line.
c3i::PipelineConfig resolve_config(const PipelineArgs& a) {
  c3i::PipelineConfig cfg = a.config.empty() ? c3i::PipelineConfig{} : c3i::load_config_file(a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw c3i::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (const char* env = std::getenv(c3i::kOutputDirEnv); env && *env) cfg.set("output_dir", env);
  if (!a.output_dir.empty()) cfg.set("output_dir", a.output_dir);
  return cfg;
}

c3i::EmitOptions emit_options(const c3i::PipelineConfig& cfg) { return {cfg.emit_json, cfg.emit_csv, cfg.emit_svg}; }

int finish(const c3i::RunReport& rep, const c3i::PipelineConfig& cfg) {
  auto files = c3i::emit_report(rep.json, cfg.output_dir, emit_options(cfg));
  for (const auto& w : rep.json["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
  std::cerr << "wrote " << files.paths.size() << " files to " << cfg.output_dir << '\n';
  if (!rep.ok()) {
    std::cerr << "error: stage '" << rep.failed_stage << "' failed: " << rep.error << '\n';
    return c3i::exit_code(rep.error_kind);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consumer confidence index from search-volume topics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "c3i 1.0.0");

  std::string topics, kind = "monthly", column, out, rule = "last_day", deterministic = "constant";
  std::size_t k = 9, lags = 2;
  std::optional<std::size_t> max_lag, lag_order;

  auto* resample = app.add_subcommand("resample", "Average weekly topic series into calendar months");
  resample->add_option("--topics", topics, "weekly topics CSV")->required();
  resample->add_option("--week-rule", rule, "month of a week: last_day|first_day");
  resample->add_option("-o,--out", out, "output CSV (default stdout)");

  auto* pca = app.add_subcommand("pca", "Principal components of monthly topics");
  pca->add_option("--topics", topics, "topics CSV")->required();
  pca->add_option("--kind", kind, "weekly|monthly");
  pca->add_option("-k,--components", k, "components to keep");
  pca->add_option("--week-rule", rule, "month of a week: last_day|first_day");

  auto* adf = app.add_subcommand("adf", "Augmented Dickey-Fuller test on one monthly series");
  adf->add_option("--input", topics, "monthly CSV")->required();
  adf->add_option("--column", column, "value column (optional when there is one)");
  adf->add_option("--deterministic", deterministic, "none|constant|trend");
  adf->add_option("--max-lag", max_lag, "largest lag searched by AIC");
  adf->add_option("--lags", lag_order, "fixed lag order");

  auto* var = app.add_subcommand("var", "Vector autoregression on every column of a monthly CSV");
  var->add_option("--input", topics, "monthly CSV")->required();
  var->add_option("-p,--lags", lags, "lag order");

  std::string target;
  auto* granger = app.add_subcommand("granger", "Granger exclusion tests for one equation of a VAR");
  granger->add_option("--input", topics, "monthly CSV")->required();
  granger->add_option("-p,--lags", lags, "lag order");
  granger->add_option("--target", target, "equation variable")->required();

  std::string y_column, origin;
  std::optional<long> t0;
  double trim = 0.15;
  auto* brk = app.add_subcommand("break", "Chow, Wald and likelihood-ratio break tests");
  brk->add_option("--input", topics, "monthly CSV: dependent and regressor columns")->required();
  brk->add_option("--y", y_column, "dependent column")->required();
  brk->add_option("--t0", t0, "last period of the first regime; searched when omitted");
  brk->add_option("--origin", origin, "month with t = 1 (default: first month)");
  brk->add_option("--trim", trim, "search trimming fraction");

  PipelineArgs pa;
  auto add_pipeline_options = [&](CLI::App* sub) {
    sub->add_option("-c,--config", pa.config, "config file (key = value lines)");
    sub->add_option("-o,--output-dir", pa.output_dir, "output directory (overrides config and $C3I_OUTPUT_DIR)");
    sub->add_option("--set", pa.overrides, "override a config key: key=value");
  };
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write the report");
  add_pipeline_options(pipeline);
  auto* fit = app.add_subcommand("fit", "Run the pipeline and print the fitted model");
  add_pipeline_options(fit);

  std::string report_path, official;
  auto* predict = app.add_subcommand("predict", "One-step predictions from the model stored in a report");
  predict->add_option("--report", report_path, "report.json holding a fitted model")->required();
  predict->add_option("--topics", topics, "topics CSV")->required();
  predict->add_option("--kind", kind, "weekly|monthly");
  predict->add_option("--official", official, "official index CSV (previous-month values)")->required();
  predict->add_option("--from", origin, "first month to predict (default: earliest possible)");
  predict->add_option("--week-rule", rule, "month of a week: last_day|first_day");
  predict->add_option("-o,--out", out, "output CSV (default stdout)");

  std::string emit_dir, formats = "json,csv,svg";
  auto* report = app.add_subcommand("report", "Re-emit tables and plots from an existing report.json");
  report->add_option("--report", report_path, "report.json")->required();
  report->add_option("-o,--output-dir", emit_dir, "output directory")->required();
  report->add_option("--formats", formats, "comma list of json,csv,svg");

  c3i::synthetic::Spec sim;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset with known coefficients");
  simulate->add_option("-o,--output-dir", emit_dir, "output directory")->required();
  simulate->add_option("--seed", sim.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto wr = week_rule(rule);
    if (*resample) {
      auto panel = load_monthly(topics, "weekly", wr);
      if (out.empty()) {
        c3i::write_panel_csv(std::cout, panel);
      } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw c3i::DataError("cannot write '" + out + "'");
        c3i::write_panel_csv(f, panel);
      }
    } else if (*pca) {
      auto panel = load_monthly(topics, kind, wr);
      auto m = c3i::pca_fit(panel, k);
      Json j;
      j["topics"] = m.topic_labels;
      j["eigenvalues"] = std::vector<double>(m.all_eigenvalues.data(), m.all_eigenvalues.data() + m.all_eigenvalues.size());
      j["proportions"] = std::vector<double>(m.proportions.data(), m.proportions.data() + m.proportions.size());
      j["cumulative"] = std::vector<double>(m.cumulative.data(), m.cumulative.data() + m.cumulative.size());
      Json load = Json::array();
      for (Eigen::Index i = 0; i < m.loadings.cols(); ++i) {
        Eigen::VectorXd c = m.loadings.col(i);
        load.push_back(std::vector<double>(c.data(), c.data() + c.size()));
      }
      j["loadings"] = std::move(load);
      print(j);
    } else if (*adf) {
      auto s = pick(load_monthly(topics, "monthly", wr), column);
      c3i::AdfSpec spec;
      spec.deterministic = c3i::parse_deterministic(deterministic);
      spec.max_lag = max_lag;
      spec.lag_order = lag_order;
      print(adf_json(s.label(), c3i::adf_test(s, spec)));
    } else if (*var || *granger) {
      auto fitv = c3i::var_fit(load_monthly(topics, "monthly", wr), lags);
      if (*var) {
        Json j;
        j["variables"] = fitv.variables;
        j["lag_order"] = fitv.lag_order;
        j["observations"] = fitv.nobs;
        auto t = c3i::make_table({"Equation", "Variable", "Lag", "Coef.", "Std. Err.", "z", "P>|z|"});
        for (const auto& r : fitv.table)
          t["rows"].push_back(Json::array({r.equation, r.variable, r.lag, c3i::num(r.coef), c3i::num(r.std_err), c3i::num(r.z), c3i::num(r.p_value)}));
        j["coefficients"] = std::move(t);
        print(j);
      } else {
        auto t = c3i::make_table({"Equation", "Excluded", "chi2", "df", "Prob > chi2"});
        std::vector<std::string> excluded;
        for (const auto& v : fitv.variables)
          if (v != target) excluded.push_back(v);
        excluded.emplace_back("ALL");
        for (const auto& x : excluded) {
          auto g = c3i::granger_exclusion(fitv, target, x);
          t["rows"].push_back(Json::array({g.equation, g.excluded, c3i::num(g.chi2), g.df, c3i::num(g.p_value)}));
        }
        print(t);
      }
    } else if (*brk) {
      auto panel = load_monthly(topics, "monthly", wr);
      const auto yi = panel.find(y_column);
      if (!yi) throw c3i::ConfigError("no column '" + y_column + "' in input");
      const auto n = static_cast<Eigen::Index>(panel.rows());
      Eigen::MatrixXd x(n, static_cast<Eigen::Index>(panel.cols()));
      x.col(0).setOnes();
      Eigen::Index c = 1;
      for (std::size_t j = 0; j < panel.cols(); ++j) {
        if (j == *yi) continue;
        auto col = panel.column(j);
        x.col(c++) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
      }
      auto yv = panel.column(*yi);
      const auto months = panel.index();
      c3i::BreakDesign d;
      d.origin = origin.empty() ? panel.start() : c3i::MonthIndex::parse(origin);
      Json j;
      if (t0) {
        d.t0 = *t0;
      } else {
        auto s = c3i::search_break(yv, x, months, d.origin, trim);
        d.t0 = s.t0;
        j["searched"] = true;
      }
      auto r = c3i::structural_break_tests(yv, x, months, d);
      j["t0"] = d.t0;
      j["last_pre_break_month"] = d.last_pre_month().str();
      j["chow"] = {{"F", c3i::num(r.chow_f)}, {"df", {r.chow_df1, r.chow_df2}}, {"p", c3i::num(r.chow_p)}};
      j["wald"] = {{"chi2", c3i::num(r.wald)}, {"df", r.df_chi}, {"p", c3i::num(r.wald_p)}};
      j["lr"] = {{"chi2", c3i::num(r.lr)}, {"df", r.df_chi}, {"p", c3i::num(r.lr_p)}};
      print(j);
    } else if (*pipeline) {
      const auto cfg = resolve_config(pa);
      return finish(c3i::run_pipeline(cfg).report, cfg);
    } else if (*fit) {
      const auto cfg = resolve_config(pa);
      auto run = c3i::run_pipeline(cfg);
      const auto& j = run.report.json;
      if (!run.report.ok()) {
        std::cerr << "error: stage '" << run.report.failed_stage << "' failed: " << run.report.error << '\n';
        return c3i::exit_code(run.report.error_kind);
      }
      Json m;
      m["model"] = j["model"];
      if (j.contains("influence")) m["influence"] = j["influence"];
      print(m);
    } else if (*predict) {
      std::ifstream in(report_path);
      if (!in) throw c3i::DataError("cannot open '" + report_path + "'");
      Json rep;
      try {
        rep = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw c3i::DataError(report_path + ": " + e.what());
      }
      const auto inf = c3i::influence_from_report(rep);
      const auto panel = load_monthly(topics, kind, wr).select(inf.topic_labels);
      const auto cci = c3i::ingest_csv(official, c3i::CsvKind::official_index).series.front();
      const auto from = origin.empty() ? std::max(panel.start().plus(2), cci.start_month().plus(1)) : c3i::MonthIndex::parse(origin);
      const auto preds = c3i::one_step_predictions(inf, panel, cci, from, std::min(panel.end(), cci.end_month().plus(1)));
      std::ostringstream s;
      c3i::write_table_csv(s, c3i::predictions_table(preds));
      if (out.empty()) {
        std::cout << s.str();
      } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw c3i::DataError("cannot write '" + out + "'");
        f << s.str();
      }
    } else if (*report) {
      std::ifstream in(report_path);
      if (!in) throw c3i::DataError("cannot open '" + report_path + "'");
      Json rep;
      try {
        rep = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw c3i::DataError(report_path + ": " + e.what());
      }
      c3i::PipelineConfig cfg;
      cfg.set("formats", formats);
      auto files = c3i::emit_report(rep, emit_dir, emit_options(cfg));
      std::cerr << "wrote " << files.paths.size() << " files to " << emit_dir << '\n';
    } else if (*simulate) {
      for (const auto& f : c3i::synthetic::write(c3i::synthetic::generate(sim), emit_dir)) std::cerr << "wrote " << f << '\n';
    }
  } catch (const c3i::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const c3i::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const c3i::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
