#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "c3i/c3i.hpp"

namespace c3i::synthetic {

/// Data-generating process: topics load on a few random-walk factors; the
/// index follows the two-regime model on the topics' own components, each
/// entering as the base term the default stationarity screen assigns it
/// (C_i when integrated, A_i otherwise).
struct Spec {
  std::uint64_t seed = 42;
  std::size_t topics = 34;
  std::size_t factors = 4;
  std::size_t k_components = 9;
  std::chrono::sys_days first_week = std::chrono::sys_days{std::chrono::year{2006} / 1 / 2};
  MonthIndex last_month{2013, 6};
  double alpha = 50.0;
  double gamma0 = 6.0;
  double delta = 0.5;
  std::map<std::size_t, double> betas{{1, 1.2}, {2, -0.9}, {3, 0.8}, {4, -0.7}};  ///< by component id
  std::map<std::size_t, double> gammas{{2, 1.1}, {3, -1.0}};
  long t0 = 47;
  double noise_sd = 1.0;
  double factor_step_sd = 0.35;
  double topic_noise_sd = 0.6;
};

struct Data {
  Spec spec;
  std::vector<TimeSeries> weekly_topics;
  TimeSeries official = TimeSeries::monthly("CCI", {2000, 1}, {0.0});
  ComponentSet components;  ///< from PCA on the full monthly sample
  std::vector<TimeSeries> base_terms;  ///< true regressors, one per component
  MonthIndex origin{};

  [[nodiscard]] const std::string& term(std::size_t id) const { return base_terms.at(id - 1).label(); }

  [[nodiscard]] std::map<std::string, double> named(const std::map<std::size_t, double>& by_id) const {
    std::map<std::string, double> out;
    for (const auto& [id, v] : by_id) out[term(id)] = v;
    return out;
  }

  /// Terms with non-zero coefficients in the transitional design.
  [[nodiscard]] std::vector<std::string> active_terms() const {
    std::vector<std::string> out{kInterceptLabel, kDummyLabel, kCciLagLabel};
    for (const auto& [id, b] : spec.betas)
      if (b != 0.0) out.push_back(term(id));
    for (const auto& [id, g] : spec.gammas)
      if (g != 0.0) out.push_back(interaction_label(term(id)));
    return out;
  }

  [[nodiscard]] nlohmann::ordered_json truth() const {
    nlohmann::ordered_json j;
    j["seed"] = spec.seed;
    j["topics"] = spec.topics;
    j["factors"] = spec.factors;
    j["k_components"] = spec.k_components;
    j["origin"] = origin.str();
    j["t0"] = spec.t0;
    j["alpha"] = spec.alpha;
    j["gamma0"] = spec.gamma0;
    j["delta"] = spec.delta;
    j["intercept_pre"] = spec.alpha;
    j["intercept_post"] = spec.alpha + spec.gamma0;
    j["base_terms"] = [&] {
      std::vector<std::string> l;
      for (const auto& b : base_terms) l.push_back(b.label());
      return l;
    }();
    j["betas"] = named(spec.betas);
    j["gammas"] = named(spec.gammas);
    j["noise_sd"] = spec.noise_sd;
    j["active_terms"] = active_terms();
    return j;
  }
};

[[nodiscard]] inline Data generate(const Spec& spec = {}) {
  using namespace std::chrono;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  std::size_t weeks = 0;
  while (detail::week_month(spec.first_week + days{7 * static_cast<long>(weeks)}, WeekAssignment::by_last_day) <= spec.last_month) ++weeks;

  std::vector<std::vector<double>> f(spec.factors, std::vector<double>(weeks));
  for (auto& path : f) {
    double level = 0.0;
    for (auto& v : path) v = level += spec.factor_step_sd * z(rng);
  }
  std::vector<TimeSeries> weekly;
  for (std::size_t i = 0; i < spec.topics; ++i) {
    std::vector<double> load(spec.factors);
    for (auto& l : load) l = u(rng);
    load[i % spec.factors] += i % 2 == 0 ? 1.5 : -1.5;
    std::vector<double> v(weeks);
    for (std::size_t w = 0; w < weeks; ++w) {
      double x = 50.0 + spec.topic_noise_sd * z(rng);
      for (std::size_t k = 0; k < spec.factors; ++k) x += load[k] * f[k][w];
      v[w] = x;
    }
    weekly.push_back(TimeSeries::weekly("topic" + std::to_string(i + 1), spec.first_week, std::move(v)));
  }

  std::vector<TimeSeries> monthly;
  for (const auto& t : weekly) monthly.push_back(resample_weekly_to_monthly(t, WeekAssignment::by_last_day));
  const Panel panel = align(std::span<const TimeSeries>(monthly));
  Data d{spec, std::move(weekly), TimeSeries::monthly("CCI", panel.start(), {0.0}), pca_project(pca_fit(panel, spec.k_components), panel),
         {}, panel.start()};
  const PipelineConfig defaults;
  AdfSpec adf;
  adf.deterministic = defaults.adf_deterministic;
  for (std::size_t j = 0; j < d.components.components(); ++j) {
    const auto c = d.components.series.series(j);
    const auto io = integration_order(c, adf, defaults.stationarity_level, defaults.max_differences);
    d.base_terms.push_back(io.order == Order::I0 ? a_transform(c, defaults.a_transform).relabel("A" + std::to_string(j + 1)) : c);
  }

  BreakDesign brk;
  brk.t0 = spec.t0;
  brk.origin = d.origin;
  const auto& cs = d.components.series;
  std::vector<double> cci{100.0};
  for (std::size_t r = 0; r < cs.rows(); ++r) {
    const MonthIndex m = cs.month_at(r);
    const double dum = brk.dummy_at(m);
    auto x = [&](std::size_t id) { return d.base_terms[id - 1].at(m).value_or(0.0); };
    double y = spec.alpha + spec.gamma0 * dum + spec.delta * cci.back() + spec.noise_sd * z(rng);
    for (const auto& [id, b] : spec.betas) y += b * x(id);
    for (const auto& [id, g] : spec.gammas) y += g * dum * x(id);
    cci.push_back(y);
  }
  d.official = TimeSeries::monthly("CCI", d.origin.plus(-1), std::move(cci));
  return d;
}

/// Writes topics.csv, official.csv, truth.json and pipeline.cfg.
inline std::vector<std::string> write(const Data& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("topics.csv");
    write_weekly_csv(out, d.weekly_topics);
  }
  {
    auto out = open("official.csv");
    out << "month,CCI\n";
    for (std::size_t i = 0; i < d.official.size(); ++i) out << d.official.month_at(i).str() << ',' << format_double(d.official[i]) << '\n';
  }
  {
    auto out = open("truth.json");
    out << d.truth().dump(2) << '\n';
  }
  {
    auto out = open("pipeline.cfg");
    out << "# synthetic run\n";
    out << "topics = topics.csv\n";
    out << "topics_kind = weekly\n";
    out << "official = official.csv\n";
    out << "k_components = " << d.spec.k_components << '\n';
    out << "break_t0 = " << d.spec.t0 << '\n';
    out << "seed = " << d.spec.seed << '\n';
  }
  return {"topics.csv", "official.csv", "truth.json", "pipeline.cfg"};
}

}  // namespace c3i::synthetic
