#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "c3i/csv.hpp"
#include "c3i/error.hpp"
#include "c3i/mackinnon.hpp"
#include "c3i/series.hpp"
#include "c3i/stationarity.hpp"
#include "json.hpp"

namespace c3i {

/// Every tunable of a pipeline run. Defaults follow the published setup.
struct PipelineConfig {
  std::string topics;
  CsvKind topics_kind = CsvKind::weekly_topics;
  std::string official;
  WeekAssignment week_rule = WeekAssignment::by_last_day;
  std::size_t k_components = 9;
  Deterministic adf_deterministic = Deterministic::constant;
  std::optional<std::size_t> adf_max_lag;
  double stationarity_level = 0.01;
  std::size_t max_differences = 2;
  ATransformMode a_transform = ATransformMode::pairwise;
  std::size_t var_lag = 2;
  double granger_level = 0.05;
  std::optional<std::vector<std::string>> lag_terms;  ///< empty optional: chosen by Granger tests
  std::optional<long> break_t0 = 47;                  ///< empty optional: searched
  std::optional<MonthIndex> break_origin;             ///< empty optional: first sample month
  double break_trim = 0.15;
  double stepwise_threshold = 0.1;
  std::vector<std::string> force_keep{"C1", "C2", "C3", "C4"};
  std::optional<MonthIndex> holdout_start;
  std::size_t bartlett_max_lag = 20;
  std::string output_dir = "c3i_out";
  bool emit_json = true;
  bool emit_csv = true;
  bool emit_svg = true;
  std::uint64_t seed = 42;

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k{
        "topics",         "topics_kind",        "official",       "week_rule",      "k_components",     "adf_deterministic",
        "adf_max_lag",    "stationarity_level", "max_differences", "a_transform",   "var_lag",          "granger_level",
        "lag_terms",      "break_t0",           "break_origin",   "break_trim",     "stepwise_threshold", "force_keep",
        "holdout_start",  "bartlett_max_lag",   "output_dir",     "formats",        "seed"};
    return k;
  }

  void set(const std::string& key, const std::string& raw);

  /// Effective values, echoed into every report. The output directory is left
  /// out so reports written to different places stay identical.
  [[nodiscard]] nlohmann::ordered_json to_json() const;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    auto t = trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not an integer");
  return out;
}

inline double parse_probability(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
  if (!(out > 0.0 && out < 1.0)) throw ConfigError(key + ": " + v + " must lie in (0, 1)");
  return out;
}

inline MonthIndex parse_month(const std::string& key, const std::string& v) {
  try {
    return MonthIndex::parse(v);
  } catch (const DataError&) {
    throw ConfigError(key + ": '" + v + "' is not a YYYY-MM month");
  }
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace detail

inline void PipelineConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  using detail::parse_integer;
  if (key == "topics") {
    topics = v;
  } else if (key == "topics_kind") {
    topics_kind = parse_csv_kind(v);
    if (topics_kind == CsvKind::official_index) throw ConfigError("topics_kind: must be weekly or monthly");
  } else if (key == "official") {
    official = v;
  } else if (key == "week_rule") {
    if (v == "last_day") {
      week_rule = WeekAssignment::by_last_day;
    } else if (v == "first_day") {
      week_rule = WeekAssignment::by_first_day;
    } else {
      throw ConfigError("week_rule: '" + v + "' (last_day|first_day)");
    }
  } else if (key == "k_components") {
    k_components = parse_integer<std::size_t>(key, v);
    if (k_components < 1) throw ConfigError("k_components: must be at least 1");
  } else if (key == "adf_deterministic") {
    adf_deterministic = parse_deterministic(v);
  } else if (key == "adf_max_lag") {
    adf_max_lag = v == "auto" ? std::nullopt : std::optional<std::size_t>(parse_integer<std::size_t>(key, v));
  } else if (key == "stationarity_level") {
    stationarity_level = detail::parse_probability(key, v);
    if (stationarity_level != 0.01 && stationarity_level != 0.05 && stationarity_level != 0.10) {
      throw ConfigError("stationarity_level: must be 0.01, 0.05 or 0.10");
    }
  } else if (key == "max_differences") {
    max_differences = parse_integer<std::size_t>(key, v);
    if (max_differences < 1) throw ConfigError("max_differences: must be at least 1");
  } else if (key == "a_transform") {
    if (v == "pairwise") {
      a_transform = ATransformMode::pairwise;
    } else if (v == "running_sum") {
      a_transform = ATransformMode::running_sum;
    } else {
      throw ConfigError("a_transform: '" + v + "' (pairwise|running_sum)");
    }
  } else if (key == "var_lag") {
    var_lag = parse_integer<std::size_t>(key, v);
    if (var_lag < 1) throw ConfigError("var_lag: must be at least 1");
  } else if (key == "granger_level") {
    granger_level = detail::parse_probability(key, v);
  } else if (key == "lag_terms") {
    if (v == "auto") {
      lag_terms.reset();
    } else {
      lag_terms = v == "none" ? std::vector<std::string>{} : detail::split_list(v);
    }
  } else if (key == "break_t0") {
    break_t0 = v == "auto" ? std::nullopt : std::optional<long>(parse_integer<long>(key, v));
    if (break_t0 && *break_t0 < 1) throw ConfigError("break_t0: must be at least 1");
  } else if (key == "break_origin") {
    break_origin = v == "auto" ? std::nullopt : std::optional<MonthIndex>(detail::parse_month(key, v));
  } else if (key == "break_trim") {
    break_trim = detail::parse_probability(key, v);
    if (break_trim >= 0.5) throw ConfigError("break_trim: must be below 0.5");
  } else if (key == "stepwise_threshold") {
    stepwise_threshold = detail::parse_probability(key, v);
  } else if (key == "force_keep") {
    force_keep = v == "none" ? std::vector<std::string>{} : detail::split_list(v);
  } else if (key == "holdout_start") {
    holdout_start = v == "none" ? std::nullopt : std::optional<MonthIndex>(detail::parse_month(key, v));
  } else if (key == "bartlett_max_lag") {
    bartlett_max_lag = parse_integer<std::size_t>(key, v);
    if (bartlett_max_lag < 1) throw ConfigError("bartlett_max_lag: must be at least 1");
  } else if (key == "output_dir") {
    if (v.empty()) throw ConfigError("output_dir: must not be empty");
    output_dir = v;
  } else if (key == "formats") {
    emit_json = emit_csv = emit_svg = false;
    for (const auto& f : detail::split_list(v)) {
      if (f == "json") {
        emit_json = true;
      } else if (f == "csv") {
        emit_csv = true;
      } else if (f == "svg") {
        emit_svg = true;
      } else {
        throw ConfigError("formats: unknown format '" + f + "' (json,csv,svg)");
      }
    }
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, v);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

inline nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["topics"] = topics;
  j["topics_kind"] = topics_kind == CsvKind::weekly_topics ? "weekly" : "monthly";
  j["official"] = official;
  j["week_rule"] = week_rule == WeekAssignment::by_last_day ? "last_day" : "first_day";
  j["k_components"] = k_components;
  j["adf_deterministic"] = to_string(adf_deterministic);
  j["adf_max_lag"] = adf_max_lag ? std::to_string(*adf_max_lag) : "auto";
  j["stationarity_level"] = stationarity_level;
  j["max_differences"] = max_differences;
  j["a_transform"] = to_string(a_transform);
  j["var_lag"] = var_lag;
  j["granger_level"] = granger_level;
  j["lag_terms"] = lag_terms ? (lag_terms->empty() ? "none" : detail::join(*lag_terms)) : "auto";
  j["break_t0"] = break_t0 ? std::to_string(*break_t0) : "auto";
  j["break_origin"] = break_origin ? break_origin->str() : "auto";
  j["break_trim"] = break_trim;
  j["stepwise_threshold"] = stepwise_threshold;
  j["force_keep"] = force_keep.empty() ? "none" : detail::join(force_keep);
  j["holdout_start"] = holdout_start ? holdout_start->str() : "none";
  j["bartlett_max_lag"] = bartlett_max_lag;
  std::vector<std::string> formats;
  if (emit_json) formats.emplace_back("json");
  if (emit_csv) formats.emplace_back("csv");
  if (emit_svg) formats.emplace_back("svg");
  j["formats"] = detail::join(formats);
  j["seed"] = seed;
  return j;
}

/// Reads `key = value` lines; `#` starts a comment.
inline void load_config(std::istream& in, PipelineConfig& cfg, const std::string& source = "<config>") {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

/// Relative input paths resolve against the config file's directory.
[[nodiscard]] inline PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  PipelineConfig cfg;
  load_config(in, cfg, path);
  const auto base = std::filesystem::path(path).parent_path();
  for (auto* p : {&cfg.topics, &cfg.official}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
  }
  return cfg;
}

/// Environment variable that overrides `output_dir` from a config file.
inline constexpr const char* kOutputDirEnv = "C3I_OUTPUT_DIR";

}  // namespace c3i
