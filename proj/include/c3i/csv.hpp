#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "c3i/error.hpp"
#include "c3i/series.hpp"

namespace c3i {

enum class CsvKind { weekly_topics, monthly_topics, official_index };

[[nodiscard]] inline CsvKind parse_csv_kind(const std::string& s) {
  if (s == "weekly" || s == "weekly_topics") return CsvKind::weekly_topics;
  if (s == "monthly" || s == "monthly_topics") return CsvKind::monthly_topics;
  if (s == "official" || s == "official_index") return CsvKind::official_index;
  throw ConfigError("unknown CSV kind '" + s + "' (weekly|monthly|official)");
}

struct CsvData {
  CsvKind kind = CsvKind::monthly_topics;
  std::vector<TimeSeries> series;  ///< one per retained value column
  std::vector<std::string> warnings;

  /// Monthly columns as a panel (monthly kinds only).
  [[nodiscard]] Panel panel() const {
    if (kind == CsvKind::weekly_topics) throw DataError("weekly CSV data must be resampled before forming a panel");
    if (series.empty()) throw DataError("CSV has no value columns");
    std::vector<std::string> labels;
    std::vector<std::vector<double>> cols;
    for (const auto& s : series) {
      labels.push_back(s.label());
      cols.emplace_back(s.values().begin(), s.values().end());
    }
    return Panel(series.front().start_month(), std::move(labels), std::move(cols));
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (s.empty() || ec != std::errc() || ptr != e || !std::isfinite(v)) throw DataError(where + ": '" + s + "' is not a finite number");
  return v;
}

}  // namespace detail

/// Parses CSV text; `source` names the input in error messages.
[[nodiscard]] inline CsvData parse_csv(std::istream& in, CsvKind kind, const std::string& source = "<csv>") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (detail::trim(line).empty()) continue;
    header = detail::split_csv_line(line);
    break;
  }
  if (header.size() < 2) throw DataError(source + ": header must name a date column and at least one value column");
  std::vector<std::string> labels(header.begin() + 1, header.end());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j].empty()) throw DataError(source + ":" + std::to_string(line_no) + ": empty column name");
    for (std::size_t i = 0; i < j; ++i)
      if (labels[i] == labels[j]) throw DataError(source + ":" + std::to_string(line_no) + ": duplicate column '" + labels[j] + "'");
  }
  if (kind == CsvKind::official_index && labels.size() != 1) {
    throw DataError(source + ": official index CSV must have exactly one value column, found " + std::to_string(labels.size()));
  }

  std::vector<std::vector<double>> cols(labels.size());
  std::optional<std::chrono::sys_days> first_day, prev_day;
  std::optional<MonthIndex> first_month, prev_month;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    try {
      if (kind == CsvKind::weekly_topics) {
        auto day = parse_date(cells[0]);
        if (prev_day && day != *prev_day + std::chrono::days{7}) {
          throw DataError(day <= *prev_day ? "dates out of order" : "gap in weekly dates (expected " + format_date(*prev_day + std::chrono::days{7}) + ")");
        }
        if (!first_day) first_day = day;
        prev_day = day;
      } else {
        const auto& c = cells[0];
        MonthIndex m = c.size() == 10 ? MonthIndex::of(std::chrono::year_month_day{parse_date(c)}) : MonthIndex::parse(c);
        if (prev_month && m != prev_month->next()) {
          throw DataError(m <= *prev_month ? "months out of order" : "gap in months (expected " + prev_month->next().str() + ")");
        }
        if (!first_month) first_month = m;
        prev_month = m;
      }
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    for (std::size_t j = 0; j < labels.size(); ++j) cols[j].push_back(detail::parse_number(cells[j + 1], where + " column '" + labels[j] + "'"));
  }
  if (cols[0].empty()) throw DataError(source + ": no data rows");

  CsvData out;
  out.kind = kind;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (kind != CsvKind::official_index && cols[j].size() > 1 && sample_sd(cols[j]) == 0.0) {
      out.warnings.push_back(source + ": column '" + labels[j] + "' has zero variance and was dropped");
      continue;
    }
    if (kind == CsvKind::weekly_topics) {
      out.series.push_back(TimeSeries::weekly(labels[j], *first_day, std::move(cols[j])));
    } else {
      out.series.push_back(TimeSeries::monthly(labels[j], *first_month, std::move(cols[j])));
    }
  }
  if (out.series.empty()) throw DataError(source + ": every value column has zero variance");
  return out;
}

[[nodiscard]] inline CsvData ingest_csv(const std::string& path, CsvKind kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, kind, path);
}

/// Shortest text that reads back to the same double.
[[nodiscard]] inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

[[nodiscard]] inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline void write_panel_csv(std::ostream& out, const Panel& panel, const std::string& date_header = "month") {
  out << date_header;
  for (const auto& l : panel.labels()) out << ',' << csv_escape(l);
  out << '\n';
  for (std::size_t t = 0; t < panel.rows(); ++t) {
    out << panel.month_at(t).str();
    for (std::size_t j = 0; j < panel.cols(); ++j) out << ',' << format_double(panel.value(t, j));
    out << '\n';
  }
}

inline void write_weekly_csv(std::ostream& out, const std::vector<TimeSeries>& weekly) {
  if (weekly.empty()) throw DataError("write_weekly_csv: no series");
  out << "date";
  for (const auto& s : weekly) out << ',' << csv_escape(s.label());
  out << '\n';
  for (std::size_t t = 0; t < weekly.front().size(); ++t) {
    out << format_date(weekly.front().week_start_at(t));
    for (const auto& s : weekly) out << ',' << format_double(s[t]);
    out << '\n';
  }
}

}  // namespace c3i
