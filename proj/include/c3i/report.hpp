#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "c3i/csv.hpp"
#include "c3i/error.hpp"
#include "c3i/pipeline.hpp"

namespace c3i {

struct EmitOptions {
  bool json = true;
  bool csv = true;
  bool svg = true;
};

/// Files written by emit_report, relative to the output directory.
struct EmittedFiles {
  std::vector<std::string> paths;
};

[[nodiscard]] inline std::string report_text(const Json& report) { return report.dump(2) + "\n"; }

/// One CSV cell; numbers keep full precision.
[[nodiscard]] inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_string()) return csv_escape(v.get<std::string>());
  return csv_escape(v.dump());
}

inline void write_table_csv(std::ostream& out, const Json& table) {
  const auto& cols = table.at("columns");
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << csv_escape(cols[j].get<std::string>());
  out << '\n';
  for (const auto& row : table.at("rows")) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << csv_cell(row[j]);
    out << '\n';
  }
}

/// Every table in the report, named "<section>_<key>".
[[nodiscard]] inline std::vector<std::pair<std::string, const Json*>> report_tables(const Json& report) {
  std::vector<std::pair<std::string, const Json*>> out;
  for (const auto& [section, body] : report.items()) {
    if (!body.is_object()) continue;
    for (const auto& [key, value] : body.items()) {
      if (is_table(value)) out.emplace_back(section + "_" + key, &value);
    }
  }
  return out;
}

struct PlotSeries {
  std::string label;
  std::vector<double> y;  ///< NaN marks a gap
  std::string colour;
};

struct Plot {
  std::string title;
  std::vector<std::string> x_labels;
  std::vector<PlotSeries> series;
  bool bars = false;
  std::vector<double> band;  ///< symmetric +/- band per x, drawn dashed when set
};

namespace detail {

inline std::string fmt(double v, int prec = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline double cell_number(const Json& v) { return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN(); }

inline std::vector<double> table_column(const Json& table, const std::string& name) {
  const auto& cols = table.at("columns");
  auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw DataError("report table has no column '" + name + "'");
  const auto j = static_cast<std::size_t>(it - cols.begin());
  std::vector<double> out;
  for (const auto& row : table.at("rows")) out.push_back(cell_number(row[j]));
  return out;
}

inline std::vector<std::string> table_labels(const Json& table, const std::string& name) {
  const auto& cols = table.at("columns");
  auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw DataError("report table has no column '" + name + "'");
  const auto j = static_cast<std::size_t>(it - cols.begin());
  std::vector<std::string> out;
  for (const auto& row : table.at("rows")) out.push_back(row[j].is_string() ? row[j].get<std::string>() : row[j].dump());
  return out;
}

}  // namespace detail

[[nodiscard]] inline std::string render_svg(const Plot& p) {
  constexpr double W = 720, H = 360, L = 60, R = 20, T = 36, B = 48;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : p.series)
    for (double v : s.y)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double b : p.band)
    if (std::isfinite(b)) lo = std::min(lo, -b), hi = std::max(hi, b);
  if (p.bars) lo = std::min(lo, 0.0), hi = std::max(hi, 0.0);
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const std::size_t n = p.x_labels.size();
  auto xp = [&](std::size_t i) { return L + (n <= 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1)) * (W - L - R); };
  auto yp = [&](double v) { return T + (hi - v) / (hi - lo) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << detail::xml_escape(p.title) << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    o << "<text x=\"" << L - 6 << "\" y=\"" << detail::fmt(yp(v) + 4) << "\" text-anchor=\"end\">" << detail::fmt(v) << "</text>\n";
  }
  if (n > 0) {
    const std::size_t step = std::max<std::size_t>(1, n / 8);
    for (std::size_t i = 0; i < n; i += step) {
      o << "<text x=\"" << detail::fmt(xp(i)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << detail::xml_escape(p.x_labels[i])
        << "</text>\n";
    }
  }
  if (p.bars && lo < 0.0 && hi > 0.0) {
    o << "<line x1=\"" << L << "\" y1=\"" << detail::fmt(yp(0)) << "\" x2=\"" << W - R << "\" y2=\"" << detail::fmt(yp(0))
      << "\" stroke=\"grey\"/>\n";
  }
  if (!p.band.empty()) {
    for (int sign : {1, -1}) {
      o << "<polyline fill=\"none\" stroke=\"grey\" stroke-dasharray=\"4 3\" points=\"";
      for (std::size_t i = 0; i < p.band.size(); ++i) o << (i ? " " : "") << detail::fmt(xp(i)) << ',' << detail::fmt(yp(sign * p.band[i]));
      o << "\"/>\n";
    }
  }
  for (const auto& s : p.series) {
    if (p.bars) {
      const double w = std::max(2.0, 0.6 * (W - L - R) / static_cast<double>(std::max<std::size_t>(n, 1)));
      for (std::size_t i = 0; i < s.y.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        const double y0 = yp(0.0), y1 = yp(s.y[i]);
        o << "<rect x=\"" << detail::fmt(xp(i) - w / 2) << "\" y=\"" << detail::fmt(std::min(y0, y1)) << "\" width=\"" << detail::fmt(w)
          << "\" height=\"" << detail::fmt(std::abs(y1 - y0)) << "\" fill=\"" << s.colour << "\"/>\n";
      }
      continue;
    }
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) o << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts += (pts.empty() ? "" : " ") + detail::fmt(xp(i)) + "," + detail::fmt(yp(s.y[i]));
    }
    flush();
  }
  double ly = T + 4;
  for (const auto& s : p.series) {
    o << "<rect x=\"" << W - R - 130 << "\" y=\"" << ly << "\" width=\"12\" height=\"4\" fill=\"" << s.colour << "\"/>";
    o << "<text x=\"" << W - R - 112 << "\" y=\"" << ly + 6 << "\">" << detail::xml_escape(s.label) << "</text>\n";
    ly += 16;
  }
  o << "</svg>\n";
  return o.str();
}

/// Plots derivable from the sections present in the report.
[[nodiscard]] inline std::vector<std::pair<std::string, Plot>> report_plots(const Json& report) {
  std::vector<std::pair<std::string, Plot>> out;
  if (report.contains("contribution")) {
    const auto& t = report["contribution"]["series"];
    Plot fit{"Official index and model fit", detail::table_labels(t, "Month"), {}, false, {}};
    fit.series.push_back({"Official", detail::table_column(t, "Official"), "#1f4e9c"});
    fit.series.push_back({"Fitted", detail::table_column(t, "Fitted"), "#d0542c"});
    if (report.contains("holdout")) {
      const auto& h = report["holdout"]["predictions"];
      const std::size_t in_sample = fit.x_labels.size();
      for (auto& s : fit.series) s.y.resize(in_sample + h["rows"].size(), std::numeric_limits<double>::quiet_NaN());
      auto months = detail::table_labels(h, "Month");
      auto official = detail::table_column(h, "Official");
      auto predicted = detail::table_column(h, "Predicted");
      PlotSeries pred{"Holdout prediction", std::vector<double>(in_sample, std::numeric_limits<double>::quiet_NaN()), "#2a9d4a"};
      for (std::size_t i = 0; i < months.size(); ++i) {
        fit.x_labels.push_back(months[i]);
        fit.series[0].y[in_sample + i] = official[i];
        pred.y.push_back(predicted[i]);
      }
      fit.series.push_back(std::move(pred));
    }
    out.emplace_back("fitted_vs_official", std::move(fit));
    Plot c{"Search-volume contribution", detail::table_labels(t, "Month"), {}, false, {}};
    c.series.push_back({"Contribution", detail::table_column(t, "Contribution"), "#6a3d9a"});
    out.emplace_back("contribution", std::move(c));
  }
  if (report.contains("pca")) {
    const auto& t = report["pca"]["scree"];
    Plot s{"Scree", detail::table_labels(t, "Index"), {}, true, {}};
    s.series.push_back({"Eigenvalue", detail::table_column(t, "Eigenvalue"), "#1f4e9c"});
    out.emplace_back("scree", std::move(s));
  }
  if (report.contains("diagnostics")) {
    const auto& t = report["diagnostics"]["acf"];
    Plot a{"Residual autocorrelation", detail::table_labels(t, "Lag"), {}, true, detail::table_column(t, "Band")};
    a.series.push_back({"ACF", detail::table_column(t, "ACF"), "#1f4e9c"});
    out.emplace_back("acf", std::move(a));
  }
  return out;
}

/// Writes report.json, tables/*.csv and plots/*.svg under `dir`.
inline EmittedFiles emit_report(const Json& report, const std::filesystem::path& dir, const EmitOptions& opt = {}) {
  namespace fs = std::filesystem;
  EmittedFiles files;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
  auto write = [&](const fs::path& rel, const std::string& text) {
    const fs::path p = dir / rel;
    if (rel.has_parent_path()) fs::create_directories(dir / rel.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    files.paths.push_back(rel.generic_string());
  };
  if (opt.json) write("report.json", report_text(report));
  if (opt.csv) {
    for (const auto& [name, table] : report_tables(report)) {
      std::ostringstream s;
      write_table_csv(s, *table);
      write(fs::path("tables") / (name + ".csv"), s.str());
    }
  }
  if (opt.svg) {
    for (const auto& [name, plot] : report_plots(report)) write(fs::path("plots") / (name + ".svg"), render_svg(plot));
  }
  return files;
}

}  // namespace c3i
