#pragma once

// Output emission: CSV, JSON (stable field order) and SVG line plots.
// Formatting is locale-independent and deterministic.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "airyline/errors.hpp"

namespace airyline::cli {

using ordered_json = nlohmann::ordered_json;

inline std::string format_number(double v, int digits = 17) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Cell {
  std::string text;
  std::optional<double> number;

  Cell(double v) : text(format_number(v)), number(v) {}                 // NOLINT
  Cell(int v) : text(std::to_string(v)), number(v) {}                   // NOLINT
  Cell(std::size_t v) : text(std::to_string(v)), number(static_cast<double>(v)) {}  // NOLINT
  Cell(std::string s) : text(std::move(s)) {}                           // NOLINT
  Cell(const char* s) : text(s) {}                                      // NOLINT
};

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != headers.size()) throw NumericError("table row width does not match its header");
    rows.push_back(std::move(row));
  }
};

struct PlotSpec {
  std::string title;
  std::size_t x_column = 0;
  std::vector<std::size_t> y_columns{1};
  bool log_x = false;
  bool log_y = false;
};

/// Result of one command: a table, optionally a structured JSON document that
/// replaces the table in JSON output, and how to plot it.
struct Result {
  Table table;
  std::optional<ordered_json> document;
  PlotSpec plot;
};

inline std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.headers.size(); ++i) out << (i ? "," : "") << t.headers[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i].text;
    out << '\n';
  }
  return out.str();
}

inline ordered_json to_json(const Table& t) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].number && std::isfinite(*row[i].number)) {
        obj[t.headers[i]] = *row[i].number;
      } else {
        obj[t.headers[i]] = row[i].text;
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

inline std::string to_json_text(const Result& r) {
  return (r.document ? *r.document : to_json(r.table)).dump(2) + "\n";
}

namespace detail {

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }
};

inline Axis make_axis(const std::vector<double>& values, bool log) {
  Axis ax;
  ax.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v) || (log && v <= 0.0)) continue;
    const double a = log ? std::log10(v) : v;
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  ax.lo = lo;
  ax.hi = hi;
  return ax;
}

inline std::string tick_label(const Axis& ax, double frac) {
  const double a = ax.lo + frac * (ax.hi - ax.lo);
  return format_number(ax.log ? std::pow(10.0, a) : a, 4);
}

}  // namespace detail

inline std::string to_svg(const Result& r) {
  static const char* const colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  const Table& t = r.table;
  const PlotSpec& p = r.plot;
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  std::vector<double> xs, ys_all;
  std::vector<std::vector<std::pair<double, double>>> series(p.y_columns.size());
  for (const auto& row : t.rows) {
    if (p.x_column >= row.size() || !row[p.x_column].number) continue;
    const double x = *row[p.x_column].number;
    for (std::size_t k = 0; k < p.y_columns.size(); ++k) {
      const std::size_t c = p.y_columns[k];
      if (c >= row.size() || !row[c].number) continue;
      const double y = *row[c].number;
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if ((p.log_x && x <= 0.0) || (p.log_y && y <= 0.0)) continue;
      series[k].push_back({x, y});
      xs.push_back(x);
      ys_all.push_back(y);
    }
  }
  const detail::Axis ax = detail::make_axis(xs, p.log_x);
  const detail::Axis ay = detail::make_axis(ys_all, p.log_y);
  auto px = [&](double x) { return L + ax.map(x) * (W - L - R); };
  auto py = [&](double y) { return H - B - ay.map(y) * (H - T - B); };
  auto f = [](double v) { return format_number(v, 6); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << p.title << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double gx = L + frac * (W - L - R);
    const double gy = H - B - frac * (H - T - B);
    s << "<line x1=\"" << f(gx) << "\" y1=\"" << H - B << "\" x2=\"" << f(gx) << "\" y2=\"" << T
      << "\" stroke=\"#ddd\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << f(gy) << "\" x2=\"" << W - R << "\" y2=\"" << f(gy)
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << f(gx) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << detail::tick_label(ax, frac) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << f(gy + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << detail::tick_label(ay, frac) << "</text>\n";
  }
  if (p.x_column < t.headers.size()) {
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\">" << t.headers[p.x_column] << (p.log_x ? " (log)" : "")
      << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % 5];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].size(); ++i) {
      s << (i ? " " : "") << f(px(series[k][i].first)) << "," << f(py(series[k][i].second));
    }
    s << "\"/>\n";
    for (const auto& [x, y] : series[k]) {
      s << "<circle cx=\"" << f(px(x)) << "\" cy=\"" << f(py(y)) << "\" r=\"2\" fill=\"" << color << "\"/>\n";
    }
    const std::size_t c = p.y_columns[k];
    if (c < t.headers.size()) {
      s << "<text x=\"" << L + 10 << "\" y=\"" << T + 16 + 14 * static_cast<double>(k) << "\" fill=\"" << color
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << t.headers[c] << (p.log_y ? " (log)" : "")
        << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

inline std::string render(const Result& r, const std::string& format) {
  if (format == "csv") return to_csv(r.table);
  if (format == "json") return to_json_text(r);
  if (format == "svg") return to_svg(r);
  throw ConfigError("unknown output format '" + format + "' (expected csv, json or svg)");
}

/// Writes the rendered result to `path`, or to `fallback` when no path is set.
inline void emit(const Result& r, const std::string& format, const std::optional<std::string>& path,
                 std::ostream& fallback = std::cout) {
  const std::string text = render(r, format);
  if (!path || path->empty() || *path == "-") {
    fallback << text;
    fallback.flush();
    if (!fallback) throw IoError("failed writing to the output stream");
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + *path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + *path + "'");
}

}  // namespace airyline::cli
