#pragma once

// Minimal SVG line plots of the sweep tables, with log-scaled axes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ftmux/errors.hpp"
#include "ftmux/table.hpp"

namespace ftmux {

enum class PlotStyle { Lines, Markers };

inline PlotStyle plot_style_from_name(std::string_view s) {
  if (s == "lines") return PlotStyle::Lines;
  if (s == "markers") return PlotStyle::Markers;
  throw ConfigError("unknown plot style '" + std::string(s) + "'");
}

struct Series {
  std::string label;
  std::string dash;  ///< SVG stroke-dasharray, empty for solid
  std::vector<std::pair<double, double>> points;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool x_log = false;
  bool y_log = true;
  std::vector<Series> series;
};

namespace detail {

inline double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("non-numeric CSV cell '" + s + "'");
  return v;
}

inline int require_column(const ParsedCsv& csv, const std::string& name) {
  int c = csv.column(name);
  if (c < 0) throw ConfigError("CSV lacks column '" + name + "'");
  return c;
}

// Groups rows by a key column and collects (x, y) points for one y column.
inline std::vector<Series> grouped(const ParsedCsv& csv, const std::string& key, const std::string& x,
                                   const std::string& y, const std::string& label_suffix, const std::string& dash) {
  const int kc = require_column(csv, key), xc = require_column(csv, x), yc = require_column(csv, y);
  std::vector<Series> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : csv.rows) {
    const std::string& k = row[static_cast<std::size_t>(kc)];
    auto [it, fresh] = index.emplace(k, out.size());
    if (fresh) out.push_back({key + "=" + k + label_suffix, dash, {}});
    out[it->second].points.emplace_back(parse_number(row[static_cast<std::size_t>(xc)]),
                                        parse_number(row[static_cast<std::size_t>(yc)]));
  }
  return out;
}

inline Series column_series(const ParsedCsv& csv, const std::string& x, const std::string& y, const std::string& dash) {
  const int xc = require_column(csv, x), yc = require_column(csv, y);
  Series s{y, dash, {}};
  for (const auto& row : csv.rows)
    s.points.emplace_back(parse_number(row[static_cast<std::size_t>(xc)]),
                          parse_number(row[static_cast<std::size_t>(yc)]));
  return s;
}

inline void append(std::vector<Series>& into, std::vector<Series> more) {
  for (auto& s : more) into.push_back(std::move(s));
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Chooses the figure layout from the CSV's columns.
inline Figure figure_from_csv(const ParsedCsv& csv) {
  if (csv.columns.empty() || csv.rows.empty()) throw ConfigError("CSV has no data rows");
  Figure f;
  using detail::append;
  using detail::grouped;
  if (csv.column("rate_lossless_per_bin") >= 0) {
    f.title = "n-photon generation rate";
    f.x_label = "time bins per batch m";
    f.y_label = "rate per time bin";
    append(f.series, grouped(csv, "n", "m", "rate_lossless_per_bin", " lossless", ""));
    append(f.series, grouped(csv, "n", "m", "rate_lossy_per_bin", " lossy", "6,4"));
    if (csv.column("no_multiplexing_per_bin") >= 0)
      append(f.series, grouped(csv, "n", "m", "no_multiplexing_per_bin", " no multiplexing", "2,3"));
  } else if (csv.column("max_rate_lossy") >= 0) {
    f.title = "maximum n-photon generation rate";
    f.x_label = "photons n";
    f.y_label = "rate per time bin";
    f.series.push_back(detail::column_series(csv, "n", "max_rate_lossless", ""));
    f.series.push_back(detail::column_series(csv, "n", "max_rate_lossy", "6,4"));
    f.series.push_back(detail::column_series(csv, "n", "no_multiplexing", "2,3"));
  } else if (csv.column("ratio") >= 0) {
    f.title = "improvement over no multiplexing";
    f.x_label = "photon probability p";
    f.y_label = "rate ratio";
    f.x_log = true;
    append(f.series, grouped(csv, "n", "p", "ratio", "", ""));
  } else if (csv.column("rate_partial") >= 0) {
    f.title = "n photons in 2n frequency bins";
    f.x_label = "photons n";
    f.y_label = "rate per time bin";
    append(f.series, grouped(csv, "occupancy_model", "n", "rate_partial", " partial", ""));
    append(f.series, grouped(csv, "occupancy_model", "n", "rate_fixed", " fixed", "6,4"));
  } else {
    throw ConfigError("unrecognized CSV schema");
  }
  return f;
}

/// Deterministic SVG rendering of a figure.
inline std::string render_svg(const Figure& fig, PlotStyle style) {
  constexpr double width = 720, height = 480, left = 80, right = 190, top = 40, bottom = 60;
  const double plot_w = width - left - right, plot_h = height - top - bottom;

  auto tx = [&](double v) { return fig.x_log ? std::log10(v) : v; };
  auto ty = [&](double v) { return fig.y_log ? std::log10(v) : v; };
  auto usable = [&](const std::pair<double, double>& pt) {
    return std::isfinite(pt.first) && std::isfinite(pt.second) && (!fig.x_log || pt.first > 0) &&
           (!fig.y_log || pt.second > 0);
  };

  double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
  for (const auto& s : fig.series)
    for (const auto& pt : s.points)
      if (usable(pt)) {
        x0 = std::min(x0, tx(pt.first));
        x1 = std::max(x1, tx(pt.first));
        y0 = std::min(y0, ty(pt.second));
        y1 = std::max(y1, ty(pt.second));
      }
  if (!(x0 <= x1)) throw ConfigError("no plottable points (log axes need positive values)");
  if (fig.y_log) {
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
  }
  if (fig.x_log) {
    x0 = std::floor(x0);
    x1 = std::ceil(x1);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;

  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double v) { return top + plot_h - (ty(v) - y0) / (y1 - y0) * plot_h; };
  using detail::fmt;

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << detail::escape(fig.title) << "</text>\n";
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(plot_w) << "\" height=\""
      << fmt(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Y ticks: decades on log axes, five even steps otherwise.
  auto tick_label = [](bool log, double v) {
    char buf[32];
    if (log)
      std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(v)));
    else
      std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  const int y_steps = fig.y_log ? static_cast<int>(std::lround(y1 - y0)) : 5;
  for (int i = 0; i <= y_steps; ++i) {
    const double v = y0 + (y1 - y0) * i / y_steps;
    const double y = top + plot_h - (v - y0) / (y1 - y0) * plot_h;
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + plot_w) << "\" y2=\""
        << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(fig.y_log, v) << "</text>\n";
  }
  const int x_steps = fig.x_log ? static_cast<int>(std::lround(x1 - x0)) : 5;
  for (int i = 0; i <= x_steps; ++i) {
    const double v = x0 + (x1 - x0) * i / x_steps;
    const double x = left + (v - x0) / (x1 - x0) * plot_w;
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(top + plot_h + 18) << "\" text-anchor=\"middle\">"
        << tick_label(fig.x_log, v) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 16) << "\" text-anchor=\"middle\">"
      << detail::escape(fig.x_label) << "</text>\n";
  svg << "<text transform=\"translate(20," << fmt(top + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::escape(fig.y_label) << "</text>\n";

  for (std::size_t i = 0; i < fig.series.size(); ++i) {
    const Series& s = fig.series[i];
    const char* color = palette[i % (sizeof palette / sizeof *palette)];
    std::ostringstream pts;
    bool first = true;
    for (const auto& pt : s.points) {
      if (!usable(pt)) continue;
      pts << (first ? "" : " ") << fmt(px(pt.first)) << "," << fmt(py(pt.second));
      first = false;
      if (style == PlotStyle::Markers)
        svg << "<circle cx=\"" << fmt(px(pt.first)) << "\" cy=\"" << fmt(py(pt.second)) << "\" r=\"2.5\" fill=\""
            << color << "\"/>\n";
    }
    if (style == PlotStyle::Lines && !first) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
      if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << "\"";
      svg << " points=\"" << pts.str() << "\"/>\n";
    }
    const double ly = top + 14 + 16.0 * static_cast<double>(i);
    const double lx = left + plot_w + 12;
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\""
        << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << "\"";
    svg << "/>\n<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly) << "\">" << detail::escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline std::string plot_csv(const std::string& csv_text, PlotStyle style) {
  return render_svg(figure_from_csv(parse_csv(csv_text)), style);
}

}  // namespace ftmux
