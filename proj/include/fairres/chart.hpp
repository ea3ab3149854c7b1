#pragma once

// Self-contained SVG line charts with linear axes and a legend.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fairres {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), x ascending
};

struct ChartSpec {
  std::string title;
  std::string x_label = "t";
  std::string y_label = "mean cumulative loss";
  int width = 720;
  int height = 440;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Step of 1, 2 or 5 times a power of ten giving at most `target` intervals.
inline double tick_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  double raw = span / target;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

inline std::string tick_label(double v) {
  char buf[32];
  double a = std::fabs(v);
  if (a != 0.0 && (a >= 1e6 || a < 1e-3))
    std::snprintf(buf, sizeof buf, "%.3g", v);
  else
    std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

inline std::string render_line_chart(const ChartSpec& spec, const std::vector<ChartSeries>& series) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = -x0;
  double y0 = 0.0;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y1 = 1.0;
  x0 = std::min(x0, 0.0);
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  const double xs = detail::tick_step(x1 - x0, 6), ys = detail::tick_step(y1 - y0, 6);
  x1 = std::ceil(x1 / xs) * xs;
  y1 = std::ceil(y1 / ys) * ys;
  y0 = std::floor(y0 / ys) * ys;

  const double left = 90, right = 180, top = 40, bottom = 60;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << detail::xml_escape(spec.title) << "</text>\n";

  for (double v = x0; v <= x1 + xs * 1e-9; v += xs) {
    o << "<line x1=\"" << detail::coord(px(v)) << "\" y1=\"" << detail::coord(top) << "\" x2=\"" << detail::coord(px(v))
      << "\" y2=\"" << detail::coord(top + ph) << "\" stroke=\"#e5e5e5\"/>\n";
    o << "<text x=\"" << detail::coord(px(v)) << "\" y=\"" << detail::coord(top + ph + 18)
      << "\" text-anchor=\"middle\">" << detail::tick_label(v) << "</text>\n";
  }
  for (double v = y0; v <= y1 + ys * 1e-9; v += ys) {
    o << "<line x1=\"" << detail::coord(left) << "\" y1=\"" << detail::coord(py(v)) << "\" x2=\""
      << detail::coord(left + pw) << "\" y2=\"" << detail::coord(py(v)) << "\" stroke=\"#e5e5e5\"/>\n";
    o << "<text x=\"" << detail::coord(left - 8) << "\" y=\"" << detail::coord(py(v) + 4) << "\" text-anchor=\"end\">"
      << detail::tick_label(v) << "</text>\n";
  }
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << detail::coord(left + pw / 2) << "\" y=\"" << spec.height - 15 << "\" text-anchor=\"middle\">"
    << detail::xml_escape(spec.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << detail::coord(top + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << detail::xml_escape(spec.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % (sizeof palette / sizeof *palette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t p = 0; p < series[s].points.size(); ++p) {
      auto [x, y] = series[s].points[p];
      o << (p ? " " : "") << detail::coord(px(x)) << "," << detail::coord(py(y));
    }
    o << "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(s);
    o << "<line x1=\"" << detail::coord(left + pw + 15) << "\" y1=\"" << detail::coord(ly) << "\" x2=\""
      << detail::coord(left + pw + 40) << "\" y2=\"" << detail::coord(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << detail::coord(left + pw + 46) << "\" y=\"" << detail::coord(ly + 4) << "\">"
      << detail::xml_escape(series[s].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace fairres
