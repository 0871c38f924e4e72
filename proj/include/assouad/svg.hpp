#pragma once

// Minimal self-contained SVG line charts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace assouad::svg {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  bool dashed = false;
  bool markers = false;  // dots instead of a polyline
};

struct Figure {
  std::string title;
  std::string x_label = "theta";
  std::string y_label;
  std::vector<Series> series;
  double width = 640;
  double height = 420;
  // Fixed axis ranges; NaN means fit to data.
  double x_min = std::numeric_limits<double>::quiet_NaN();
  double x_max = std::numeric_limits<double>::quiet_NaN();
  double y_min = std::numeric_limits<double>::quiet_NaN();
  double y_max = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline const char* colour(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  return palette[i % 7];
}

}  // namespace detail

inline std::string render(const Figure& fig) {
  if (fig.series.empty()) throw std::invalid_argument("svg: no curves to plot");
  double x0 = fig.x_min, x1 = fig.x_max, y0 = fig.y_min, y1 = fig.y_max;
  const bool fit_x = std::isnan(x0) || std::isnan(x1), fit_y = std::isnan(y0) || std::isnan(y1);
  if (fit_x) x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  if (fit_y) y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& s : fig.series) {
    if (s.xs.size() != s.ys.size()) throw std::invalid_argument("svg: series " + s.label + " has mismatched lengths");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      if (fit_x) x0 = std::min(x0, s.xs[i]), x1 = std::max(x1, s.xs[i]);
      if (fit_y) y0 = std::min(y0, s.ys[i]), y1 = std::max(y1, s.ys[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  if (fit_y) {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }

  const double left = 60, right = 20, top = 36, bottom = 48;
  const double pw = fig.width - left - right, ph = fig.height - top - bottom;
  const auto X = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  const auto Y = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  using detail::num;

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(fig.width) + "\" height=\"" + num(fig.height) +
       "\" viewBox=\"0 0 " + num(fig.width) + " " + num(fig.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!fig.title.empty())
    o += "<text x=\"" + num(fig.width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         detail::escape(fig.title) + "</text>\n";
  o += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
    o += "<text x=\"" + num(X(xv)) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"middle\">" + num(xv) +
         "</text>\n";
    o += "<text x=\"" + num(left - 6) + "\" y=\"" + num(Y(yv) + 4) + "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  o += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(fig.height - 10) + "\" text-anchor=\"middle\">" +
       detail::escape(fig.x_label) + "</text>\n";
  if (!fig.y_label.empty())
    o += "<text transform=\"translate(14," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         detail::escape(fig.y_label) + "</text>\n";

  for (std::size_t k = 0; k < fig.series.size(); ++k) {
    const Series& s = fig.series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      const std::string px = num(X(s.xs[i])), py = num(Y(std::clamp(s.ys[i], y0, y1)));
      if (s.markers)
        o += "<circle cx=\"" + px + "\" cy=\"" + py + "\" r=\"1.5\" fill=\"" + detail::colour(k) + "\"/>\n";
      else
        pts += (pts.empty() ? "" : " ") + px + "," + py;
    }
    if (!s.markers)
      o += "<polyline fill=\"none\" stroke=\"" + std::string(detail::colour(k)) + "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"5,4\"" : "") + " points=\"" + pts + "\"/>\n";
    const double ly = top + 14 + 16.0 * static_cast<double>(k);
    o += "<line x1=\"" + num(left + pw - 130) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(left + pw - 110) +
         "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + detail::colour(k) + "\"" +
         (s.dashed ? " stroke-dasharray=\"5,4\"" : "") + "/>\n";
    o += "<text x=\"" + num(left + pw - 104) + "\" y=\"" + num(ly) + "\">" + detail::escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace assouad::svg
