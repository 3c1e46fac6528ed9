#pragma once

// Minimal static SVG line/scatter plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace normlap::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool scatter = false;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  int width = 720;
  int height = 440;
  bool equal_aspect = false;
};

namespace detail {

inline std::string fmt(double v, int prec = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
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

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                           "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

/// Renders the series into a standalone SVG document. Output depends only on
/// the input numbers.
inline std::string render(const Plot& plot, const std::vector<Series>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1;
  if (!(ymin <= ymax)) ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-300) xmin -= 0.5, xmax += 0.5;
  if (ymax - ymin < 1e-300) ymin -= 0.5, ymax += 0.5;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double left = 70, right = 160, top = 40, bottom = 50;
  double pw = plot.width - left - right, ph = plot.height - top - bottom;
  if (plot.equal_aspect) {
    const double sx = pw / (xmax - xmin), sy = ph / (ymax - ymin);
    const double s = std::min(sx, sy);
    pw = s * (xmax - xmin);
    ph = s * (ymax - ymin);
  }
  auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(plot.width) + "\" height=\"" +
       std::to_string(plot.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + detail::fmt(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::escape(plot.title) + "</text>\n";
  o += "<rect x=\"" + detail::fmt(left) + "\" y=\"" + detail::fmt(top) + "\" width=\"" + detail::fmt(pw) +
       "\" height=\"" + detail::fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0, yv = ymin + (ymax - ymin) * i / 4.0;
    o += "<line x1=\"" + detail::fmt(X(xv)) + "\" y1=\"" + detail::fmt(top + ph) + "\" x2=\"" + detail::fmt(X(xv)) +
         "\" y2=\"" + detail::fmt(top + ph + 5) + "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + detail::fmt(X(xv)) + "\" y=\"" + detail::fmt(top + ph + 18) + "\" text-anchor=\"middle\">" +
         detail::tick_label(xv) + "</text>\n";
    o += "<line x1=\"" + detail::fmt(left - 5) + "\" y1=\"" + detail::fmt(Y(yv)) + "\" x2=\"" + detail::fmt(left) +
         "\" y2=\"" + detail::fmt(Y(yv)) + "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + detail::fmt(left - 8) + "\" y=\"" + detail::fmt(Y(yv) + 4) + "\" text-anchor=\"end\">" +
         detail::tick_label(yv) + "</text>\n";
  }
  o += "<text x=\"" + detail::fmt(left + pw / 2) + "\" y=\"" + detail::fmt(top + ph + 38) +
       "\" text-anchor=\"middle\">" + detail::escape(plot.xlabel) + "</text>\n";
  o += "<text x=\"16\" y=\"" + detail::fmt(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       detail::fmt(top + ph / 2) + ")\">" + detail::escape(plot.ylabel) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = detail::kPalette[k % (sizeof detail::kPalette / sizeof detail::kPalette[0])];
    if (s.scatter) {
      o += "<g fill=\"" + std::string(color) + "\">\n";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o += "<circle cx=\"" + detail::fmt(X(s.x[i])) + "\" cy=\"" + detail::fmt(Y(s.y[i])) + "\" r=\"2\"/>\n";
      }
      o += "</g>\n";
    } else {
      o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        o += detail::fmt(X(s.x[i])) + "," + detail::fmt(Y(s.y[i])) + " ";
      }
      o += "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    o += "<rect x=\"" + detail::fmt(plot.width - right + 12) + "\" y=\"" + detail::fmt(ly - 9) +
         "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    o += "<text x=\"" + detail::fmt(plot.width - right + 30) + "\" y=\"" + detail::fmt(ly + 1) + "\">" +
         detail::escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace normlap::svg
