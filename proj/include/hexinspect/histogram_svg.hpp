#pragma once

// Quality histogram as a standalone SVG legend: bars colored through the
// active color map, axis labelled in raw metric units.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "hexinspect/colormap.hpp"
#include "hexinspect/quality.hpp"

namespace hexinspect {

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string hex(const Rgb& c) {
  const auto b = [](double x) { return static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", b(c.r), b(c.g), b(c.b));
  return buf;
}

/// Raw value at a normalized position, interpolated between bin edges
/// (every normalization is affine between its extrema, so this is exact).
inline double raw_at(const Histogram& h, double t) {
  if (h.raw_edges.empty()) return t;
  const double pos = t * static_cast<double>(h.bins());
  const auto i = std::min(h.bins() - 1, static_cast<std::size_t>(pos));
  const double f = pos - static_cast<double>(i);
  return h.raw_edges[i] + (h.raw_edges[i + 1] - h.raw_edges[i]) * f;
}

}  // namespace svg_detail

/// Color of histogram bin i: the map sampled evenly from the worst bin to
/// the best, so the first and last bars carry the map's end colors.
inline Rgb histogram_bar_color(std::size_t i, std::size_t bins, Colormap map) {
  if (map == Colormap::None) return {0.55, 0.55, 0.6};
  const double t = bins <= 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(bins - 1);
  return apply_colormap(t, map);
}

/// Horizontal: quality along x, counts upward. Vertical: quality along y,
/// counts to the right. The worst bin sits at the right (horizontal) or the
/// bottom (vertical), and the tick labels are the same in both.
inline std::string render_histogram(const Histogram& h, Colormap map) {
  using namespace svg_detail;
  const bool vertical = h.orientation == Orientation::Vertical;
  const double axis_len = 400.0, bar_len = 200.0, margin = 40.0;
  const double width = vertical ? bar_len + 2 * margin : axis_len + 2 * margin;
  const double height = vertical ? axis_len + 2 * margin : bar_len + 2 * margin;
  std::size_t peak = 1;
  for (auto c : h.counts) peak = std::max(peak, c);
  const double step = axis_len / static_cast<double>(std::max<std::size_t>(1, h.bins()));

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) + "\" height=\"" + px(height) +
                  "\" viewBox=\"0 0 " + px(width) + " " + px(height) + "\">\n";
  s += "<title>" + std::string(metric_name(h.metric)) + " histogram</title>\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    // Bin i covers normalized [i/bins, (i+1)/bins]; normalized 1 (best) is at the axis origin.
    const double a = (static_cast<double>(h.bins() - 1 - i)) * step;
    const double len = bar_len * static_cast<double>(h.counts[i]) / static_cast<double>(peak);
    double x, y, w, hh;
    if (vertical) {
      x = margin;
      y = margin + a;
      w = len;
      hh = step;
    } else {
      x = margin + a;
      y = margin + bar_len - len;
      w = step;
      hh = len;
    }
    s += "<rect class=\"bar\" data-bin=\"" + std::to_string(i) + "\" data-count=\"" + std::to_string(h.counts[i]) +
         "\" x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(w) + "\" height=\"" + px(hh) + "\" fill=\"" +
         hex(histogram_bar_color(i, h.bins(), map)) + "\"/>\n";
  }
  // Raw tick labels at the best end, the middle and the worst end.
  const auto tick = [&](double t_norm) {
    const double raw = raw_at(h, t_norm);
    const double a = (1.0 - t_norm) * axis_len;
    const double x = vertical ? margin + bar_len + 4 : margin + a;
    const double y = vertical ? margin + a : margin + bar_len + 16;
    return "<text class=\"tick\" x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"11\">" + num(raw) + "</text>\n";
  };
  s += tick(1.0);
  s += tick(0.5);
  s += tick(0.0);
  s += "<text class=\"label\" x=\"" + px(margin) + "\" y=\"" + px(margin - 12) + "\" font-size=\"13\">" +
       std::string(metric_spec(h.metric).long_name) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace hexinspect
