// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <string>

#include "dostab/charts.hpp"
#include "dostab/csv.hpp"

namespace dostab {

/// Minimal standalone SVG rendering of a control chart: center line, limit
/// polylines, the point series and red markers on violations.
inline std::string chart_svg(const control_chart& chart, int width = 720, int height = 360) {
  const int margin = 40;
  const double plot_w = width - 2.0 * margin;
  const double plot_h = height - 2.0 * margin;
  const std::size_t n = chart.points.size();

  double lo = chart.center, hi = chart.center;
  for (std::size_t i = 0; i < n; ++i) {
    lo = std::min({lo, chart.points[i], chart.lcl[i]});
    hi = std::max({hi, chart.points[i], chart.ucl[i]});
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto sx = [&](std::size_t i) {
    return margin + (n > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(n - 1)
                           : plot_w / 2.0);
  };
  auto sy = [&](double v) { return margin + plot_h * (1.0 - (v - lo) / (hi - lo)); };
  auto polyline = [&](const std::vector<double>& values, const char* style) {
    std::string points;
    for (std::size_t i = 0; i < values.size(); ++i) {
      points += format_double(sx(i));
      points += ',';
      points += format_double(sy(values[i]));
      points += ' ';
    }
    return "<polyline fill=\"none\" " + std::string(style) + " points=\"" + points + "\"/>\n";
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(margin) + "\" y=\"24\" font-family=\"sans-serif\">" +
         std::string(to_string(chart.kind)) + " chart</text>\n";
  svg += polyline(std::vector<double>(n, chart.center), "stroke=\"#2a7\" stroke-width=\"1\"");
  svg += polyline(chart.lcl, "stroke=\"#999\" stroke-dasharray=\"4 3\" stroke-width=\"1\"");
  svg += polyline(chart.ucl, "stroke=\"#999\" stroke-dasharray=\"4 3\" stroke-width=\"1\"");
  svg += polyline(chart.points, "stroke=\"#226\" stroke-width=\"1.5\"");
  for (std::size_t i = 0; i < n; ++i) {
    svg += "<circle cx=\"" + format_double(sx(i)) + "\" cy=\"" + format_double(sy(chart.points[i])) +
           "\" r=\"2.5\" fill=\"#226\"/>\n";
  }
  for (const auto& v : chart.violations) {
    svg += "<circle cx=\"" + format_double(sx(v.index)) + "\" cy=\"" +
           format_double(sy(chart.points[v.index])) + "\" r=\"4\" fill=\"#c22\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dostab
