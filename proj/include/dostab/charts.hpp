// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dostab/error.hpp"

namespace dostab {

/// Shewhart constants for subgroup size 2 (consecutive-pair moving ranges).
struct chart_constants {
  static constexpr double d2 = 1.128;
  static constexpr double d4 = 3.267;
  static constexpr double limit_sigmas = 3.0;
};

enum class chart_kind { individuals, moving_range, ewma };

constexpr std::string_view to_string(chart_kind kind) noexcept {
  switch (kind) {
    case chart_kind::individuals: return "individuals";
    case chart_kind::moving_range: return "moving_range";
    case chart_kind::ewma: return "ewma";
  }
  return "?";
}

enum class violation_side { low, high };

struct chart_violation {
  std::size_t index{0};
  violation_side side{violation_side::low};
  bool operator==(const chart_violation&) const = default;
};

/// One rendered control chart. Limits are stored per point; for the
/// individuals and moving-range charts they are flat, for the EWMA chart they
/// widen with the point index. A point violates only when it lies strictly
/// outside a limit; sitting exactly on a limit is in control.
struct control_chart {
  chart_kind kind{chart_kind::individuals};
  std::vector<double> points;
  double center{0.0};
  std::vector<double> lcl;
  std::vector<double> ucl;
  std::vector<chart_violation> violations;
};

inline std::vector<chart_violation> detect_violations(std::span<const double> points,
                                                      std::span<const double> lcl,
                                                      std::span<const double> ucl) {
  std::vector<chart_violation> found;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] < lcl[i])
      found.push_back({i, violation_side::low});
    else if (points[i] > ucl[i])
      found.push_back({i, violation_side::high});
  }
  return found;
}

/// Absolute differences of consecutive points; one element shorter than the
/// input series.
inline std::vector<double> moving_ranges(std::span<const double> series) {
  if (series.size() < 2)
    throw error(errc::series_too_short, "moving ranges need at least 2 points");
  std::vector<double> ranges;
  ranges.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i)
    ranges.push_back(std::fabs(series[i + 1] - series[i]));
  return ranges;
}

inline double mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

/// Process sigma estimated from the mean moving range: sigma = mr_bar / d2.
inline double estimate_sigma(std::span<const double> series) {
  const auto ranges = moving_ranges(series);
  return mean(ranges) / chart_constants::d2;
}

/// Individuals chart: raw points, center at the series mean, limits at
/// center +/- 3 sigma with sigma from the moving ranges.
inline control_chart i_chart(std::span<const double> series) {
  if (series.size() < 2)
    throw error(errc::series_too_short, "an individuals chart needs at least 2 points");
  control_chart chart;
  chart.kind = chart_kind::individuals;
  chart.points.assign(series.begin(), series.end());
  chart.center = mean(series);
  const double sigma = estimate_sigma(series);
  const double low = chart.center - chart_constants::limit_sigmas * sigma;
  const double high = chart.center + chart_constants::limit_sigmas * sigma;
  chart.lcl.assign(series.size(), low);
  chart.ucl.assign(series.size(), high);
  chart.violations = detect_violations(chart.points, chart.lcl, chart.ucl);
  return chart;
}

/// Moving-range chart: the ranges themselves, center at mr_bar, UCL at
/// d4 * mr_bar and LCL pinned to 0 (D3 is 0 at subgroup size 2).
inline control_chart mr_chart(std::span<const double> series) {
  control_chart chart;
  chart.kind = chart_kind::moving_range;
  chart.points = moving_ranges(series);
  chart.center = mean(chart.points);
  chart.lcl.assign(chart.points.size(), 0.0);
  chart.ucl.assign(chart.points.size(), chart_constants::d4 * chart.center);
  chart.violations = detect_violations(chart.points, chart.lcl, chart.ucl);
  return chart;
}

struct ewma_config {
  double lambda = 0.2;
};

/// EWMA chart: z_i = lambda * x_i + (1 - lambda) * z_{i-1}, seeded with
/// z_0 = series mean. Limits widen with i:
///   center +/- 3 sigma * sqrt(lambda / (2 - lambda) * (1 - (1-lambda)^(2i)))
/// so early points are held to tighter bounds. At lambda = 1 the chart
/// degenerates to the individuals chart.
inline control_chart ewma_chart(std::span<const double> series, ewma_config cfg = {}) {
  if (!(cfg.lambda > 0.0) || cfg.lambda > 1.0)
    throw error(errc::bad_lambda, "lambda must lie in (0, 1]");
  if (series.size() < 2)
    throw error(errc::series_too_short, "an EWMA chart needs at least 2 points");

  control_chart chart;
  chart.kind = chart_kind::ewma;
  chart.center = mean(series);
  const double sigma = estimate_sigma(series);

  double z = chart.center;
  // (1-lambda)^(2i) kept as a running product: identical rounding on every
  // platform, where a libm pow call could differ in the last ulp.
  const double decay_step = (1.0 - cfg.lambda) * (1.0 - cfg.lambda);
  double decay = 1.0;
  chart.points.reserve(series.size());
  chart.lcl.reserve(series.size());
  chart.ucl.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    z = cfg.lambda * series[i] + (1.0 - cfg.lambda) * z;
    chart.points.push_back(z);
    decay *= decay_step;
    const double shrink = cfg.lambda / (2.0 - cfg.lambda) * (1.0 - decay);
    const double width = chart_constants::limit_sigmas * sigma * std::sqrt(shrink);
    chart.lcl.push_back(chart.center - width);
    chart.ucl.push_back(chart.center + width);
  }
  chart.violations = detect_violations(chart.points, chart.lcl, chart.ucl);
  return chart;
}

}  // namespace dostab
