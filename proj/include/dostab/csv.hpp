// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dostab/charts.hpp"
#include "dostab/core.hpp"
#include "dostab/error.hpp"
#include "dostab/metrics.hpp"

namespace dostab {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc())
    throw error(errc::invariant_violation, "double formatting failed");
  return std::string(buf, end);
}

inline constexpr std::string_view score_csv_header =
    "interval,proposal,T1,T2,T3,T4,T5,T,NWA,NIWA";

/// One score row per tally, in input order.
inline std::string score_csv(std::span<const tally> tallies) {
  std::string out(score_csv_header);
  out += '\n';
  for (const auto& t : tallies) {
    out += std::to_string(t.interval.index);
    out += ',';
    out += std::to_string(t.proposal);
    for (std::uint64_t count : t.counts) {
      out += ',';
      out += std::to_string(count);
    }
    out += ',';
    out += std::to_string(t.total());
    out += ',';
    out += format_double(nwa(t).value());
    out += ',';
    out += format_double(niwa(t).value());
    out += '\n';
  }
  return out;
}

inline constexpr std::string_view chart_csv_header = "index,point,center,lcl,ucl,violation";

inline std::string chart_csv(const control_chart& chart) {
  std::string out(chart_csv_header);
  out += '\n';
  std::vector<bool> violated(chart.points.size(), false);
  for (const auto& v : chart.violations) violated[v.index] = true;
  for (std::size_t i = 0; i < chart.points.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(chart.points[i]);
    out += ',';
    out += format_double(chart.center);
    out += ',';
    out += format_double(chart.lcl[i]);
    out += ',';
    out += format_double(chart.ucl[i]);
    out += ',';
    out += violated[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

/// Reads a plain numeric series: one value per token, whitespace separated,
/// '#' starts a comment that runs to end of line.
inline std::vector<double> parse_series(std::string_view text) {
  std::vector<double> series;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ',') {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' && text[end] != '\r' &&
           text[end] != '\n' && text[end] != ',' && text[end] != '#')
      ++end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, value);
    if (ec != std::errc() || ptr != text.data() + end)
      throw error(errc::parse_error,
                  "'" + std::string(text.substr(pos, end - pos)) + "' is not a number");
    series.push_back(value);
    pos = end;
  }
  return series;
}

}  // namespace dostab
