// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dostab/error.hpp"
#include "dostab/sim.hpp"

namespace dostab {

/// Simulation settings as read from a key=value file. `seed` stays unset
/// unless the file provides one; the CLI then requires --seed instead.
struct sim_file_config {
  std::string sampler = "uniform";
  std::uint32_t voters = 8;
  std::uint32_t intervals = 30;
  bool has_seed = false;
  std::uint64_t seed = 0;
  double lambda = 0.2;
  std::uint64_t blocks_per_interval = 16;
  std::array<double, 5> initial_p{0.05, 0.15, 0.15, 0.30, 0.35};
  double step_up = 0.02;
  double step_down = 0.005;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw error(errc::bad_config,
                "'" + std::string(text) + "' is not a valid value for " + std::string(key));
  return value;
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Unknown keys are rejected rather than ignored, so typos fail loudly.
inline sim_file_config parse_sim_config(std::string_view text) {
  sim_file_config cfg;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw error(errc::bad_config, "expected key=value, got '" + std::string(line) + "'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));

    if (key == "sampler") {
      if (value != "uniform" && value != "drift")
        throw error(errc::bad_config, "sampler must be 'uniform' or 'drift'");
      cfg.sampler = std::string(value);
    } else if (key == "voters") {
      cfg.voters = detail::parse_number<std::uint32_t>(value, key);
    } else if (key == "intervals") {
      cfg.intervals = detail::parse_number<std::uint32_t>(value, key);
    } else if (key == "seed") {
      cfg.seed = detail::parse_number<std::uint64_t>(value, key);
      cfg.has_seed = true;
    } else if (key == "lambda") {
      cfg.lambda = detail::parse_number<double>(value, key);
    } else if (key == "blocks_per_interval") {
      cfg.blocks_per_interval = detail::parse_number<std::uint64_t>(value, key);
    } else if (key == "initial_p") {
      std::vector<double> parts;
      std::size_t start = 0;
      std::string value_str(value);
      while (start <= value_str.size()) {
        const std::size_t comma = value_str.find(',', start);
        const std::string part(detail::trim(
            std::string_view(value_str).substr(start, comma == std::string::npos
                                                          ? value_str.size() - start
                                                          : comma - start)));
        parts.push_back(detail::parse_number<double>(part, key));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (parts.size() != 5)
        throw error(errc::bad_config, "initial_p needs exactly 5 comma-separated values");
      for (std::size_t i = 0; i < 5; ++i) cfg.initial_p[i] = parts[i];
    } else if (key == "step_up") {
      cfg.step_up = detail::parse_number<double>(value, key);
    } else if (key == "step_down") {
      cfg.step_down = detail::parse_number<double>(value, key);
    } else {
      throw error(errc::bad_config, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

/// Binds a file config and a concrete seed into a runnable experiment.
inline experiment_config make_experiment_config(const sim_file_config& file,
                                                std::uint64_t seed) {
  experiment_config cfg;
  if (file.sampler == "uniform") {
    cfg.sampler = uniform_sampler_config{file.voters, file.intervals, seed};
  } else {
    cfg.sampler = drifting_sampler_config{file.initial_p, file.step_up, file.step_down,
                                          file.voters,    file.intervals, seed};
  }
  cfg.ewma.lambda = file.lambda;
  cfg.blocks_per_interval = file.blocks_per_interval;
  return cfg;
}

}  // namespace dostab
