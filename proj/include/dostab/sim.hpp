// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dostab/charts.hpp"
#include "dostab/core.hpp"
#include "dostab/error.hpp"
#include "dostab/ledger.hpp"
#include "dostab/metrics.hpp"
#include "dostab/rng.hpp"
#include "dostab/triggers.hpp"

namespace dostab {

/// Voters draw each choice with probability exactly 1/5, independently per
/// interval.
struct uniform_sampler_config {
  std::uint32_t voters = 8;
  std::uint32_t intervals = 30;
  std::uint64_t seed = 0;
};

/// Opinion drifts towards full agreement: per interval k the weight on the
/// first choice grows by step_up * k while the other four each lose
/// step_down * k, clamped at zero and renormalised.
struct drifting_sampler_config {
  std::array<double, 5> initial_p{0.05, 0.15, 0.15, 0.30, 0.35};
  double step_up = 0.02;
  double step_down = 0.005;
  std::uint32_t voters = 8;
  std::uint32_t intervals = 30;
  std::uint64_t seed = 0;
};

using sampler_config = std::variant<uniform_sampler_config, drifting_sampler_config>;

/// One interval's ballots, in voter order.
using interval_votes = std::vector<vote_choice>;

inline interval_votes sample_uniform_interval(rng& gen, std::uint32_t voters) {
  interval_votes votes;
  votes.reserve(voters);
  for (std::uint32_t j = 0; j < voters; ++j)
    votes.push_back(vote_choice::from_ordinal(static_cast<int>(gen.below(5)) + 1));
  return votes;
}

/// Choice distribution for interval k under the drifting sampler.
inline std::array<double, 5> drift_probabilities(const drifting_sampler_config& cfg,
                                                 std::uint32_t k) {
  std::array<double, 5> p = cfg.initial_p;
  p[0] += cfg.step_up * static_cast<double>(k);
  for (std::size_t c = 1; c < p.size(); ++c) {
    p[c] -= cfg.step_down * static_cast<double>(k);
    if (p[c] < 0.0) p[c] = 0.0;
  }
  double sum = 0.0;
  for (double v : p) sum += v;
  if (!(sum > 0.0))
    throw error(errc::bad_config, "drift probabilities collapsed to zero mass");
  for (double& v : p) v /= sum;
  return p;
}

inline interval_votes sample_drift_interval(rng& gen, const std::array<double, 5>& p,
                                            std::uint32_t voters) {
  interval_votes votes;
  votes.reserve(voters);
  for (std::uint32_t j = 0; j < voters; ++j) {
    const double u = gen.unit();
    double cumulative = 0.0;
    int ordinal = 5;  // float dust can leave u above the final cumulative sum
    for (int c = 0; c < 5; ++c) {
      cumulative += p[static_cast<std::size_t>(c)];
      if (u < cumulative) {
        ordinal = c + 1;
        break;
      }
    }
    votes.push_back(vote_choice::from_ordinal(ordinal));
  }
  return votes;
}

struct violation_report {
  std::size_t individuals{0};
  std::size_t moving_range{0};
  std::size_t ewma{0};
};

struct experiment_config {
  sampler_config sampler;
  ewma_config ewma;
  // Block-height distance an interval's elapsed-time proof must show.
  std::uint64_t blocks_per_interval = 16;
};

struct experiment_result {
  std::vector<tally> tallies;
  std::vector<double> series;  // NIWA per interval
  std::optional<control_chart> individuals;
  std::optional<control_chart> moving_range;
  std::optional<control_chart> ewma;
  violation_report violations;
  vote_ledger ledger;
};

/// Runs one full repeated election through the real ledger: registers the
/// voters, then per interval samples ballots, records them, tallies, scores
/// and closes the interval with a block-height proof.
inline experiment_result run_experiment(const experiment_config& cfg) {
  const std::uint32_t voters =
      std::visit([](const auto& s) { return s.voters; }, cfg.sampler);
  const std::uint32_t intervals =
      std::visit([](const auto& s) { return s.intervals; }, cfg.sampler);
  const std::uint64_t seed = std::visit([](const auto& s) { return s.seed; }, cfg.sampler);
  if (voters == 0) throw error(errc::bad_config, "an experiment needs at least 1 voter");
  if (intervals == 0) throw error(errc::bad_config, "an experiment needs at least 1 interval");

  const std::string ea = "ea";
  vote_ledger ledger(vote_ledger::config{ea, {}},
                     {proposal{0, "stay the course", proposal_kind::generic}});
  for (std::uint32_t j = 1; j <= voters; ++j)
    ledger.register_stakeholder(ea, stakeholder_id{j}, 1, "token:" + std::to_string(j));
  ledger.advance_phase(ea);

  rng gen(seed);
  std::vector<tally> tallies;
  std::vector<double> series;
  tallies.reserve(intervals);
  series.reserve(intervals);

  std::uint64_t height = 0;
  for (std::uint32_t k = 0; k < intervals; ++k) {
    const interval_votes votes = std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, uniform_sampler_config>) {
            return sample_uniform_interval(gen, voters);
          } else {
            return sample_drift_interval(gen, drift_probabilities(s, k), voters);
          }
        },
        cfg.sampler);

    const interval_id interval = ledger.current_interval();
    for (std::uint32_t j = 0; j < voters; ++j) {
      const stakeholder_id voter{j + 1};
      ledger.vote_in_interval(0, interval, voter, votes[j],
                              identity_proof{voter, "token:" + std::to_string(voter.value)});
    }
    ledger.advance_phase(ea);  // voting -> tallying

    const tally t = ledger.tally_in_interval(0, interval);
    series.push_back(niwa(t).value());
    tallies.push_back(t);

    ledger.update_interval(block_height_proof{height, height + cfg.blocks_per_interval,
                                              cfg.blocks_per_interval});
    height += cfg.blocks_per_interval;
  }

  experiment_result result{std::move(tallies), std::move(series), std::nullopt,
                           std::nullopt,       std::nullopt,      violation_report{},
                           std::move(ledger)};
  if (result.series.size() >= 2) {
    result.individuals = i_chart(result.series);
    result.moving_range = mr_chart(result.series);
    result.ewma = ewma_chart(result.series, cfg.ewma);
    result.violations.individuals = result.individuals->violations.size();
    result.violations.moving_range = result.moving_range->violations.size();
    result.violations.ewma = result.ewma->violations.size();
  }
  return result;
}

}  // namespace dostab
