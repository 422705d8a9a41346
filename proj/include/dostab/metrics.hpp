// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dostab/core.hpp"
#include "dostab/error.hpp"
#include "dostab/ledger.hpp"
#include "dostab/rational.hpp"

namespace dostab {

/// Choice weights for the weighted average: +2/5, +1/5, 0, -1/5, -2/5 from
/// full agreement down to full disagreement.
struct choice_weights {
  static rational weight(vote_choice c) {
    return rational(3 - static_cast<std::int64_t>(c.ordinal()), 5);
  }
};

inline std::uint64_t total_votes(const tally& t) noexcept { return t.total(); }

/// Normalised weighted average over a tally: the weighted sum of choice
/// counts, rescaled by 5/2 so the result spans [-1, 1] exactly. +1 means every
/// vote was full agreement, -1 full disagreement.
inline rational nwa(const tally& t) {
  const std::uint64_t total = t.total();
  if (total == 0)
    throw error(errc::empty_tally, "cannot score a tally with no votes");
  rational acc(0);
  for (vote_choice c : vote_choice::all())
    acc = acc + choice_weights::weight(c) *
                    rational(static_cast<std::int64_t>(t.count_for(c)));
  return acc * rational(5, 2) / rational(static_cast<std::int64_t>(total));
}

/// Normalised inverse weighted average: rescales the NWA onto [0, 1] and
/// flips it, so 0 is unanimous agreement, 1 unanimous disagreement and 1/2
/// the neutral midpoint.
inline rational niwa(const tally& t) {
  return rational(1) - (nwa(t) + rational(1)) / rational(2);
}

struct niwa_score {
  rational value;
  std::uint64_t proposal{0};
  interval_id interval;
};

/// NIWA per interval over the inclusive range [first, last] for one proposal.
/// Every interval in the range must hold at least one vote.
inline std::vector<niwa_score> niwa_series(const vote_ledger& ledger, std::uint64_t proposal_id,
                                           interval_id first, interval_id last) {
  std::vector<niwa_score> series;
  for (interval_id i = first; i <= last; i = i.next()) {
    const tally t = ledger.tally_in_interval(proposal_id, i);
    if (t.total() == 0)
      throw error(errc::empty_tally,
                  "interval " + std::to_string(i.index) + " holds no votes for proposal " +
                      std::to_string(proposal_id));
    series.push_back(niwa_score{niwa(t), proposal_id, i});
  }
  return series;
}

/// Joint reading of the three recurring proposals (stay with own group, join
/// the other group, exit entirely) for one interval.
enum class quad_classification {
  neutral,
  best_case,  // unanimous agreement to stay, unanimous rejection of leaving
  exit_risk,  // the exit proposal sits closer to agreement than either stay option
};

struct quadrilateral_snapshot {
  niwa_score own_group;
  niwa_score other_group;
  niwa_score exit;
  quad_classification classification{quad_classification::neutral};
};

/// Classifies one interval's (own, other, exit) NIWA triple. Best case is the
/// exact corner (0, 0, 1); exit risk means the exit score is strictly closer
/// to 0 (agreement) than both stay scores are.
inline quadrilateral_snapshot make_quadrilateral_snapshot(const niwa_score& own,
                                                          const niwa_score& other,
                                                          const niwa_score& exit_score,
                                                          bool flag_exit_risk = true) {
  if (own.interval != other.interval || own.interval != exit_score.interval)
    throw error(errc::interval_mismatch, "quadrilateral scores must share one interval");

  quadrilateral_snapshot snap{own, other, exit_score, quad_classification::neutral};
  if (own.value == rational(0) && other.value == rational(0) && exit_score.value == rational(1)) {
    snap.classification = quad_classification::best_case;
  } else if (flag_exit_risk && exit_score.value < own.value &&
             exit_score.value < other.value) {
    snap.classification = quad_classification::exit_risk;
  }
  return snap;
}

}  // namespace dostab
