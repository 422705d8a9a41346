// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <cstdint>

#include <catch2/catch_amalgamated.hpp>

#include "dostab/core.hpp"
#include "dostab/error.hpp"
#include "dostab/ledger.hpp"
#include "dostab/metrics.hpp"
#include "dostab/rng.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

using namespace dostab;
using testutil::make_tally;
using testutil::token_for;

TEST_CASE("choice weights step down from +2/5 to -2/5") {
  CHECK(choice_weights::weight(vote_choice::from_ordinal(1)) == rational(2, 5));
  CHECK(choice_weights::weight(vote_choice::from_ordinal(2)) == rational(1, 5));
  CHECK(choice_weights::weight(vote_choice::from_ordinal(3)) == rational(0));
  CHECK(choice_weights::weight(vote_choice::from_ordinal(4)) == rational(-1, 5));
  CHECK(choice_weights::weight(vote_choice::from_ordinal(5)) == rational(-2, 5));
}

TEST_CASE("the (2,1,3,1,1) tally scores NWA 1/8 and NIWA 7/16") {
  const tally t = make_tally({2, 1, 3, 1, 1});
  CHECK(nwa(t) == rational(1, 8));
  CHECK(niwa(t) == rational(7, 16));
  CHECK(nwa(t).value() == 0.125);
  CHECK(niwa(t).value() == 0.4375);
  CHECK(std::fabs(nwa(t).value() - oracle::naive_nwa(t.counts)) <= 1e-12);
  CHECK(std::fabs(niwa(t).value() - oracle::naive_niwa(t.counts)) <= 1e-12);
}

TEST_CASE("unanimous tallies hit the exact boundaries") {
  CHECK(nwa(make_tally({4, 0, 0, 0, 0})) == rational(1));
  CHECK(niwa(make_tally({4, 0, 0, 0, 0})) == rational(0));

  CHECK(nwa(make_tally({0, 0, 0, 0, 9})) == rational(-1));
  CHECK(niwa(make_tally({0, 0, 0, 0, 9})) == rational(1));

  CHECK(nwa(make_tally({0, 0, 7, 0, 0})) == rational(0));
  CHECK(niwa(make_tally({0, 0, 7, 0, 0})) == rational(1, 2));
}

TEST_CASE("empty tallies cannot be scored") {
  try {
    (void)nwa(make_tally({0, 0, 0, 0, 0}));
    FAIL("expected empty_tally");
  } catch (const error& e) {
    CHECK(e.code() == errc::empty_tally);
  }
}

TEST_CASE("random tallies stay in range and match the reference formula") {
  rng gen(31);
  for (int round = 0; round < 500; ++round) {
    std::array<std::uint64_t, 5> counts{};
    std::uint64_t total = 0;
    for (auto& c : counts) {
      c = gen.below(20);
      total += c;
    }
    if (total == 0) counts[gen.below(5)] = total = 1;
    const tally t = make_tally(counts);

    const rational w = nwa(t);
    const rational iw = niwa(t);
    CHECK(rational(-1) <= w);
    CHECK(w <= rational(1));
    CHECK(rational(0) <= iw);
    CHECK(iw <= rational(1));
    CHECK(std::fabs(w.value() - oracle::naive_nwa(counts)) <= 1e-12);
    CHECK(std::fabs(iw.value() - oracle::naive_niwa(counts)) <= 1e-12);
    // The two scores are tied by construction.
    CHECK(iw == rational(1) - (w + rational(1)) / rational(2));
  }
}

TEST_CASE("scores are invariant under uniform tally scaling") {
  rng gen(59);
  for (int round = 0; round < 200; ++round) {
    std::array<std::uint64_t, 5> counts{};
    std::uint64_t total = 0;
    for (auto& c : counts) {
      c = gen.below(12);
      total += c;
    }
    if (total == 0) counts[gen.below(5)] = 1;
    const std::uint64_t k = 2 + gen.below(9);

    std::array<std::uint64_t, 5> scaled{};
    for (std::size_t i = 0; i < 5; ++i) scaled[i] = counts[i] * k;

    CHECK(nwa(make_tally(counts)) == nwa(make_tally(scaled)));
    CHECK(niwa(make_tally(counts)) == niwa(make_tally(scaled)));
  }
}

TEST_CASE("mirroring a tally negates NWA and reflects NIWA") {
  rng gen(61);
  for (int round = 0; round < 200; ++round) {
    std::array<std::uint64_t, 5> counts{};
    std::uint64_t total = 0;
    for (auto& c : counts) {
      c = gen.below(12);
      total += c;
    }
    if (total == 0) counts[gen.below(5)] = 1;

    const std::array<std::uint64_t, 5> mirrored{counts[4], counts[3], counts[2],
                                                counts[1], counts[0]};
    CHECK(nwa(make_tally(mirrored)) == rational(0) - nwa(make_tally(counts)));
    CHECK(niwa(make_tally(mirrored)) == rational(1) - niwa(make_tally(counts)));
  }
}

TEST_CASE("weighted tallies equal their unit-vote expansion") {
  rng gen(47);
  for (int round = 0; round < 500; ++round) {
    const std::uint32_t voters = 1 + static_cast<std::uint32_t>(gen.below(16));
    tally weighted = make_tally({0, 0, 0, 0, 0});
    tally expanded = make_tally({0, 0, 0, 0, 0});
    for (std::uint32_t j = 0; j < voters; ++j) {
      const std::uint64_t weight = 1 + gen.below(5);
      const auto choice = vote_choice::from_ordinal(1 + static_cast<int>(gen.below(5)));
      weighted.count_for(choice) += weight;
      for (std::uint64_t u = 0; u < weight; ++u) expanded.count_for(choice) += 1;
    }
    CHECK(weighted == expanded);
    CHECK(niwa(weighted) == niwa(expanded));
  }
}

TEST_CASE("niwa series walks closed intervals in order") {
  const std::string ea = "ea";
  vote_ledger ledger(vote_ledger::config{ea, {}}, {proposal{0, "q", proposal_kind::generic}});
  for (std::uint64_t j = 1; j <= 4; ++j)
    ledger.register_stakeholder(ea, stakeholder_id{j}, 1, token_for(j));
  ledger.advance_phase(ea);

  const std::array<std::array<int, 4>, 3> rounds{{{1, 1, 1, 1}, {3, 3, 3, 3}, {5, 5, 5, 5}}};
  std::uint64_t height = 0;
  for (const auto& round : rounds) {
    for (std::uint64_t j = 1; j <= 4; ++j)
      ledger.vote_in_interval(0, ledger.current_interval(), stakeholder_id{j},
                              vote_choice::from_ordinal(round[j - 1]),
                              identity_proof{stakeholder_id{j}, token_for(j)});
    ledger.advance_phase(ea);
    ledger.update_interval(block_height_proof{height, height + 16, 16});
    height += 16;
  }

  const auto series = niwa_series(ledger, 0, interval_id{0}, interval_id{2});
  REQUIRE(series.size() == 3);
  CHECK(series[0].value == rational(0));
  CHECK(series[1].value == rational(1, 2));
  CHECK(series[2].value == rational(1));
  CHECK(series[0].interval == interval_id{0});
  CHECK(series[2].interval == interval_id{2});
}

TEST_CASE("a voteless interval interrupts the series") {
  const std::string ea = "ea";
  vote_ledger ledger(vote_ledger::config{ea, {}}, {proposal{0, "q", proposal_kind::generic}});
  ledger.register_stakeholder(ea, stakeholder_id{1}, 1, token_for(1));
  ledger.advance_phase(ea);
  ledger.advance_phase(ea);
  ledger.update_interval(block_height_proof{0, 16, 16});

  try {
    (void)niwa_series(ledger, 0, interval_id{0}, interval_id{0});
    FAIL("expected empty_tally");
  } catch (const error& e) {
    CHECK(e.code() == errc::empty_tally);
    CHECK(std::string(e.what()).find("interval 0") != std::string::npos);
  }
}

namespace {

niwa_score score_of(const std::array<std::uint64_t, 5>& counts, std::uint64_t proposal,
                    std::uint64_t interval) {
  const tally t = testutil::make_tally(counts, proposal, interval);
  return niwa_score{niwa(t), proposal, interval_id{interval}};
}

}  // namespace

TEST_CASE("quadrilateral snapshots classify the interval") {
  // Exact best case: full agreement to stay, full disagreement with leaving.
  const auto best = make_quadrilateral_snapshot(score_of({8, 0, 0, 0, 0}, 0, 3),
                                                score_of({8, 0, 0, 0, 0}, 1, 3),
                                                score_of({0, 0, 0, 0, 8}, 2, 3));
  CHECK(best.classification == quad_classification::best_case);

  // Exit scored strictly closer to agreement than both stay options.
  const auto risky = make_quadrilateral_snapshot(score_of({0, 0, 4, 4, 0}, 0, 3),
                                                 score_of({0, 0, 2, 6, 0}, 1, 3),
                                                 score_of({4, 4, 0, 0, 0}, 2, 3));
  CHECK(risky.classification == quad_classification::exit_risk);

  // Same reading with the risk flag disabled stays neutral.
  const auto muted = make_quadrilateral_snapshot(score_of({0, 0, 4, 4, 0}, 0, 3),
                                                 score_of({0, 0, 2, 6, 0}, 1, 3),
                                                 score_of({4, 4, 0, 0, 0}, 2, 3), false);
  CHECK(muted.classification == quad_classification::neutral);

  // Nothing special: everyone neutral about everything.
  const auto plain = make_quadrilateral_snapshot(score_of({0, 0, 8, 0, 0}, 0, 3),
                                                 score_of({0, 0, 8, 0, 0}, 1, 3),
                                                 score_of({0, 0, 8, 0, 0}, 2, 3));
  CHECK(plain.classification == quad_classification::neutral);
  CHECK(plain.own_group.value == rational(1, 2));
  CHECK(plain.other_group.value == rational(1, 2));
  CHECK(plain.exit.value == rational(1, 2));

  // Direct distances: staying reads poorly on both edges, leaving reads well.
  const auto flight = make_quadrilateral_snapshot(
      niwa_score{rational(4, 5), 0, interval_id{3}},
      niwa_score{rational(7, 10), 1, interval_id{3}},
      niwa_score{rational(1, 10), 2, interval_id{3}});
  CHECK(flight.classification == quad_classification::exit_risk);

  try {
    (void)make_quadrilateral_snapshot(score_of({8, 0, 0, 0, 0}, 0, 3),
                                      score_of({8, 0, 0, 0, 0}, 1, 4),
                                      score_of({0, 0, 0, 0, 8}, 2, 3));
    FAIL("expected interval_mismatch");
  } catch (const error& e) {
    CHECK(e.code() == errc::interval_mismatch);
  }
}
