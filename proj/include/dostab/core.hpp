// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dostab/error.hpp"

namespace dostab {

/// Opaque unique identifier of a registered stakeholder (stands in for a
/// wallet address).
struct stakeholder_id {
  std::uint64_t value{0};
  auto operator<=>(const stakeholder_id&) const = default;
};

using booth_index = std::uint32_t;

/// A registered voter: unique id plus positive voting shares. The booth index
/// is filled in once a booth assignment is installed.
struct stakeholder {
  stakeholder_id id;
  std::uint64_t weight{1};
  std::optional<booth_index> booth;
};

enum class proposal_kind { own_group, other_group, exit, generic };

constexpr std::string_view to_string(proposal_kind kind) noexcept {
  switch (kind) {
    case proposal_kind::own_group: return "own_group";
    case proposal_kind::other_group: return "other_group";
    case proposal_kind::exit: return "exit";
    case proposal_kind::generic: return "generic";
  }
  return "generic";
}

/// A question put to the stakeholders. The kind records which disagreement
/// distance the question measures: towards the voter's own group, towards
/// another group, or towards leaving the organisation.
struct proposal {
  std::uint64_t id{0};
  std::string question;
  proposal_kind kind{proposal_kind::generic};
};

/// One of the five ordinal agreement choices. Ordinal 1 is "highly agreeable"
/// and ordinal 5 "highly disagreeable"; the agreement level is ordinal - 1 on
/// a linear 0..4 scale.
class vote_choice {
 public:
  static constexpr int num_choices = 5;

  static vote_choice from_ordinal(int ordinal) {
    if (ordinal < 1 || ordinal > num_choices)
      throw error(errc::bad_choice,
                  "vote choice ordinal must be in 1..5, got " + std::to_string(ordinal));
    return vote_choice(ordinal);
  }

  static std::array<vote_choice, num_choices> all() noexcept {
    return {vote_choice(1), vote_choice(2), vote_choice(3), vote_choice(4), vote_choice(5)};
  }

  int ordinal() const noexcept { return ordinal_; }
  int agreement_level() const noexcept { return ordinal_ - 1; }

  auto operator<=>(const vote_choice&) const = default;

 private:
  explicit constexpr vote_choice(int ordinal) noexcept : ordinal_(ordinal) {}
  int ordinal_;
};

/// Index of one voting interval (epoch). The ledger advances it by exactly
/// one per interval update, never backwards.
struct interval_id {
  std::uint64_t index{0};
  interval_id next() const noexcept { return {index + 1}; }
  auto operator<=>(const interval_id&) const = default;
};

/// Weighted vote counts per choice for one (proposal, interval).
struct tally {
  std::uint64_t proposal{0};
  interval_id interval;
  std::array<std::uint64_t, vote_choice::num_choices> counts{};  // counts[k] is choice ordinal k+1

  std::uint64_t& count_for(vote_choice c) noexcept {
    return counts[static_cast<std::size_t>(c.ordinal() - 1)];
  }
  std::uint64_t count_for(vote_choice c) const noexcept {
    return counts[static_cast<std::size_t>(c.ordinal() - 1)];
  }

  std::uint64_t total() const noexcept {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }

  friend bool operator==(const tally&, const tally&) = default;
};

enum class election_phase { registration, voting, tallying };

constexpr std::string_view to_string(election_phase phase) noexcept {
  switch (phase) {
    case election_phase::registration: return "registration";
    case election_phase::voting: return "voting";
    case election_phase::tallying: return "tallying";
  }
  return "registration";
}

/// Credential presented alongside a vote; valid when it matches the one
/// recorded for the stakeholder at registration.
struct identity_proof {
  stakeholder_id stakeholder;
  std::string token;
};

}  // namespace dostab
