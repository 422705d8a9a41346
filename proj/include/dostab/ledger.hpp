// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dostab/core.hpp"
#include "dostab/error.hpp"
#include "dostab/rng.hpp"
#include "dostab/triggers.hpp"

namespace dostab {

/// One registry row: the stakeholder and the credential their votes are
/// checked against.
struct registry_entry {
  stakeholder member;
  std::string credential;
};

/// The stakeholder list plus the EA credential that gates changes to it.
struct registry {
  std::map<stakeholder_id, registry_entry> entries;
  std::string ea_credential;

  bool contains(stakeholder_id id) const { return entries.count(id) != 0; }
  std::size_t size() const noexcept { return entries.size(); }

  std::uint64_t total_weight() const noexcept {
    std::uint64_t sum = 0;
    for (const auto& [id, entry] : entries) sum += entry.member.weight;
    return sum;
  }
};

/// Balanced partition of the registry into `booth_count` booths. Every
/// registered stakeholder appears exactly once.
struct booth_assignment {
  std::uint32_t booth_count{0};
  std::map<stakeholder_id, booth_index> assignment;

  std::vector<std::size_t> booth_sizes() const {
    std::vector<std::size_t> sizes(booth_count, 0);
    for (const auto& [id, booth] : assignment) ++sizes[booth];
    return sizes;
  }
};

/// Random balanced partition: shuffle the ids and deal them round-robin, so
/// any two booth sizes differ by at most one. Deterministic under a fixed
/// seed.
inline booth_assignment make_booth_assignment(const registry& reg, std::uint32_t booth_count,
                                              std::uint64_t seed) {
  if (booth_count == 0) throw error(errc::zero_booths, "booth count must be at least 1");
  if (reg.entries.empty())
    throw error(errc::empty_registry, "cannot assign booths over an empty registry");

  std::vector<stakeholder_id> ids;
  ids.reserve(reg.size());
  for (const auto& [id, entry] : reg.entries) ids.push_back(id);

  rng gen(seed);
  gen.shuffle(ids);

  booth_assignment out;
  out.booth_count = booth_count;
  for (std::size_t k = 0; k < ids.size(); ++k)
    out.assignment.emplace(ids[k], static_cast<booth_index>(k % booth_count));
  return out;
}

struct vote_key {
  std::uint64_t proposal{0};
  interval_id interval;
  stakeholder_id voter;
  auto operator<=>(const vote_key&) const = default;
};

struct vote_record {
  vote_choice choice;
  std::uint64_t weight;  // the voter's shares at the time the vote was recorded
  bool operator==(const vote_record&) const = default;
};

/// The election state machine: registration, booth partitioning, vote
/// recording, per-booth tallies and interval updates. Mutating operations are
/// serialised through a single owner; tallies are pure reads.
///
/// Re-votes within the open interval overwrite the prior choice, keeping the
/// 1-out-of-5 invariant. Once an interval closes its votes are immutable.
class vote_ledger {
 public:
  struct config {
    std::string ea_credential;
    // EA oracle credentials accepted for quorum proofs; defaults to just the
    // EA credential when left empty.
    std::vector<std::string> oracle_credentials;
  };

  vote_ledger(config cfg, std::vector<proposal> proposals) {
    if (cfg.ea_credential.empty())
      throw error(errc::bad_config, "EA credential must not be empty");
    registry_.ea_credential = cfg.ea_credential;
    oracle_credentials_ = cfg.oracle_credentials.empty()
                              ? std::vector<std::string>{cfg.ea_credential}
                              : std::move(cfg.oracle_credentials);
    for (auto& p : proposals) {
      if (proposals_.count(p.id))
        throw error(errc::bad_config, "duplicate proposal id " + std::to_string(p.id));
      proposals_.emplace(p.id, std::move(p));
    }
  }

  // -- registration (EA only, registration phase only) ----------------------

  void register_stakeholder(const std::string& ea_token, stakeholder_id id, std::uint64_t weight,
                            std::string credential) {
    require_ea(ea_token);
    if (phase_ != election_phase::registration)
      throw error(errc::wrong_phase, "registration is only open during the registration phase");
    if (weight == 0) throw error(errc::bad_weight, "voting weight must be at least 1");
    if (registry_.contains(id))
      throw error(errc::duplicate_stakeholder,
                  "stakeholder " + std::to_string(id.value) + " is already registered");

    registry_entry entry{stakeholder{id, weight, std::nullopt}, std::move(credential)};
    // A live booth assignment is extended deterministically: the newcomer
    // joins the least-filled booth (lowest index on ties), preserving the
    // balanced-partition invariant without a reshuffle.
    if (booths_) {
      const auto sizes = booths_->booth_sizes();
      booth_index target = 0;
      for (booth_index b = 1; b < booths_->booth_count; ++b)
        if (sizes[b] < sizes[target]) target = b;
      booths_->assignment.emplace(id, target);
      entry.member.booth = target;
    }
    registry_.entries.emplace(id, std::move(entry));
  }

  void set_weight(const std::string& ea_token, stakeholder_id id, std::uint64_t weight) {
    require_ea(ea_token);
    if (phase_ != election_phase::registration)
      throw error(errc::wrong_phase, "weights may only change during a registration window");
    if (weight == 0) throw error(errc::bad_weight, "voting weight must be at least 1");
    auto it = registry_.entries.find(id);
    if (it == registry_.entries.end())
      throw error(errc::unknown_stakeholder,
                  "stakeholder " + std::to_string(id.value) + " is not registered");
    it->second.member.weight = weight;
  }

  // -- booth partition -------------------------------------------------------

  booth_assignment assign_booths(std::uint32_t booth_count, std::uint64_t seed) {
    booth_assignment assignment = make_booth_assignment(registry_, booth_count, seed);
    for (auto& [id, entry] : registry_.entries) entry.member.booth = assignment.assignment.at(id);
    booths_ = assignment;
    return assignment;
  }

  // -- phase control ---------------------------------------------------------

  void advance_phase(const std::string& ea_token) {
    require_ea(ea_token);
    switch (phase_) {
      case election_phase::registration:
        phase_ = election_phase::voting;
        return;
      case election_phase::voting:
        phase_ = election_phase::tallying;
        return;
      case election_phase::tallying:
        throw error(errc::illegal_transition,
                    "the tally phase ends through update_interval, not advance_phase");
    }
  }

  /// EA marks the next interval as opening with a registration window instead
  /// of going straight back to voting.
  void request_registration_window(const std::string& ea_token) {
    require_ea(ea_token);
    registration_window_ = true;
  }

  // -- voting ----------------------------------------------------------------

  void vote_in_interval(std::uint64_t proposal_id, interval_id interval, stakeholder_id voter,
                        vote_choice choice, const identity_proof& proof) {
    if (phase_ != election_phase::voting)
      throw error(errc::wrong_phase, "votes are only accepted during the voting phase");
    if (interval != current_interval_)
      throw error(errc::stale_interval,
                  "interval " + std::to_string(interval.index) + " is not the open interval " +
                      std::to_string(current_interval_.index));
    if (!proposals_.count(proposal_id))
      throw error(errc::unknown_proposal, "no proposal with id " + std::to_string(proposal_id));
    auto it = registry_.entries.find(voter);
    if (it == registry_.entries.end() || proof.stakeholder != voter ||
        proof.token != it->second.credential)
      throw error(errc::invalid_identity,
                  "identity proof rejected for stakeholder " + std::to_string(voter.value));

    votes_.insert_or_assign(vote_key{proposal_id, interval, voter},
                            vote_record{choice, it->second.member.weight});
  }

  // -- tallying --------------------------------------------------------------

  tally tally_in_interval(std::uint64_t proposal_id, interval_id interval) const {
    if (!proposals_.count(proposal_id))
      throw error(errc::unknown_proposal, "no proposal with id " + std::to_string(proposal_id));
    if (interval > current_interval_)
      throw error(errc::interval_not_existing,
                  "interval " + std::to_string(interval.index) + " does not exist yet");
    if (interval == current_interval_ && phase_ != election_phase::tallying)
      throw error(errc::wrong_phase, "the open interval is tallied during the tally phase");

    tally t;
    t.proposal = proposal_id;
    t.interval = interval;
    for (auto it = votes_.lower_bound(vote_key{proposal_id, interval, stakeholder_id{0}});
         it != votes_.end() && it->first.proposal == proposal_id && it->first.interval == interval;
         ++it)
      t.count_for(it->second.choice) += it->second.weight;
    return t;
  }

  /// Local tally over one booth's members only.
  tally booth_tally(booth_index booth, std::uint64_t proposal_id, interval_id interval) const {
    if (!booths_ || booth >= booths_->booth_count)
      throw error(errc::unknown_booth, "no booth with index " + std::to_string(booth));
    if (!proposals_.count(proposal_id))
      throw error(errc::unknown_proposal, "no proposal with id " + std::to_string(proposal_id));
    if (interval > current_interval_)
      throw error(errc::interval_not_existing,
                  "interval " + std::to_string(interval.index) + " does not exist yet");
    if (interval == current_interval_ && phase_ != election_phase::tallying)
      throw error(errc::wrong_phase, "the open interval is tallied during the tally phase");

    tally t;
    t.proposal = proposal_id;
    t.interval = interval;
    for (auto it = votes_.lower_bound(vote_key{proposal_id, interval, stakeholder_id{0}});
         it != votes_.end() && it->first.proposal == proposal_id && it->first.interval == interval;
         ++it) {
      auto assigned = booths_->assignment.find(it->first.voter);
      if (assigned != booths_->assignment.end() && assigned->second == booth)
        t.count_for(it->second.choice) += it->second.weight;
    }
    return t;
  }

  // -- interval trigger ------------------------------------------------------

  /// Closes the current interval once a valid elapsed-time proof is supplied.
  /// Deliberately identity-free: any submitter with a valid proof advances the
  /// interval.
  void update_interval(const elapsed_time_proof& proof) {
    if (phase_ != election_phase::tallying)
      throw error(errc::wrong_phase, "intervals close from the tally phase");
    const std::set<std::string> known(oracle_credentials_.begin(), oracle_credentials_.end());
    if (!verify_interval_proof(proof, known))
      throw error(errc::invalid_proof, "elapsed-time proof did not verify");
    current_interval_ = current_interval_.next();
    phase_ = registration_window_ ? election_phase::registration : election_phase::voting;
    registration_window_ = false;
  }

  // -- accessors -------------------------------------------------------------

  interval_id current_interval() const noexcept { return current_interval_; }
  election_phase phase() const noexcept { return phase_; }
  bool registration_window_requested() const noexcept { return registration_window_; }
  const registry& stakeholders() const noexcept { return registry_; }
  const std::optional<booth_assignment>& booths() const noexcept { return booths_; }
  const std::map<std::uint64_t, proposal>& proposals() const noexcept { return proposals_; }
  const std::map<vote_key, vote_record>& votes() const noexcept { return votes_; }
  const std::vector<std::string>& oracle_credentials() const noexcept {
    return oracle_credentials_;
  }

  // -- snapshots (serialisation support) --------------------------------------

  struct snapshot {
    std::string ea_credential;
    std::vector<std::string> oracle_credentials;
    std::vector<proposal> proposals;
    std::vector<registry_entry> registry_entries;
    std::optional<booth_assignment> booths;
    std::vector<std::pair<vote_key, vote_record>> votes;
    interval_id current_interval;
    election_phase phase{election_phase::registration};
    bool registration_window{false};
  };

  snapshot to_snapshot() const {
    snapshot s;
    s.ea_credential = registry_.ea_credential;
    s.oracle_credentials = oracle_credentials_;
    for (const auto& [id, p] : proposals_) s.proposals.push_back(p);
    for (const auto& [id, entry] : registry_.entries) s.registry_entries.push_back(entry);
    s.booths = booths_;
    for (const auto& [key, record] : votes_) s.votes.emplace_back(key, record);
    s.current_interval = current_interval_;
    s.phase = phase_;
    s.registration_window = registration_window_;
    return s;
  }

  /// Rebuilds a ledger from persisted state, re-checking every invariant the
  /// state machine normally enforces on the way in. Throws
  /// invariant_violation naming the broken invariant.
  static vote_ledger from_snapshot(snapshot s) {
    auto violated = [](const std::string& what) -> error {
      return {errc::invariant_violation, what};
    };
    if (s.ea_credential.empty()) throw violated("EA credential must not be empty");

    vote_ledger ledger;
    ledger.registry_.ea_credential = std::move(s.ea_credential);
    ledger.oracle_credentials_ = s.oracle_credentials.empty()
                                     ? std::vector<std::string>{ledger.registry_.ea_credential}
                                     : std::move(s.oracle_credentials);

    for (auto& p : s.proposals) {
      if (ledger.proposals_.count(p.id))
        throw violated("duplicate proposal id " + std::to_string(p.id));
      ledger.proposals_.emplace(p.id, std::move(p));
    }

    for (auto& entry : s.registry_entries) {
      if (entry.member.weight == 0)
        throw violated("stakeholder " + std::to_string(entry.member.id.value) +
                       " has weight 0; weights must be at least 1");
      const auto id = entry.member.id;
      entry.member.booth.reset();  // rebuilt from the booth section below
      if (!ledger.registry_.entries.emplace(id, std::move(entry)).second)
        throw violated("duplicate stakeholder id " + std::to_string(id.value));
    }

    if (s.booths) {
      if (s.booths->booth_count == 0) throw violated("booth count must be at least 1");
      if (s.booths->assignment.size() != ledger.registry_.size())
        throw violated("booth assignment must cover the registry exactly");
      for (const auto& [id, booth] : s.booths->assignment) {
        auto it = ledger.registry_.entries.find(id);
        if (it == ledger.registry_.entries.end())
          throw violated("booth assignment names unregistered stakeholder " +
                         std::to_string(id.value));
        if (booth >= s.booths->booth_count)
          throw violated("booth index " + std::to_string(booth) + " out of range");
        it->second.member.booth = booth;
      }
      ledger.booths_ = std::move(s.booths);
    }

    for (auto& [key, record] : s.votes) {
      if (!ledger.proposals_.count(key.proposal))
        throw violated("vote references unknown proposal " + std::to_string(key.proposal));
      if (!ledger.registry_.contains(key.voter))
        throw violated("vote references unregistered stakeholder " +
                       std::to_string(key.voter.value));
      if (key.interval > s.current_interval)
        throw violated("vote recorded for interval " + std::to_string(key.interval.index) +
                       " beyond the current interval");
      if (record.weight == 0) throw violated("vote with weight 0");
      if (!ledger.votes_.emplace(key, record).second)
        throw violated("more than one vote for proposal " + std::to_string(key.proposal) +
                       ", interval " + std::to_string(key.interval.index) + ", stakeholder " +
                       std::to_string(key.voter.value));
    }

    ledger.current_interval_ = s.current_interval;
    ledger.phase_ = s.phase;
    ledger.registration_window_ = s.registration_window;
    return ledger;
  }

 private:
  vote_ledger() = default;

  void require_ea(const std::string& token) const {
    if (token != registry_.ea_credential)
      throw error(errc::not_ea, "credential does not authorise EA operations");
  }

  registry registry_;
  std::map<std::uint64_t, proposal> proposals_;
  std::optional<booth_assignment> booths_;
  std::map<vote_key, vote_record> votes_;
  interval_id current_interval_;
  election_phase phase_{election_phase::registration};
  bool registration_window_{false};
  std::vector<std::string> oracle_credentials_;
};

/// Componentwise sum of per-booth tallies for the same (proposal, interval).
inline tally aggregate(std::span<const tally> local_tallies) {
  if (local_tallies.empty())
    throw error(errc::mixed_keys, "nothing to aggregate");
  tally out;
  out.proposal = local_tallies.front().proposal;
  out.interval = local_tallies.front().interval;
  for (const auto& t : local_tallies) {
    if (t.proposal != out.proposal || t.interval != out.interval)
      throw error(errc::mixed_keys, "tallies span different proposals or intervals");
    for (std::size_t k = 0; k < t.counts.size(); ++k) out.counts[k] += t.counts[k];
  }
  return out;
}

}  // namespace dostab
