// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "dostab/charts.hpp"
#include "dostab/core.hpp"
#include "dostab/error.hpp"
#include "dostab/ledger.hpp"
#include "dostab/triggers.hpp"

namespace dostab {

// -- files --------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw error(errc::io_error, "read failed on " + path.string());
  return std::move(buffer).str();
}

/// Write-then-rename so readers never observe a half-written file.
inline void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error(errc::io_error, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw error(errc::io_error, "write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw error(errc::io_error, "cannot move " + tmp.string() + " into place");
  }
}

// -- ledger <-> json ------------------------------------------------------------

namespace detail {

inline std::string_view phase_name(election_phase phase) { return to_string(phase); }

inline election_phase parse_phase(const std::string& name) {
  if (name == "registration") return election_phase::registration;
  if (name == "voting") return election_phase::voting;
  if (name == "tallying") return election_phase::tallying;
  throw error(errc::parse_error, "unknown phase '" + name + "'");
}

inline proposal_kind parse_kind(const std::string& name) {
  if (name == "own_group") return proposal_kind::own_group;
  if (name == "other_group") return proposal_kind::other_group;
  if (name == "exit") return proposal_kind::exit;
  if (name == "generic") return proposal_kind::generic;
  throw error(errc::parse_error, "unknown proposal kind '" + name + "'");
}

}  // namespace detail

/// Canonical textual form of a ledger. Object keys are sorted and map-backed
/// collections are emitted in key order, so equal ledgers serialise to equal
/// bytes and parse(serialise(x)) round-trips exactly.
inline std::string serialise_ledger(const vote_ledger& ledger) {
  const vote_ledger::snapshot s = ledger.to_snapshot();
  nlohmann::json doc;
  doc["version"] = 1;
  doc["ea_credential"] = s.ea_credential;
  doc["oracle_credentials"] = s.oracle_credentials;
  doc["registration_window"] = s.registration_window;
  doc["current_interval"] = s.current_interval.index;
  doc["phase"] = std::string(detail::phase_name(s.phase));

  doc["proposals"] = nlohmann::json::array();
  for (const auto& p : s.proposals)
    doc["proposals"].push_back({{"id", p.id},
                                {"kind", std::string(to_string(p.kind))},
                                {"question", p.question}});

  doc["registry"] = nlohmann::json::array();
  for (const auto& entry : s.registry_entries)
    doc["registry"].push_back({{"id", entry.member.id.value},
                               {"weight", entry.member.weight},
                               {"credential", entry.credential}});

  if (s.booths) {
    nlohmann::json booths;
    booths["count"] = s.booths->booth_count;
    booths["assignment"] = nlohmann::json::array();
    for (const auto& [id, booth] : s.booths->assignment)
      booths["assignment"].push_back({{"stakeholder", id.value}, {"booth", booth}});
    doc["booths"] = std::move(booths);
  } else {
    doc["booths"] = nullptr;
  }

  doc["votes"] = nlohmann::json::array();
  for (const auto& [key, record] : s.votes)
    doc["votes"].push_back({{"proposal", key.proposal},
                            {"interval", key.interval.index},
                            {"stakeholder", key.voter.value},
                            {"choice", record.choice.ordinal()},
                            {"weight", record.weight}});

  return doc.dump(2) + "\n";
}

inline vote_ledger parse_ledger(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw error(errc::parse_error, e.what());
  }

  vote_ledger::snapshot s;
  try {
    if (doc.at("version").get<int>() != 1)
      throw error(errc::parse_error, "unsupported ledger version");
    s.ea_credential = doc.at("ea_credential").get<std::string>();
    s.oracle_credentials = doc.at("oracle_credentials").get<std::vector<std::string>>();
    s.registration_window = doc.at("registration_window").get<bool>();
    s.current_interval = interval_id{doc.at("current_interval").get<std::uint64_t>()};
    s.phase = detail::parse_phase(doc.at("phase").get<std::string>());

    for (const auto& p : doc.at("proposals"))
      s.proposals.push_back(proposal{p.at("id").get<std::uint64_t>(),
                                     p.at("question").get<std::string>(),
                                     detail::parse_kind(p.at("kind").get<std::string>())});

    for (const auto& entry : doc.at("registry"))
      s.registry_entries.push_back(registry_entry{
          stakeholder{stakeholder_id{entry.at("id").get<std::uint64_t>()},
                      entry.at("weight").get<std::uint64_t>(), std::nullopt},
          entry.at("credential").get<std::string>()});

    if (!doc.at("booths").is_null()) {
      booth_assignment booths;
      booths.booth_count = doc.at("booths").at("count").get<std::uint32_t>();
      for (const auto& row : doc.at("booths").at("assignment"))
        booths.assignment.emplace(stakeholder_id{row.at("stakeholder").get<std::uint64_t>()},
                                  row.at("booth").get<booth_index>());
      s.booths = std::move(booths);
    }

    for (const auto& v : doc.at("votes")) {
      const int ordinal = v.at("choice").get<int>();
      if (ordinal < 1 || ordinal > static_cast<int>(vote_choice::num_choices))
        throw error(errc::invariant_violation,
                    "vote choice " + std::to_string(ordinal) + " outside 1..5");
      s.votes.emplace_back(
          vote_key{v.at("proposal").get<std::uint64_t>(),
                   interval_id{v.at("interval").get<std::uint64_t>()},
                   stakeholder_id{v.at("stakeholder").get<std::uint64_t>()}},
          vote_record{vote_choice::from_ordinal(ordinal), v.at("weight").get<std::uint64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, e.what());
  }

  return vote_ledger::from_snapshot(std::move(s));
}

inline vote_ledger load_ledger(const std::filesystem::path& path) {
  return parse_ledger(read_text_file(path));
}

inline void store_ledger(const std::filesystem::path& path, const vote_ledger& ledger) {
  write_text_file_atomic(path, serialise_ledger(ledger));
}

// -- proofs ---------------------------------------------------------------------

/// Proof documents: {"type": "block_height", "prev_height": H0, "cur_height":
/// H1, "required_blocks": X} or {"type": "oracle_quorum", "certificates":
/// [...], "ea_total": N}.
inline elapsed_time_proof parse_proof(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw error(errc::parse_error, e.what());
  }
  try {
    const std::string type = doc.at("type").get<std::string>();
    if (type == "block_height") {
      block_height_proof proof;
      proof.prev_height = doc.at("prev_height").get<std::uint64_t>();
      proof.cur_height = doc.at("cur_height").get<std::uint64_t>();
      proof.required_blocks = doc.at("required_blocks").get<std::uint64_t>();
      if (proof.required_blocks == 0)
        throw error(errc::invariant_violation, "required_blocks must be at least 1");
      return proof;
    }
    if (type == "oracle_quorum") {
      oracle_quorum_proof proof;
      proof.certificates = doc.at("certificates").get<std::vector<std::string>>();
      proof.ea_total = doc.at("ea_total").get<std::uint32_t>();
      if (proof.ea_total == 0)
        throw error(errc::invariant_violation, "ea_total must be at least 1");
      return proof;
    }
    throw error(errc::parse_error, "unknown proof type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, e.what());
  }
}

// -- charts ---------------------------------------------------------------------

inline nlohmann::json chart_to_json(const control_chart& chart) {
  nlohmann::json doc;
  doc["kind"] = std::string(to_string(chart.kind));
  doc["center"] = chart.center;
  doc["points"] = chart.points;
  doc["lcl"] = chart.lcl;
  doc["ucl"] = chart.ucl;
  doc["violations"] = nlohmann::json::array();
  for (const auto& v : chart.violations)
    doc["violations"].push_back(
        {{"index", v.index}, {"side", v.side == violation_side::low ? "low" : "high"}});
  return doc;
}

}  // namespace dostab
