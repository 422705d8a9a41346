// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dostab/error.hpp"

namespace dostab {

/// Elapsed-time evidence read off the chain: at least `required_blocks` new
/// blocks since the previous trigger.
struct block_height_proof {
  std::uint64_t prev_height{0};
  std::uint64_t cur_height{0};
  std::uint64_t required_blocks{1};
};

/// Elapsed-time evidence from EA oracles: certificates from at least
/// two-thirds of the authorities.
struct oracle_quorum_proof {
  std::vector<std::string> certificates;
  std::uint32_t ea_total{1};
};

using elapsed_time_proof = std::variant<block_height_proof, oracle_quorum_proof>;

/// Smallest certificate count meeting the quorum: ceil(2/3 * ea_total).
constexpr std::uint32_t quorum_threshold(std::uint32_t ea_total) noexcept {
  return (2u * ea_total + 2u) / 3u;
}

inline bool verify_block_height(std::uint64_t prev_height, std::uint64_t cur_height,
                                std::uint64_t required_blocks) {
  if (cur_height < prev_height)
    throw error(errc::height_regression,
                "block height went backwards: " + std::to_string(prev_height) + " -> " +
                    std::to_string(cur_height));
  return cur_height - prev_height >= required_blocks;
}

/// Counts distinct certificates matching known EA credentials. Unknown
/// certificates are ignored and duplicates from one EA count once.
inline bool verify_oracle_quorum(std::span<const std::string> certificates,
                                 std::uint32_t ea_total,
                                 const std::set<std::string>& known_ea_credentials) {
  std::set<std::string> accepted;
  for (const auto& cert : certificates)
    if (known_ea_credentials.contains(cert)) accepted.insert(cert);
  return accepted.size() >= quorum_threshold(ea_total);
}

/// Pure dispatch to the variant verifier; anyone may submit a proof, so no
/// submitter identity is involved.
inline bool verify_interval_proof(const elapsed_time_proof& proof,
                                  const std::set<std::string>& known_ea_credentials) {
  if (const auto* bh = std::get_if<block_height_proof>(&proof))
    return verify_block_height(bh->prev_height, bh->cur_height, bh->required_blocks);
  const auto& oq = std::get<oracle_quorum_proof>(proof);
  return verify_oracle_quorum(oq.certificates, oq.ea_total, known_ea_credentials);
}

}  // namespace dostab
