// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dostab {

/// Typed failure reasons surfaced by every module.
enum class errc {
  // registration and phase control
  not_ea,
  wrong_phase,
  duplicate_stakeholder,
  unknown_stakeholder,
  empty_registry,
  zero_booths,
  illegal_transition,
  // voting and tallying
  stale_interval,
  invalid_identity,
  unknown_proposal,
  interval_not_existing,
  unknown_booth,
  mixed_keys,
  invalid_proof,
  // interval triggers
  height_regression,
  // scoring
  empty_tally,
  interval_mismatch,
  // charts
  series_too_short,
  bad_lambda,
  // core type construction
  bad_choice,
  bad_weight,
  // serialisation and configuration
  parse_error,
  invariant_violation,
  bad_config,
  io_error,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::not_ea: return "not_ea";
    case errc::wrong_phase: return "wrong_phase";
    case errc::duplicate_stakeholder: return "duplicate_stakeholder";
    case errc::unknown_stakeholder: return "unknown_stakeholder";
    case errc::empty_registry: return "empty_registry";
    case errc::zero_booths: return "zero_booths";
    case errc::illegal_transition: return "illegal_transition";
    case errc::stale_interval: return "stale_interval";
    case errc::invalid_identity: return "invalid_identity";
    case errc::unknown_proposal: return "unknown_proposal";
    case errc::interval_not_existing: return "interval_not_existing";
    case errc::unknown_booth: return "unknown_booth";
    case errc::mixed_keys: return "mixed_keys";
    case errc::invalid_proof: return "invalid_proof";
    case errc::height_regression: return "height_regression";
    case errc::empty_tally: return "empty_tally";
    case errc::interval_mismatch: return "interval_mismatch";
    case errc::series_too_short: return "series_too_short";
    case errc::bad_lambda: return "bad_lambda";
    case errc::bad_choice: return "bad_choice";
    case errc::bad_weight: return "bad_weight";
    case errc::parse_error: return "parse_error";
    case errc::invariant_violation: return "invariant_violation";
    case errc::bad_config: return "bad_config";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

/// Exception thrown by all fallible operations; carries the typed reason.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace dostab
