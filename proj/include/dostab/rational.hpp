// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

#include "dostab/error.hpp"

namespace dostab {

/// Exact rational arithmetic for the score formulas. Score numerators are
/// bounded by a few times the total vote weight, so int64 never overflows in
/// practice. Always kept normalised: positive denominator, gcd 1.
class rational {
 public:
  rational() = default;
  rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) { normalise(); }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend rational operator+(const rational& a, const rational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend rational operator-(const rational& a, const rational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend rational operator*(const rational& a, const rational& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend rational operator/(const rational& a, const rational& b) {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  rational operator-() const { return {-num_, den_}; }

  // normalised form makes equality structural
  friend bool operator==(const rational& a, const rational& b) = default;
  friend std::strong_ordering operator<=>(const rational& a, const rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void normalise() {
    if (den_ == 0) throw error(errc::invariant_violation, "rational denominator is zero");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_{0};
  std::int64_t den_{1};
};

}  // namespace dostab
