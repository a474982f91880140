#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace arbor {

// Thrown when a requested computation exceeds a configured size bound
// (tree level caps, group level caps, subset-search width).
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

namespace config {

inline constexpr int kDefaultMaxLevel = 14;       // 16384 leaves
inline constexpr int kMaxGroupLevel = 12;         // closures and orders
inline constexpr int kMaxDerivedLevel = 10;       // derived subgroups
inline constexpr int kDefaultFactorDepth = 9;     // pullback trees, degree 512

// Level cap for truncations. ARBOR_MAX_LEVEL overrides the default; levels
// beyond the cap raise resource_error instead of silently truncating.
inline int max_level() {
  static const int cached = [] {
    if (const char* env = std::getenv("ARBOR_MAX_LEVEL")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 0 && v <= 24) return static_cast<int>(v);
    }
    return kDefaultMaxLevel;
  }();
  return cached;
}

inline void check_level(int n, const char* where) {
  if (n < 0) throw std::invalid_argument(std::string(where) + ": negative level");
  if (n > max_level()) {
    throw resource_error(std::string(where) + ": level " + std::to_string(n) +
                         " exceeds cap " + std::to_string(max_level()));
  }
}

}  // namespace config

// Decimal string of 2^e, for exact group orders too large for uint64.
inline std::string pow2_decimal(int e) {
  std::string digits = "1";  // little-endian decimal digits
  for (int i = 0; i < e; ++i) {
    int carry = 0;
    for (char& c : digits) {
      int d = (c - '0') * 2 + carry;
      c = static_cast<char>('0' + d % 10);
      carry = d / 10;
    }
    if (carry) digits.push_back(static_cast<char>('0' + carry));
  }
  return {digits.rbegin(), digits.rend()};
}

}  // namespace arbor
