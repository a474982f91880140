#pragma once

// Arithmetic in a prime field F_p, p an odd prime below 2^31.

#include <cstdint>
#include <stdexcept>

namespace arbor {

namespace detail {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return (__uint128_t(a) * b) % m;
}

inline uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t m) {
  uint64_t acc = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) acc = mulmod_u64(acc, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return acc;
}

}  // namespace detail

// Deterministic Miller-Rabin; the witness set {2, 3, 5, 7} is exact for
// every n < 3215031751, which covers the whole supported range.
inline bool is_prime_u32(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t q : {2u, 3u, 5u, 7u}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  uint32_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (uint32_t a : {2u, 3u, 5u, 7u}) {
    uint64_t x = detail::powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r && witness; ++i) {
      x = detail::mulmod_u64(x, x, n);
      if (x == n - 1) witness = false;
    }
    if (witness) return false;
  }
  return true;
}

class PrimeField {
 public:
  explicit PrimeField(uint32_t p) : p_(p) {
    if (p < 3 || p >= (uint32_t{1} << 31) || !is_prime_u32(p))
      throw std::invalid_argument("PrimeField: p must be an odd prime below 2^31");
  }

  uint32_t p() const { return p_; }

  uint32_t reduce_signed(long long v) const {
    long long m = v % static_cast<long long>(p_);
    if (m < 0) m += p_;
    return static_cast<uint32_t>(m);
  }

  uint32_t add(uint32_t a, uint32_t b) const {
    const uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
  uint32_t neg(uint32_t a) const { return a ? p_ - a : 0; }
  uint32_t mul(uint32_t a, uint32_t b) const {
    return static_cast<uint32_t>((uint64_t(a) * b) % p_);
  }
  uint32_t pow(uint32_t a, uint64_t e) const {
    return static_cast<uint32_t>(detail::powmod_u64(a, e, p_));
  }
  uint32_t inv(uint32_t a) const {
    if (a == 0) throw std::domain_error("PrimeField: division by zero");
    return pow(a, p_ - 2);
  }

 private:
  uint32_t p_;
};

}  // namespace arbor
