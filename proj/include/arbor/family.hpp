#pragma once

// The recursive generator family attached to a post-critical orbit (r, s):
//
//   a_1 = (a_r, id) s
//   a_i = (id, a_{i-1})        for 2 <= i <= s-1
//   a_s = (id, a_{s-1}) s
//   a_i = (a_{i-1}, id)        for s+1 <= i <= r
//
// plus the sign tables of the generators, the product identity a_1...a_r = id,
// and odometer existence both by the closed-form criterion and by exhaustive
// search over exponent-parity classes.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/perm.hpp"
#include "arbor/words.hpp"

namespace arbor {

struct PCOrbit {
  int r = 0;  // orbit length, >= 3
  int s = 0;  // index of the second branch point, 2 <= s <= r

  void validate() const {
    if (r < 3) throw std::invalid_argument("PCOrbit: r must be >= 3");
    if (s < 2 || s > r) throw std::invalid_argument("PCOrbit: s must satisfy 2 <= s <= r");
  }
};

struct GeneratorFamily {
  PCOrbit orbit;
  TablePtr table;  // state i is a_i for 1 <= i <= r; state r+1 is sigma

  TreeWord generator(int i) const {
    if (i < 1 || i > orbit.r) throw std::out_of_range("GeneratorFamily: no such generator");
    return TreeWord{table, {Letter{uint32_t(i), 1}}};
  }

  // Product of a_i over an index sequence, in the given order.
  TreeWord word(const std::vector<int>& indices) const {
    TreeWord w{table, {}};
    for (int i : indices) {
      if (i < 1 || i > orbit.r) throw std::out_of_range("GeneratorFamily: no such generator");
      w.letters.push_back({uint32_t(i), 1});
    }
    return w;
  }

  TreeWord relation_word() const {
    std::vector<int> all(orbit.r);
    std::iota(all.begin(), all.end(), 1);
    return word(all);
  }
};

inline GeneratorFamily build_family(const PCOrbit& orbit) {
  orbit.validate();
  auto t = std::make_shared<RecursionTable>();
  const int r = orbit.r, s = orbit.s;
  for (int i = 1; i <= r; ++i) t->add_state("a" + std::to_string(i));
  const uint32_t sigma = t->add_state("s");
  t->wire(1, uint32_t(r), 0, true);
  for (int i = 2; i <= s - 1; ++i) t->wire(uint32_t(i), 0, uint32_t(i - 1), false);
  t->wire(uint32_t(s), 0, uint32_t(s - 1), true);
  for (int i = s + 1; i <= r; ++i) t->wire(uint32_t(i), uint32_t(i - 1), 0, false);
  t->wire(sigma, 0, 0, true);
  t->validate();
  return GeneratorFamily{orbit, std::move(t)};
}

// a_1 a_2 ... a_r restricted to level n is the identity.
inline bool verify_relation(const GeneratorFamily& fam, int n) {
  return restrict_word(fam.relation_word(), n).is_identity();
}

// Closed form for sgn_n(a_i): -1 iff n = i or n = i+1-s (mod r).
inline bool sign_negative_closed_form(const PCOrbit& orbit, int i, int n) {
  const int r = orbit.r;
  const auto mod = [r](int x) { return ((x % r) + r) % r; };
  return mod(n - i) == 0 || mod(n - (i + 1 - orbit.s)) == 0;
}

struct SignTable {
  PCOrbit orbit;
  std::vector<SignVector> rows;  // rows[i-1] = sgn^{3r}(a_i)

  int entry(int i, int n) const { return rows.at(i - 1).entries.at(n - 1); }
};

// Sign vectors of all generators through level 3r, checked against the
// closed form on one period and for r-periodicity beyond it.
inline SignTable sign_table(const GeneratorFamily& fam) {
  const int r = fam.orbit.r;
  SignTable table{fam.orbit, {}};
  table.rows.reserve(r);
  for (int i = 1; i <= r; ++i) {
    SignVector sv = sign_vector(fam.generator(i), 3 * r);
    for (int n = 1; n <= r; ++n) {
      const int expected = sign_negative_closed_form(fam.orbit, i, n) ? -1 : 1;
      if (sv.entries[n - 1] != expected)
        throw std::logic_error("sign_table: computed sign differs from closed form");
    }
    for (int n = r + 1; n <= 3 * r; ++n)
      if (sv.entries[n - 1] != sv.entries[n - 1 - r])
        throw std::logic_error("sign_table: sign sequence is not r-periodic");
    table.rows.push_back(std::move(sv));
  }
  return table;
}

struct OdometerReport {
  PCOrbit orbit;
  bool exists = false;
  std::optional<std::vector<int>> witness;  // generator indices, product order
  std::string method;                       // "criterion" or "search"
};

namespace detail {

// Orbits of tau: i -> i+1-s (mod r) on {1..r}, each listed from its smallest
// element; taking every other element starting with the first yields the
// selection whose sign rows multiply to (-1, ..., -1).
inline std::vector<int> alternating_orbit_selection(const PCOrbit& orbit) {
  const int r = orbit.r;
  const auto tau = [&](int i) {
    int j = (i + 1 - orbit.s) % r;
    if (j <= 0) j += r;
    return j;
  };
  std::vector<char> visited(r + 1, 0);
  std::vector<int> selection;
  for (int start = 1; start <= r; ++start) {
    if (visited[start]) continue;
    int pos = 0;
    for (int j = start; !visited[j]; j = tau(j), ++pos) {
      visited[j] = 1;
      if (pos % 2 == 0) selection.push_back(j);
    }
  }
  return selection;
}

}  // namespace detail

// Existence by the parity criterion: odometers exist iff r and s are both
// even, or s is odd and r/gcd(r, s-1) is even. The witness is the
// constructive one: a_1 a_3 ... a_{r-1} in the even/even case, the
// alternating orbit selection of i -> i+1-s otherwise.
inline OdometerReport odometer_by_criterion(const PCOrbit& orbit) {
  orbit.validate();
  OdometerReport report{orbit, false, std::nullopt, "criterion"};
  const int r = orbit.r, s = orbit.s;
  const bool even_case = (r % 2 == 0) && (s % 2 == 0);
  const bool odd_case = (s % 2 == 1) && ((r / std::gcd(r, s - 1)) % 2 == 0);
  if (even_case) {
    report.exists = true;
    std::vector<int> w;
    for (int i = 1; i <= r - 1; i += 2) w.push_back(i);
    report.witness = std::move(w);
  } else if (odd_case) {
    report.exists = true;
    report.witness = detail::alternating_orbit_selection(orbit);
  }
  return report;
}

// Exhaustive search over the 2^r exponent-parity classes. Per-level signs of
// an element depend only on the parities of the generator exponents, so a
// subset S with   prod_{i in S} sgn^r(a_i) = (-1, ..., -1)   exists iff the
// group contains an odometer. Returns the lexicographically smallest witness.
inline OdometerReport odometer_by_search(const GeneratorFamily& fam) {
  const int r = fam.orbit.r;
  if (r > 20) throw resource_error("odometer_by_search: r > 20");
  const SignTable table = sign_table(fam);

  // row i as a bitmask of the levels in 1..r where the sign is -1
  std::vector<uint32_t> neg(r);
  for (int i = 1; i <= r; ++i)
    for (int n = 1; n <= r; ++n)
      if (table.entry(i, n) == -1) neg[i - 1] |= uint32_t{1} << (n - 1);

  const uint32_t all_levels = (uint32_t{1} << r) - 1;
  OdometerReport report{fam.orbit, false, std::nullopt, "search"};
  std::optional<std::vector<int>> best;
  for (uint32_t mask = 1; mask < (uint32_t{1} << r); ++mask) {
    uint32_t acc = 0;
    for (int i = 0; i < r; ++i)
      if (mask & (uint32_t{1} << i)) acc ^= neg[i];
    if (acc != all_levels) continue;
    std::vector<int> subset;
    for (int i = 0; i < r; ++i)
      if (mask & (uint32_t{1} << i)) subset.push_back(i + 1);
    if (!best || subset < *best) best = std::move(subset);
  }
  if (best) {
    report.exists = true;
    report.witness = std::move(*best);
  }
  return report;
}

// The product over the subset acts as a single 2^n-cycle on level n.
inline bool certify_odometer(const GeneratorFamily& fam, const std::vector<int>& subset, int n) {
  config::check_level(n, "certify_odometer");
  return is_full_cycle(restrict_word(fam.word(subset), n));
}

}  // namespace arbor
