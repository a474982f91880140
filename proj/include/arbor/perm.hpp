#pragma once

// Permutations of the 2^n leaves of a truncated rooted binary tree.
//
// A LevelPerm holds the action of a tree automorphism on level n. Leaves are
// indexed by reading the vertex word most-significant-bit first, so the
// projection from level m down to level n <= m is `leaf >> (m - n)`.
// Products follow the right-action convention used throughout: apply the
// left factor first.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arbor/common.hpp"

namespace arbor {

struct LevelPerm {
  int level = 0;
  std::vector<uint32_t> images;  // images[leaf] = image of leaf

  uint32_t degree() const { return uint32_t{1} << level; }

  static LevelPerm identity(int n) {
    LevelPerm p;
    p.level = n;
    p.images.resize(uint32_t{1} << n);
    std::iota(p.images.begin(), p.images.end(), 0u);
    return p;
  }

  bool is_identity() const {
    for (uint32_t i = 0; i < images.size(); ++i)
      if (images[i] != i) return false;
    return true;
  }

  bool operator==(const LevelPerm& o) const {
    return level == o.level && images == o.images;
  }
};

// Apply a, then b.
inline LevelPerm compose(const LevelPerm& a, const LevelPerm& b) {
  if (a.level != b.level) throw std::invalid_argument("compose: level mismatch");
  LevelPerm c;
  c.level = a.level;
  c.images.resize(a.images.size());
  for (uint32_t x = 0; x < a.images.size(); ++x) c.images[x] = b.images[a.images[x]];
  return c;
}

inline LevelPerm inverse(const LevelPerm& p) {
  LevelPerm q;
  q.level = p.level;
  q.images.resize(p.images.size());
  for (uint32_t x = 0; x < p.images.size(); ++x) q.images[p.images[x]] = x;
  return q;
}

inline LevelPerm perm_pow(const LevelPerm& p, uint64_t k) {
  LevelPerm acc = LevelPerm::identity(p.level);
  LevelPerm base = p;
  while (k) {
    if (k & 1) acc = compose(acc, base);
    base = compose(base, base);
    k >>= 1;
  }
  return acc;
}

// Truncation pi_{m,n}: the induced permutation on level n <= m.
inline LevelPerm truncate(const LevelPerm& p, int n) {
  if (n < 0 || n > p.level) throw std::invalid_argument("truncate: bad level");
  const int shift = p.level - n;
  LevelPerm q;
  q.level = n;
  q.images.resize(uint32_t{1} << n);
  for (uint32_t v = 0; v < q.images.size(); ++v)
    q.images[v] = p.images[v << shift] >> shift;
  return q;
}

// Whether a raw permutation of the leaves actually comes from a tree
// automorphism, i.e. respects the prefix partition on every level.
inline bool is_tree_automorphism(const LevelPerm& p) {
  const uint32_t deg = p.degree();
  std::vector<char> seen(deg, 0);
  for (uint32_t x = 0; x < deg; ++x) {
    if (p.images[x] >= deg || seen[p.images[x]]) return false;
    seen[p.images[x]] = 1;
  }
  for (int d = p.level - 1; d >= 1; --d) {
    const int shift = p.level - d;
    for (uint32_t x = 0; x < deg; ++x) {
      // siblings at depth d must map to siblings
      if ((p.images[x ^ (uint32_t{1} << (shift - 1))] >> shift) != (p.images[x] >> shift))
        return false;
    }
  }
  return true;
}

struct CycleDecomposition {
  int level = 0;
  std::vector<std::pair<uint32_t, uint64_t>> cycles;  // (smallest leaf, length), sorted by leaf
};

inline CycleDecomposition cycles(const LevelPerm& p) {
  CycleDecomposition out;
  out.level = p.level;
  std::vector<char> seen(p.degree(), 0);
  for (uint32_t x = 0; x < p.degree(); ++x) {
    if (seen[x]) continue;
    uint64_t len = 0;
    uint32_t y = x;
    do {
      seen[y] = 1;
      y = p.images[y];
      ++len;
    } while (y != x);
    out.cycles.emplace_back(x, len);
  }
  return out;
}

// Sign of the permutation: (-1)^(points - cycles).
inline int parity(const LevelPerm& p) {
  const auto dec = cycles(p);
  const uint64_t transpositions = p.degree() - dec.cycles.size();
  return (transpositions % 2 == 0) ? 1 : -1;
}

inline bool is_full_cycle(const LevelPerm& p) {
  if (p.level == 0) return true;
  uint64_t len = 0;
  uint32_t y = 0;
  do {
    y = p.images[y];
    ++len;
  } while (y != 0);
  return len == p.degree();
}

inline uint64_t element_order(const LevelPerm& p) {
  uint64_t ord = 1;
  for (const auto& [rep, len] : cycles(p).cycles) {
    const uint64_t g = std::gcd(ord, len);
    const uint64_t mult = len / g;
    if (ord > UINT64_MAX / mult) throw std::overflow_error("element_order: overflow");
    ord *= mult;
  }
  return ord;
}

// Wreath decomposition gamma = (gamma_0, gamma_1) tau at the root.
struct WreathParts {
  bool swap = false;
  LevelPerm left, right;  // sections at vertex 0 and 1
};

inline WreathParts decompose(const LevelPerm& p) {
  if (p.level < 1) throw std::invalid_argument("decompose: level 0 has no root");
  const uint32_t half = p.degree() >> 1;
  WreathParts w;
  w.swap = (p.images[0] & half) != 0;
  w.left.level = w.right.level = p.level - 1;
  w.left.images.resize(half);
  w.right.images.resize(half);
  for (uint32_t x = 0; x < half; ++x) {
    w.left.images[x] = p.images[x] & (half - 1);
    w.right.images[x] = p.images[half | x] & (half - 1);
  }
  return w;
}

inline LevelPerm compose_parts(bool swap, const LevelPerm& left, const LevelPerm& right) {
  if (left.level != right.level) throw std::invalid_argument("compose_parts: level mismatch");
  LevelPerm p;
  p.level = left.level + 1;
  const uint32_t half = uint32_t{1} << left.level;
  p.images.resize(half << 1);
  for (uint32_t x = 0; x < half; ++x) {
    p.images[x] = (swap ? half : 0) | left.images[x];
    p.images[half | x] = (swap ? 0 : half) | right.images[x];
  }
  return p;
}

namespace detail {

inline void append_key(std::string& key, const LevelPerm& p) {
  key.append(reinterpret_cast<const char*>(p.images.data()),
             p.images.size() * sizeof(uint32_t));
}

inline bool conjugate_rec(const LevelPerm& p, const LevelPerm& q,
                          std::unordered_map<std::string, bool>& memo) {
  if (p.level == 0) return true;
  if (p == q) return true;
  std::string key;
  key.reserve((p.images.size() + q.images.size()) * sizeof(uint32_t) + 1);
  append_key(key, p);
  key.push_back('|');
  append_key(key, q);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  const WreathParts a = decompose(p);
  const WreathParts b = decompose(q);
  bool result;
  if (a.swap != b.swap) {
    result = false;
  } else if (a.swap) {
    // (p0, p1)s ~ (q0, q1)s  iff  p0 p1 ~ q0 q1
    result = conjugate_rec(compose(a.left, a.right), compose(b.left, b.right), memo);
  } else {
    result = (conjugate_rec(a.left, b.left, memo) && conjugate_rec(a.right, b.right, memo)) ||
             (conjugate_rec(a.left, b.right, memo) && conjugate_rec(a.right, b.left, memo));
  }
  memo.emplace(std::move(key), result);
  return result;
}

}  // namespace detail

// Conjugacy in the full automorphism group of the level-n tree, decided by
// the recursive characterization: in the swap case the products of the two
// sections must be conjugate, otherwise the sections must be conjugate in
// one of the two pairings.
inline bool conjugate_test(const LevelPerm& p, const LevelPerm& q) {
  if (p.level != q.level) throw std::invalid_argument("conjugate_test: level mismatch");
  if (!is_tree_automorphism(p) || !is_tree_automorphism(q))
    throw std::invalid_argument("conjugate_test: input is not a tree automorphism");
  std::unordered_map<std::string, bool> memo;
  return detail::conjugate_rec(p, q, memo);
}

}  // namespace arbor
