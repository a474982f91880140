#pragma once

// Exact stabilizer chains for subgroups of the automorphism group of the
// level-n tree. Every such subgroup is a 2-group, and the chain uses the
// natural base: internal vertices in breadth-first order, filtered by the
// portrait swap bit at each vertex. For an element whose swap bits vanish at
// every vertex before position j (breadth-first), the bit at position j is a
// homomorphism to C_2, so each chain slot contributes a factor of exactly 2
// and the group order is 2^(number of filled slots).
//
// Closure is deterministic: when a slot is added, its square, its Schreier
// conjugates against the other slots, and (for normal closures) its
// conjugates under the ambient generators are queued and sifted until
// quiescence. Membership is sifting; orders are exact by construction.

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/perm.hpp"

namespace arbor {

class StabilizerChain {
 public:
  explicit StabilizerChain(int level) : level_(level), vertex_count_((uint32_t{1} << level) - 1) {
    if (level < 0) throw std::invalid_argument("StabilizerChain: negative level");
    // leftmost leaf under the 0-child and the trailing shift, per BFS vertex
    leaf_.resize(vertex_count_);
    shift_.resize(vertex_count_);
    for (int d = 0; d < level; ++d) {
      for (uint32_t idx = 0; idx < (uint32_t{1} << d); ++idx) {
        const uint32_t j = (uint32_t{1} << d) - 1 + idx;
        shift_[j] = level - d - 1;
        leaf_[j] = (idx << 1) << shift_[j];
      }
    }
  }

  int level() const { return level_; }
  int log2_order() const { return static_cast<int>(slots_.size()); }

  // Builds the closure of `generators`, conjugation-closed under
  // `conjugators` (pass the ambient group's generators to get a normal
  // closure, or nothing for a plain subgroup).
  void close(const std::vector<LevelPerm>& generators, const std::vector<LevelPerm>& conjugators) {
    conjugators_.clear();
    for (const LevelPerm& g : conjugators) {
      conjugators_.push_back(g);
      conjugators_.push_back(inverse(g));
    }
    for (const LevelPerm& g : generators) insert(g);
    while (!tasks_.empty()) {
      const Task t = tasks_.front();
      tasks_.pop_front();
      insert(materialize(t));
    }
    conjugators_.clear();
  }

  bool contains(const LevelPerm& p) const {
    if (p.level != level_) throw std::invalid_argument("StabilizerChain: level mismatch");
    LevelPerm rem = p;
    return sift(rem) == kIdentityPos;
  }

  // Smallest power of two 2^e with p^(2^e) in the chain; e <= level always
  // suffices because the ambient group has exponent 2^level.
  int log2_coset_order(const LevelPerm& p) const {
    LevelPerm q = p;
    for (int e = 0; e <= level_; ++e) {
      if (contains(q)) return e;
      q = compose(q, q);
    }
    throw std::logic_error("log2_coset_order: power never entered the chain");
  }

 private:
  static constexpr uint32_t kIdentityPos = UINT32_MAX;

  struct Task {
    enum Kind : uint8_t { kSquare, kPairConj, kAmbientConj };
    Kind kind;
    uint32_t a = 0;  // slot position
    uint32_t b = 0;  // second slot position or conjugator index
  };

  int swap_bit(const LevelPerm& p, uint32_t j) const {
    return (p.images[leaf_[j]] >> shift_[j]) & 1u;
  }

  uint32_t leading(const LevelPerm& p, uint32_t from) const {
    for (uint32_t j = from; j < vertex_count_; ++j)
      if (swap_bit(p, j)) return j;
    return kIdentityPos;
  }

  // Reduces p against the chain in place; returns the leading position of
  // the remainder (kIdentityPos when p reduces to the identity).
  uint32_t sift(LevelPerm& p) const {
    uint32_t j = leading(p, 0);
    while (j != kIdentityPos) {
      const auto it = slots_.find(j);
      if (it == slots_.end()) return j;
      // both factors lead at j, so the product's bits through j vanish
      p = compose(it->second, p);
      j = leading(p, j);
    }
    return kIdentityPos;
  }

  LevelPerm materialize(const Task& t) const {
    const LevelPerm& x = slots_.at(t.a);
    switch (t.kind) {
      case Task::kSquare:
        return compose(x, x);
      case Task::kPairConj: {
        const LevelPerm& y = slots_.at(t.b);  // t.a shallower than t.b
        return compose(compose(x, y), inverse(x));
      }
      case Task::kAmbientConj: {
        const LevelPerm& g = conjugators_.at(t.b);
        return compose(compose(g, x), inverse(g));
      }
    }
    throw std::logic_error("materialize: bad task");
  }

  void insert(LevelPerm p) {
    const uint32_t pos = sift(p);
    if (pos == kIdentityPos) return;
    for (const auto& [q, unused] : slots_) {
      (void)unused;
      if (q < pos)
        tasks_.push_back({Task::kPairConj, q, pos});
      else
        tasks_.push_back({Task::kPairConj, pos, q});
    }
    tasks_.push_back({Task::kSquare, pos, 0});
    for (uint32_t gi = 0; gi < conjugators_.size(); ++gi)
      tasks_.push_back({Task::kAmbientConj, pos, gi});
    slots_.emplace(pos, std::move(p));
  }

  int level_;
  uint32_t vertex_count_;
  std::vector<uint32_t> leaf_;
  std::vector<uint32_t> shift_;
  std::map<uint32_t, LevelPerm> slots_;
  std::vector<LevelPerm> conjugators_;
  std::deque<Task> tasks_;
};

// A finite permutation group on tree leaves with an exact order certificate.
struct PermGroup {
  int level = 0;
  std::vector<LevelPerm> generators;
  StabilizerChain chain{0};

  int log2_order() const { return chain.log2_order(); }
  std::string order_decimal() const { return pow2_decimal(chain.log2_order()); }
  bool contains(const LevelPerm& p) const { return level == 0 || chain.contains(p); }
};

inline PermGroup make_group(int level, std::vector<LevelPerm> generators,
                            const std::vector<LevelPerm>& conjugators = {}) {
  PermGroup g;
  g.level = level;
  g.generators = std::move(generators);
  g.chain = StabilizerChain(level);
  if (level > 0) g.chain.close(g.generators, conjugators);
  return g;
}

// Exhaustive closure by breadth-first multiplication. Independent of the
// chain machinery; only usable at small degree.
inline uint64_t bfs_order_oracle(const std::vector<LevelPerm>& gens, uint64_t limit = 1u << 20) {
  if (gens.empty()) return 1;
  const auto key = [](const LevelPerm& p) {
    return std::string(reinterpret_cast<const char*>(p.images.data()),
                       p.images.size() * sizeof(uint32_t));
  };
  std::unordered_set<std::string> seen;
  std::deque<LevelPerm> frontier;
  const LevelPerm id = LevelPerm::identity(gens.front().level);
  seen.insert(key(id));
  frontier.push_back(id);
  while (!frontier.empty()) {
    const LevelPerm cur = frontier.front();
    frontier.pop_front();
    for (const LevelPerm& g : gens) {
      LevelPerm next = compose(cur, g);
      if (seen.insert(key(next)).second) {
        if (seen.size() > limit) throw resource_error("bfs_order_oracle: limit exceeded");
        frontier.push_back(std::move(next));
      }
    }
  }
  return seen.size();
}

}  // namespace arbor
