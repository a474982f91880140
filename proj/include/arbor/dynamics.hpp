#pragma once

// Cycle structure per level, stable-cycle detection up to a probe depth,
// settledness proportions, and the section-of-a-power law on stable cycles.
//
// Stability of a level-n cycle is only ever certified through a finite probe
// depth D: a cycle of length k is stable-through-D when for every level
// n < m <= D all level-m vertices above its orbit form one cycle of length
// 2^(m-n) k. Reports always carry the probe depth.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/family.hpp"
#include "arbor/perm.hpp"
#include "arbor/words.hpp"

namespace arbor {

struct CycleStability {
  uint32_t rep = 0;        // smallest leaf in the level-n cycle
  uint64_t length = 0;     // k
  bool stable = false;     // stable through the probe depth
  int split_level = -1;    // first m with n < m <= D where the lift splits
};

struct StabilityReport {
  int level = 0;
  int probe_depth = 0;
  std::vector<CycleStability> entries;
};

inline StabilityReport stability(const TreeWord& w, int n, int D) {
  if (n < 0 || D < n) throw std::invalid_argument("stability: need 0 <= n <= D");
  config::check_level(D, "stability");

  StabilityReport report{n, D, {}};
  const CycleDecomposition base = cycles(restrict_word(w, n));
  report.entries.reserve(base.cycles.size());
  for (const auto& [rep, len] : base.cycles)
    report.entries.push_back({rep, len, true, -1});

  for (int m = n + 1; m <= D; ++m) {
    const LevelPerm pm = restrict_word(w, m);
    for (auto& entry : report.entries) {
      if (!entry.stable) continue;
      // all vertices above the orbit form one cycle iff the orbit of one
      // lift has the full size k * 2^(m-n)
      const uint64_t want = entry.length << (m - n);
      const uint32_t start = entry.rep << (m - n);
      uint64_t size = 0;
      uint32_t v = start;
      do {
        v = pm.images[v];
        ++size;
      } while (v != start && size < want + 1);
      if (size != want) {
        entry.stable = false;
        entry.split_level = m;
      }
    }
  }
  return report;
}

struct SettledEstimate {
  int level = 0;
  int probe_depth = 0;
  uint64_t stable_leaves = 0;
  uint64_t total_leaves = 0;

  double value() const {
    return total_leaves ? double(stable_leaves) / double(total_leaves) : 0.0;
  }
};

// Proportion of level-n vertices lying in cycles stable through D; an upper
// bound on the true stable proportion at level n.
inline SettledEstimate settled_estimate(const TreeWord& w, int n, int D) {
  const StabilityReport report = stability(w, n, D);
  SettledEstimate est{n, D, 0, uint64_t{1} << n};
  for (const auto& entry : report.entries)
    if (entry.stable) est.stable_leaves += entry.length;
  return est;
}

// The section of w^k at v: the product of the sections of w along the orbit
// v, (v)w, ..., (v)w^{k-1}. Requires (v)w^k = v.
inline TreeWord section_power(const TreeWord& w, const Vertex& v, uint64_t k) {
  if (k == 0) return identity_word(w.table);
  TreeWord result{w.table, {}};
  Vertex cur = v;
  for (uint64_t i = 0; i < k; ++i) {
    const TreeWord sec = section(w, cur);
    result.letters.insert(result.letters.end(), sec.letters.begin(), sec.letters.end());
    cur = act(w, cur);
  }
  if (!(cur == v)) throw std::invalid_argument("section_power: vertex is not k-periodic");
  return result;
}

// On every cycle stable through D at level n, the section of w^k at the
// representative must act as a full 2^(D-n)-cycle on the subtree below it.
inline bool sodo_check(const TreeWord& w, int n, int D) {
  const StabilityReport report = stability(w, n, D);
  for (const auto& entry : report.entries) {
    if (!entry.stable) continue;
    const Vertex rep{n, entry.rep};
    const TreeWord sec = section_power(w, rep, entry.length);
    if (!is_full_cycle(restrict_word(sec, D - n))) return false;
  }
  return true;
}

// Uniform random words over {a_i^{+-1}}, lengths 1..32. Uses explicit modular
// reduction so the sequence depends only on the seed, not on the standard
// library's distribution implementations.
inline TreeWord sample_word(const GeneratorFamily& fam, std::mt19937_64& rng) {
  const int r = fam.orbit.r;
  const int len = 1 + int(rng() % 32);
  TreeWord w{fam.table, {}};
  w.letters.reserve(len);
  for (int i = 0; i < len; ++i) {
    const uint32_t state = 1 + uint32_t(rng() % r);
    const int8_t sign = (rng() % 2) ? int8_t{1} : int8_t{-1};
    w.letters.push_back({state, sign});
  }
  return w;
}

}  // namespace arbor
