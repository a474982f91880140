#pragma once

// Finite-level certification of the group structure: orders of the level-n
// truncations G_n, normal closures N_{i,n} omitting a_i and a_{i-s+1},
// cyclic quotients and their growth, semidirect splitting, derived subgroups
// and the abelianization order identity for s = 2.
//
// N_i is the normal closure of { a_j : j != i, i-s+1 (mod r) }. The quotient
// G_n / N_{i,n} is a cyclic 2-group generated by the coset of a_i, so its
// order equals the smallest 2^e with a_i^(2^e) in N_{i,n}; the reported
// quotient order |G_n| / |N_{i,n}| is computed independently from the two
// chain orders and compared against that coset order by semidirect_check.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arbor/chain.hpp"
#include "arbor/common.hpp"
#include "arbor/family.hpp"
#include "arbor/perm.hpp"
#include "arbor/words.hpp"

namespace arbor {

// Caches chains per level so the expensive objects are built once per
// family. Not synchronized; use one analyzer per worker.
class GroupAnalyzer {
 public:
  explicit GroupAnalyzer(GeneratorFamily fam) : fam_(std::move(fam)) {}

  const GeneratorFamily& family() const { return fam_; }

  const PermGroup& group(int n) {
    check_group_level(n);
    auto it = groups_.find(n);
    if (it == groups_.end())
      it = groups_.emplace(n, make_group(n, generator_perms(n))).first;
    return it->second;
  }

  // Normal closure in G_n of the generators a_j with j != i, i-s+1 (mod r).
  const PermGroup& closure_Ni(int i, int n) {
    check_group_level(n);
    check_index(i);
    auto it = closures_.find({i, n});
    if (it == closures_.end()) {
      const int r = fam_.orbit.r;
      const int omit1 = i;
      const int omit2 = mod1(i - fam_.orbit.s + 1, r);
      std::vector<LevelPerm> gens;
      for (int j = 1; j <= r; ++j)
        if (j != omit1 && j != omit2) gens.push_back(restrict_word(fam_.generator(j), n));
      it = closures_.emplace(std::make_pair(i, n), make_group(n, std::move(gens), generator_perms(n)))
               .first;
    }
    return it->second;
  }

  const PermGroup& derived_subgroup(int n) {
    if (n > config::kMaxDerivedLevel)
      throw resource_error("derived_subgroup: level beyond cap");
    check_group_level(n);
    auto it = derived_.find(n);
    if (it == derived_.end()) {
      const std::vector<LevelPerm> gens = generator_perms(n);
      std::vector<LevelPerm> comms;
      for (size_t a = 0; a < gens.size(); ++a)
        for (size_t b = a + 1; b < gens.size(); ++b)
          comms.push_back(compose(compose(compose(inverse(gens[a]), inverse(gens[b])), gens[a]),
                                  gens[b]));
      it = derived_.emplace(n, make_group(n, std::move(comms), gens)).first;
    }
    return it->second;
  }

  int log2_group_order(int n) { return n == 0 ? 0 : group(n).log2_order(); }
  int log2_Ni_order(int i, int n) { return n == 0 ? 0 : closure_Ni(i, n).log2_order(); }

  int log2_quotient_order(int i, int n) {
    return log2_group_order(n) - log2_Ni_order(i, n);
  }

  // Whether adjoining a_i to N_{i,n} recovers all of G_n: every generator
  // must fall in some coset N a_i^e with 0 <= e < quotient order.
  bool cyclic_quotient(int i, int n) {
    if (n == 0) return true;
    const PermGroup& N = closure_Ni(i, n);
    const int e_max = log2_quotient_order(i, n);
    const LevelPerm ai_inv = inverse(restrict_word(fam_.generator(i), n));
    for (int j = 1; j <= fam_.orbit.r; ++j) {
      LevelPerm x = restrict_word(fam_.generator(j), n);
      bool found = false;
      for (int64_t e = 0; e < (int64_t{1} << e_max) && !found; ++e) {
        if (N.contains(x)) found = true;
        x = compose(x, ai_inv);
      }
      if (!found) return false;
    }
    return true;
  }

  // Order of the coset of a_i in G_n / N_{i,n} equals the quotient order;
  // certifies the splitting G_n = N_{i,n} x| <a_i>.
  bool semidirect_check(int i, int n) {
    if (n == 0) return true;
    const int coset = closure_Ni(i, n).chain.log2_coset_order(restrict_word(fam_.generator(i), n));
    return coset == log2_quotient_order(i, n);
  }

  // s = 2 only: |G_n / [G_n, G_n]| must equal the product of the r-1
  // quotient orders |G_n / N_{i,n}|, i = 1..r-1.
  bool abelianization_check(int n) {
    if (fam_.orbit.s != 2)
      throw std::invalid_argument("abelianization_check: requires s = 2");
    if (n == 0) return true;
    const int ab = log2_group_order(n) - derived_subgroup(n).log2_order();
    int product = 0;
    for (int i = 1; i <= fam_.orbit.r - 1; ++i) product += log2_quotient_order(i, n);
    return ab == product;
  }

  int log2_abelianization_order(int n) {
    return log2_group_order(n) - derived_subgroup(n).log2_order();
  }

  // Membership of the doubled element (g, g) with g = restrict(w, n-1).
  bool diagonal_membership(const TreeWord& w, int n) {
    if (n < 1) throw std::invalid_argument("diagonal_membership: level must be >= 1");
    const LevelPerm half = restrict_word(w, n - 1);
    return diagonal_membership_raw(compose_parts(false, half, half));
  }

  bool diagonal_membership_raw(const LevelPerm& p) { return group(p.level).contains(p); }

 private:
  static int mod1(int x, int r) {
    int m = x % r;
    if (m <= 0) m += r;
    return m;
  }

  void check_group_level(int n) const {
    if (n < 0) throw std::invalid_argument("group level must be >= 0");
    if (n > config::kMaxGroupLevel) throw resource_error("group level beyond cap");
    config::check_level(n, "group");
  }

  void check_index(int i) const {
    if (i < 1 || i > fam_.orbit.r) throw std::out_of_range("generator index out of range");
  }

  std::vector<LevelPerm> generator_perms(int n) const {
    std::vector<LevelPerm> gens;
    gens.reserve(fam_.orbit.r);
    for (int i = 1; i <= fam_.orbit.r; ++i) gens.push_back(restrict_word(fam_.generator(i), n));
    return gens;
  }

  GeneratorFamily fam_;
  std::map<int, PermGroup> groups_;
  std::map<std::pair<int, int>, PermGroup> closures_;
  std::map<int, PermGroup> derived_;
};

struct QuotientLevel {
  int n = 0;
  int log2_group = 0;     // log2 |G_n|
  int log2_closure = 0;   // log2 |N_{i,n}|
  int log2_quotient = 0;  // log2 |G_n / N_{i,n}|
  bool cyclic = false;
  bool step_ok = false;    // quotient grows by a factor in {1, 2} per level
  bool growth_ok = false;  // |G_n/N| >= 2 |G_{n-r}/N| once n > r
};

struct QuotientReport {
  int i = 0;
  std::vector<QuotientLevel> levels;

  bool all_ok() const {
    for (const auto& l : levels)
      if (!(l.cyclic && l.step_ok && l.growth_ok)) return false;
    return true;
  }
};

inline QuotientReport quotient_report(GroupAnalyzer& an, int i, int n_max) {
  QuotientReport report{i, {}};
  const int r = an.family().orbit.r;
  std::vector<int> quotient(n_max + 1, 0);
  for (int n = 1; n <= n_max; ++n) {
    QuotientLevel lvl;
    lvl.n = n;
    lvl.log2_group = an.log2_group_order(n);
    lvl.log2_closure = an.log2_Ni_order(i, n);
    lvl.log2_quotient = lvl.log2_group - lvl.log2_closure;
    quotient[n] = lvl.log2_quotient;
    lvl.cyclic = an.cyclic_quotient(i, n);
    const int prev = (n >= 2) ? quotient[n - 1] : 0;
    lvl.step_ok = lvl.log2_quotient >= prev && lvl.log2_quotient <= prev + 1;
    lvl.growth_ok = (n <= r) || (lvl.log2_quotient >= quotient[n - r] + 1);
    report.levels.push_back(lvl);
  }
  return report;
}

// Diagnostic only: levels where the order of restrict(w, n) failed to grow
// strictly past the first nontrivial level. Truncation orders always satisfy
// ord_n | ord_{n+1} | 2 ord_n; strict growth at every level is a symptom of
// torsion-freeness, not a theorem, so failures are listed rather than fatal.
struct TorsionDiagnostic {
  std::vector<uint64_t> orders;     // orders[n-1] = order of restrict(w, n)
  int first_nontrivial = -1;        // smallest n with order > 1, or -1
  std::vector<int> strict_failures; // levels n with ord_{n+1} = ord_n > 1
};

inline TorsionDiagnostic torsion_diagnostic(const TreeWord& w, int n_max) {
  TorsionDiagnostic diag;
  for (int n = 1; n <= n_max; ++n) {
    diag.orders.push_back(element_order(restrict_word(w, n)));
    if (diag.first_nontrivial < 0 && diag.orders.back() > 1) diag.first_nontrivial = n;
  }
  for (int n = 1; n < n_max; ++n) {
    const uint64_t cur = diag.orders[n - 1], next = diag.orders[n];
    if (next != cur && next != 2 * cur)
      throw std::logic_error("torsion_diagnostic: truncation order law violated");
    if (cur > 1 && next == cur) diag.strict_failures.push_back(n);
  }
  return diag;
}

// Convenience wrappers matching the per-operation surface.
inline PermGroup level_group(const GeneratorFamily& fam, int n) {
  GroupAnalyzer an(fam);
  return an.group(n);
}

inline PermGroup normal_closure_Ni(const GeneratorFamily& fam, int i, int n) {
  GroupAnalyzer an(fam);
  return an.closure_Ni(i, n);
}

inline bool semidirect_check(const GeneratorFamily& fam, int i, int n) {
  GroupAnalyzer an(fam);
  return an.semidirect_check(i, n);
}

inline bool abelianization_check(const GeneratorFamily& fam, int n) {
  GroupAnalyzer an(fam);
  return an.abelianization_check(n);
}

inline bool diagonal_membership(const GeneratorFamily& fam, const TreeWord& w, int n) {
  GroupAnalyzer an(fam);
  return an.diagonal_membership(w, n);
}

}  // namespace arbor
