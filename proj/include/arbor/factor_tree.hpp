#pragma once

// The tree of irreducible factors of the iterated pullbacks f^{-n}(a) over
// F_p. Each node is a Frobenius orbit on the level-n fiber: an irreducible
// factor of the pullback polynomial, or the point at infinity as a
// virtual-root node. Degrees per level sum to 2^n, and a node is stable
// through the probe depth when its whole descendant chain is single-child
// with doubling degree.

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/gf.hpp"
#include "arbor/poly.hpp"
#include "arbor/ratmap.hpp"

namespace arbor {

struct FactorNode {
  Poly poly;                // monic irreducible; empty for the infinity node
  bool is_infinity = false;
  int level = 0;
  int degree = 0;           // orbit size: deg(poly), or 1 for infinity
  int parent = -1;
  std::vector<int> children;
  bool stable = false;      // single-child doubling chain down to the probe depth
};

struct FactorTree {
  RationalMap map;
  uint32_t base = 0;
  int depth = 0;
  uint64_t seed = 0;
  std::vector<FactorNode> nodes;
  std::vector<std::vector<int>> by_level;  // node indices per level
};

inline FactorTree build_tree(const RationalMap& f, uint32_t a, int depth, uint64_t seed) {
  if (depth < 0 || depth > config::kDefaultFactorDepth)
    throw resource_error("build_tree: depth beyond cap " +
                         std::to_string(config::kDefaultFactorDepth));
  if (a >= f.field.p()) throw std::invalid_argument("build_tree: base point not in the field");
  for (const ProjPoint& pt : post_critical_set(f))
    if (!pt.inf && pt.x == a)
      throw post_critical_base_error("base point " + std::to_string(a) +
                                     " lies on the post-critical orbit");

  FactorTree tree{f, a, depth, seed, {}, {}};
  std::mt19937_64 rng(seed);

  FactorNode root;
  root.poly = {f.field.neg(a), 1};  // x - a
  root.level = 0;
  root.degree = 1;
  tree.nodes.push_back(root);
  tree.by_level.push_back({0});

  for (int n = 0; n < depth; ++n) {
    std::vector<int> next;
    for (int idx : tree.by_level[size_t(n)]) {
      std::vector<FactorNode> kids;
      const bool infinity_node = tree.nodes[size_t(idx)].is_infinity;
      try {
        Poly affine;
        bool child_at_infinity = false;
        if (infinity_node) {
          const InfinityLift il = lift_infinity(f);
          affine = il.denominator_part;
          child_at_infinity = il.still_infinite;
        } else {
          affine = lift(tree.nodes[size_t(idx)].poly, f);
        }
        if (poly_deg(affine) >= 1) {
          for (const auto& [factor, mult] : poly_factor(f.field, affine, rng)) {
            if (mult != 1) throw ramified_error("repeated factor in the fiber", n + 1);
            FactorNode kid;
            kid.poly = factor;
            kid.level = n + 1;
            kid.degree = poly_deg(factor);
            kid.parent = idx;
            kids.push_back(std::move(kid));
          }
        }
        if (child_at_infinity) {
          FactorNode kid;
          kid.is_infinity = true;
          kid.level = n + 1;
          kid.degree = 1;
          kid.parent = idx;
          kids.push_back(std::move(kid));
        }
      } catch (const degree_drop& dd) {
        // a rational root of this node is the image of infinity
        if (dd.drop() >= 2)
          throw ramified_error("infinity is a double point in the fiber", n + 1);
        for (const auto& [factor, mult] : poly_factor(f.field, dd.affine_part(), rng)) {
          if (mult != 1) throw ramified_error("repeated factor in the fiber", n + 1);
          FactorNode kid;
          kid.poly = factor;
          kid.level = n + 1;
          kid.degree = poly_deg(factor);
          kid.parent = idx;
          kids.push_back(std::move(kid));
        }
        FactorNode kid;
        kid.is_infinity = true;
        kid.level = n + 1;
        kid.degree = 1;
        kid.parent = idx;
        kids.push_back(std::move(kid));
      } catch (const ramified_error& re) {
        throw ramified_error(std::string(re.what()), n + 1);
      }
      for (FactorNode& kid : kids) {
        tree.nodes.push_back(std::move(kid));
        const int kid_idx = int(tree.nodes.size()) - 1;
        tree.nodes[size_t(idx)].children.push_back(kid_idx);
        next.push_back(kid_idx);
      }
    }
    tree.by_level.push_back(std::move(next));
  }

  // stability: single-child doubling chains down to the probe depth
  for (int n = depth; n >= 0; --n) {
    for (int idx : tree.by_level[size_t(n)]) {
      FactorNode& node = tree.nodes[size_t(idx)];
      if (n == depth) {
        node.stable = true;
        continue;
      }
      node.stable = node.children.size() == 1 &&
                    tree.nodes[size_t(node.children[0])].degree == 2 * node.degree &&
                    tree.nodes[size_t(node.children[0])].stable;
    }
  }
  return tree;
}

struct FrobeniusLevel {
  int n = 0;
  std::vector<int> cycle_type;     // factor degrees, ascending; infinity counts 1
  uint64_t stable_degree_sum = 0;  // total degree in stable chains
  uint64_t total = 0;              // 2^n

  double stable_proportion() const { return total ? double(stable_degree_sum) / double(total) : 0.0; }
};

struct FrobeniusReport {
  std::vector<FrobeniusLevel> levels;
};

inline FrobeniusReport frobenius_report(const FactorTree& tree) {
  FrobeniusReport report;
  for (int n = 0; n <= tree.depth; ++n) {
    FrobeniusLevel lvl;
    lvl.n = n;
    lvl.total = uint64_t{1} << n;
    for (int idx : tree.by_level[size_t(n)]) {
      const FactorNode& node = tree.nodes[size_t(idx)];
      lvl.cycle_type.push_back(node.degree);
      if (node.stable) lvl.stable_degree_sum += uint64_t(node.degree);
    }
    std::sort(lvl.cycle_type.begin(), lvl.cycle_type.end());
    report.levels.push_back(std::move(lvl));
  }
  return report;
}

// Product of the affine factors at one level; with the virtual-root
// correction this must reproduce the monic numerator of f^n(x) - a.
inline Poly level_product(const FactorTree& tree, int n) {
  Poly prod = poly_one();
  for (int idx : tree.by_level[size_t(n)]) {
    const FactorNode& node = tree.nodes[size_t(idx)];
    if (!node.is_infinity) prod = poly_mul(tree.map.field, prod, node.poly);
  }
  return prod;
}

}  // namespace arbor
