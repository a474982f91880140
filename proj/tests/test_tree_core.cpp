#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "arbor/family.hpp"
#include "arbor/perm.hpp"
#include "arbor/words.hpp"

using namespace arbor;

namespace {

// All 2^(2^n - 1) automorphisms of the level-n tree, from portraits.
// Test-only oracle; independent of the word machinery.
std::vector<LevelPerm> enumerate_omega(int n) {
  if (n == 0) return {LevelPerm::identity(0)};
  const std::vector<LevelPerm> below = enumerate_omega(n - 1);
  std::vector<LevelPerm> out;
  out.reserve(below.size() * below.size() * 2);
  for (const LevelPerm& l : below)
    for (const LevelPerm& r : below)
      for (int sw = 0; sw < 2; ++sw) out.push_back(compose_parts(sw != 0, l, r));
  return out;
}

bool conjugate_brute(const LevelPerm& p, const LevelPerm& q, const std::vector<LevelPerm>& omega) {
  for (const LevelPerm& g : omega)
    if (compose(compose(inverse(g), p), g) == q) return true;
  return false;
}

TreeWord random_word(const GeneratorFamily& fam, std::mt19937_64& rng, int max_len = 12) {
  TreeWord w{fam.table, {}};
  const int len = 1 + int(rng() % max_len);
  for (int i = 0; i < len; ++i)
    w.letters.push_back({1 + uint32_t(rng() % fam.orbit.r), (rng() % 2) ? int8_t{1} : int8_t{-1}});
  return w;
}

}  // namespace

TEST_CASE("action of sigma and the identity word") {
  const auto sig = sigma_table();
  const TreeWord s = parse_word(sig, "s");
  CHECK(to_string(act(s, vertex_from_string("10"))) == "00");
  CHECK(to_string(act(s, vertex_from_string("01"))) == "11");

  const TreeWord empty = identity_word(sig);
  for (const char* v : {"", "0", "11", "0101"})
    CHECK(act(empty, vertex_from_string(v)) == vertex_from_string(v));
}

TEST_CASE("action of a recursively defined generator") {
  // a_1 = (a_3, id)s for (r, s) = (3, 2), unfolded by hand for two levels
  const GeneratorFamily fam = build_family({3, 2});
  CHECK(to_string(act(fam.generator(1), vertex_from_string("01"))) == "11");
}

TEST_CASE("level-2 action table of the standard odometer") {
  const TreeWord b = parse_word(standard_odometer_table(), "b");
  CHECK(to_string(act(b, vertex_from_string("10"))) == "00");
  CHECK(to_string(act(b, vertex_from_string("00"))) == "11");
  CHECK(to_string(act(b, vertex_from_string("01"))) == "10");
  CHECK(to_string(act(b, vertex_from_string("11"))) == "01");
}

TEST_CASE("sections of the standard odometer") {
  const auto odo = standard_odometer_table();
  const TreeWord b = parse_word(odo, "b");
  // at all-zero words the section is the element itself
  CHECK(section(b, vertex_from_string("00")).letters == b.letters);
  CHECK(section(b, vertex_from_string("0000")).letters == b.letters);
  // anywhere else it is the identity
  CHECK(section(b, vertex_from_string("1")).is_identity_word());
  CHECK(section(b, vertex_from_string("0100")).is_identity_word());
}

TEST_CASE("section cocycle against the action, exhaustively to depth 4") {
  const GeneratorFamily fam = build_family({3, 2});
  const TreeWord w = parse_word(fam.table, "a2 a3");
  const TreeWord sec = section(w, vertex_from_string("0"));
  for (int len = 0; len <= 4; ++len) {
    for (uint32_t u = 0; u < (uint32_t{1} << len); ++u) {
      const Vertex below{len, u};
      const Vertex whole{len + 1, u};  // 0 then u
      const Vertex image = act(w, whole);
      CHECK(image.bit(0) == 1);
      CHECK(act(sec, below).path == (image.path & ((uint32_t{1} << len) - 1)));
    }
  }
}

TEST_CASE("section coherence on random words") {
  std::mt19937_64 rng(2024);
  const GeneratorFamily fam = build_family({4, 3});
  for (int trial = 0; trial < 40; ++trial) {
    const TreeWord w = random_word(fam, rng);
    const int x = int(rng() % 2);
    const TreeWord sec = section(w, Vertex{1, uint32_t(x)});
    const int xi = act(w, Vertex{1, uint32_t(x)}).path;
    for (int len = 1; len <= 8; len += 3) {
      const uint32_t v = uint32_t(rng()) & ((uint32_t{1} << len) - 1);
      const Vertex whole{len + 1, (uint32_t(x) << len) | v};
      const Vertex image = act(w, whole);
      CHECK(image.bit(0) == xi);
      CHECK(act(sec, Vertex{len, v}).path == (image.path & ((uint32_t{1} << len) - 1)));
    }
  }
}

TEST_CASE("restrictions: sigma, the defining relation, and a 4-cycle") {
  const auto sig = sigma_table();
  const LevelPerm s2 = restrict_word(parse_word(sig, "s"), 2);
  CHECK(s2.images == std::vector<uint32_t>{2, 3, 0, 1});

  for (const PCOrbit orbit : {PCOrbit{3, 2}, PCOrbit{5, 3}, PCOrbit{8, 7}, PCOrbit{4, 4}}) {
    const GeneratorFamily fam = build_family(orbit);
    CHECK(restrict_word(fam.relation_word(), 8).is_identity());
  }

  const GeneratorFamily fam = build_family({3, 2});
  const LevelPerm a2 = restrict_word(fam.generator(2), 2);
  CHECK(a2.images == std::vector<uint32_t>{2, 3, 1, 0});  // (00 10 01 11)
  CHECK(is_full_cycle(a2));
}

TEST_CASE("restriction to level 0 is trivial and compatible with truncation") {
  const GeneratorFamily fam = build_family({3, 2});
  const TreeWord w = parse_word(fam.table, "a1 a2^-1");
  CHECK(restrict_word(w, 0).is_identity());
  const LevelPerm deep = restrict_word(w, 6);
  for (int n = 0; n <= 6; ++n) CHECK(truncate(deep, n) == restrict_word(w, n));
}

TEST_CASE("signs of sigma") {
  const auto sig = sigma_table();
  const TreeWord s = parse_word(sig, "s");
  CHECK(sign_at(s, 1) == -1);
  CHECK(sign_at(s, 5) == 1);
}

TEST_CASE("sign vectors match the published generator signs for (8,7)") {
  const GeneratorFamily fam = build_family({8, 7});
  CHECK(sign_at(fam.generator(1), 3) == -1);
  CHECK(sign_vector(fam.generator(1), 8).entries ==
        std::vector<int>{-1, 1, -1, 1, 1, 1, 1, 1});
  CHECK(sign_vector(fam.generator(2), 8).entries ==
        std::vector<int>{1, -1, 1, -1, 1, 1, 1, 1});
  CHECK(sign_vector(fam.generator(5), 8).entries ==
        std::vector<int>{1, 1, 1, 1, -1, 1, -1, 1});
  CHECK(sign_vector(fam.generator(6), 8).entries ==
        std::vector<int>{1, 1, 1, 1, 1, -1, 1, -1});
}

TEST_CASE("sign vector of a_1 for (3,2) and the identity word") {
  const GeneratorFamily fam = build_family({3, 2});
  CHECK(sign_vector(fam.generator(1), 6).entries == std::vector<int>{-1, 1, -1, -1, 1, -1});
  CHECK(sign_vector(identity_word(fam.table), 5).entries == std::vector<int>{1, 1, 1, 1, 1});
}

TEST_CASE("recursive sign equals permutation parity at every level") {
  std::mt19937_64 rng(7);
  for (const PCOrbit orbit : {PCOrbit{3, 2}, PCOrbit{4, 2}, PCOrbit{8, 7}}) {
    const GeneratorFamily fam = build_family(orbit);
    for (int trial = 0; trial < 6; ++trial) {
      const TreeWord w = random_word(fam, rng);
      for (int n = 1; n <= 12; n += (n < 6 ? 1 : 3))
        CHECK(sign_at(w, n) == parity(restrict_word(w, n)));
    }
  }
}

TEST_CASE("per-level sign is a homomorphism and invariant under inversion") {
  std::mt19937_64 rng(11);
  const GeneratorFamily fam = build_family({5, 4});
  for (int trial = 0; trial < 20; ++trial) {
    const TreeWord u = random_word(fam, rng);
    const TreeWord v = random_word(fam, rng);
    for (int n : {1, 2, 4, 7}) {
      CHECK(sign_at(concat(u, v), n) == sign_at(u, n) * sign_at(v, n));
      CHECK(sign_at(inverse(u), n) == sign_at(u, n));
    }
  }
}

TEST_CASE("odometer parity law: odd powers preserve the sign vector") {
  std::mt19937_64 rng(13);
  const GeneratorFamily fam = build_family({4, 2});
  for (int trial = 0; trial < 10; ++trial) {
    const TreeWord w = random_word(fam, rng, 6);
    for (int64_t k : {3, 5, -1, 9}) {
      CHECK(sign_vector(word_pow(w, k), 8) == sign_vector(w, 8));
    }
  }
}

TEST_CASE("restriction is a homomorphism") {
  std::mt19937_64 rng(17);
  const GeneratorFamily fam = build_family({6, 3});
  for (int trial = 0; trial < 15; ++trial) {
    const TreeWord u = random_word(fam, rng);
    const TreeWord v = random_word(fam, rng);
    const int n = 1 + int(rng() % 10);
    CHECK(restrict_word(concat(u, v), n) == compose(restrict_word(u, n), restrict_word(v, n)));
    CHECK(restrict_word(inverse(u), n) == inverse(restrict_word(u, n)));
  }
}

TEST_CASE("dyadic powers") {
  const auto odo = standard_odometer_table();
  const TreeWord b = parse_word(odo, "b");
  for (int n : {1, 3, 6}) {
    CHECK(power_dyadic(b, DyadicExponent{0, n}).is_identity());
    CHECK(power_dyadic(b, DyadicExponent::from_signed(-1, n)) == inverse(restrict_word(b, n)));
    // the standard odometer has order exactly 2^n on level n
    CHECK(perm_pow(restrict_word(b, n), uint64_t{1} << n).is_identity());
    CHECK_FALSE(perm_pow(restrict_word(b, n), uint64_t{1} << (n - 1)).is_identity());
  }

  const GeneratorFamily fam = build_family({3, 2});
  CHECK(power_dyadic(fam.generator(2), DyadicExponent{2, 2}).images ==
        std::vector<uint32_t>{1, 0, 3, 2});  // (00 01)(10 11)
}

TEST_CASE("conjugacy: swap case depends only on the section product") {
  const auto odo = standard_odometer_table();
  for (int n : {2, 4, 6}) {
    const LevelPerm g = restrict_word(parse_word(odo, "b"), n - 1);
    const LevelPerm id = LevelPerm::identity(n - 1);
    const LevelPerm left = compose_parts(true, g, id);   // (g, id)s
    const LevelPerm right = compose_parts(true, id, g);  // (id, g)s
    CHECK(conjugate_test(left, right));
    CHECK(conjugate_test(left, left));
  }
}

TEST_CASE("conjugacy: a_1 and sigma separate at level 3 for (3,2)") {
  const GeneratorFamily fam = build_family({3, 2});
  const LevelPerm a1 = restrict_word(fam.generator(1), 3);
  const LevelPerm s3 = restrict_word(parse_word(fam.table, "s"), 3);
  CHECK_FALSE(conjugate_test(a1, s3));
}

TEST_CASE("conjugacy test agrees with brute force exhaustively at level <= 3") {
  for (int n = 1; n <= 3; ++n) {
    const std::vector<LevelPerm> omega = enumerate_omega(n);
    if (n < 3) {
      for (const LevelPerm& p : omega)
        for (const LevelPerm& q : omega)
          CHECK(conjugate_test(p, q) == conjugate_brute(p, q, omega));
    } else {
      // level 3 has 128 elements; sample pairs against the full conjugator sweep
      std::mt19937_64 rng(23);
      for (int trial = 0; trial < 300; ++trial) {
        const LevelPerm& p = omega[rng() % omega.size()];
        const LevelPerm& q = omega[rng() % omega.size()];
        CHECK(conjugate_test(p, q) == conjugate_brute(p, q, omega));
      }
    }
  }
}

TEST_CASE("conjugacy test agrees with brute force on random level-4 pairs") {
  const std::vector<LevelPerm> omega = enumerate_omega(4);
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const LevelPerm& p = omega[rng() % omega.size()];
    const LevelPerm& q = omega[rng() % omega.size()];
    CHECK(conjugate_test(p, q) == conjugate_brute(p, q, omega));
  }
}

TEST_CASE("conjugate_test validates its inputs") {
  LevelPerm bad;
  bad.level = 2;
  bad.images = {1, 2, 3, 0};  // a 4-cycle that is not a tree automorphism
  CHECK_FALSE(is_tree_automorphism(bad));
  CHECK_THROWS_AS(conjugate_test(bad, bad), std::invalid_argument);
  const LevelPerm id2 = LevelPerm::identity(2);
  const LevelPerm id3 = LevelPerm::identity(3);
  CHECK_THROWS_AS(conjugate_test(id2, id3), std::invalid_argument);
}

TEST_CASE("level cap raises a resource error") {
  const GeneratorFamily fam = build_family({3, 2});
  CHECK_THROWS_AS(restrict_word(fam.generator(1), config::max_level() + 1), resource_error);
}

TEST_CASE("word parser round trip and error cases") {
  const GeneratorFamily fam = build_family({4, 2});
  const TreeWord w = parse_word(fam.table, "A1 a3^-1 S a2");
  CHECK(word_to_string(w) == "a1 a3^-1 s a2");
  CHECK_THROWS_AS(parse_word(fam.table, "a9"), std::invalid_argument);
  CHECK_THROWS_AS(parse_word(fam.table, "a1^2"), std::invalid_argument);
}
