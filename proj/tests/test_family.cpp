#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "arbor/family.hpp"
#include "arbor/perm.hpp"
#include "arbor/words.hpp"

using namespace arbor;

TEST_CASE("family wiring for (3,2), (4,2) and boundary shapes") {
  const GeneratorFamily f32 = build_family({3, 2});
  // a_1 = (a_3, id)s, a_2 = (id, a_1)s, a_3 = (a_2, id)
  CHECK(f32.table->at(1).child0 == 3);
  CHECK(f32.table->at(1).child1 == 0);
  CHECK(f32.table->at(1).swap);
  CHECK(f32.table->at(2).child0 == 0);
  CHECK(f32.table->at(2).child1 == 1);
  CHECK(f32.table->at(2).swap);
  CHECK(f32.table->at(3).child0 == 2);
  CHECK(f32.table->at(3).child1 == 0);
  CHECK_FALSE(f32.table->at(3).swap);

  const GeneratorFamily f42 = build_family({4, 2});
  CHECK(f42.table->at(1).child0 == 4);
  CHECK(f42.table->at(1).swap);
  CHECK(f42.table->at(2).child1 == 1);
  CHECK(f42.table->at(2).swap);
  CHECK(f42.table->at(3).child0 == 2);
  CHECK_FALSE(f42.table->at(3).swap);
  CHECK(f42.table->at(4).child0 == 3);
  CHECK_FALSE(f42.table->at(4).swap);

  // s = r leaves the trailing band empty; the middle band covers 2..r-1
  const GeneratorFamily frr = build_family({5, 5});
  for (int i = 2; i <= 4; ++i) {
    CHECK(frr.table->at(uint32_t(i)).child1 == uint32_t(i - 1));
    CHECK_FALSE(frr.table->at(uint32_t(i)).swap);
  }
  CHECK(frr.table->at(5).child1 == 4);
  CHECK(frr.table->at(5).swap);

  CHECK_THROWS_AS(build_family({2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(build_family({4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_family({4, 5}), std::invalid_argument);
}

TEST_CASE("defining relation holds, and fails on a corrupted table") {
  CHECK(verify_relation(build_family({3, 2}), 10));
  CHECK(verify_relation(build_family({8, 7}), 12));
  CHECK(verify_relation(build_family({7, 7}), 9));

  // flip the swap bit of a_3: the product is no longer the identity
  auto t = std::make_shared<RecursionTable>();
  for (int i = 1; i <= 3; ++i) t->add_state("a" + std::to_string(i));
  t->wire(1, 3, 0, true);
  t->wire(2, 0, 1, true);
  t->wire(3, 2, 0, true);  // corrupted
  t->validate();
  const GeneratorFamily corrupted{{3, 2}, t};
  CHECK_FALSE(verify_relation(corrupted, 2));
}

TEST_CASE("sign table matches the closed form and is r-periodic") {
  for (const PCOrbit orbit : {PCOrbit{3, 2}, PCOrbit{6, 3}, PCOrbit{8, 7}, PCOrbit{5, 5}}) {
    const SignTable table = sign_table(build_family(orbit));  // throws on mismatch
    const int r = orbit.r;
    for (int i = 1; i <= r; ++i) {
      int negatives = 0;
      for (int n = 1; n <= r; ++n)
        if (table.entry(i, n) == -1) ++negatives;
      const bool coincide = ((i - (i + 1 - orbit.s)) % r) == 0;
      CHECK(negatives == (coincide ? 1 : 2));
    }
  }
  // row 3 of (3,2): -1 exactly at n in {2, 3} within one period
  const SignTable t32 = sign_table(build_family({3, 2}));
  CHECK(t32.entry(3, 1) == 1);
  CHECK(t32.entry(3, 2) == -1);
  CHECK(t32.entry(3, 3) == -1);
}

TEST_CASE("odometer existence by criterion") {
  CHECK_FALSE(odometer_by_criterion({3, 2}).exists);
  CHECK_FALSE(odometer_by_criterion({6, 3}).exists);  // 6/gcd(6,2) = 3 odd
  CHECK_FALSE(odometer_by_criterion({5, 3}).exists);

  const OdometerReport r87 = odometer_by_criterion({8, 7});
  REQUIRE(r87.exists);
  CHECK(*r87.witness == std::vector<int>{1, 5, 2, 6});

  const OdometerReport r42 = odometer_by_criterion({4, 2});
  REQUIRE(r42.exists);
  CHECK(*r42.witness == std::vector<int>{1, 3});
}

TEST_CASE("odometer search agrees with the criterion for all small orbits") {
  for (int r = 3; r <= 10; ++r) {
    for (int s = 2; s <= r; ++s) {
      const PCOrbit orbit{r, s};
      const GeneratorFamily fam = build_family(orbit);
      const OdometerReport by_search = odometer_by_search(fam);
      const OdometerReport by_criterion = odometer_by_criterion(orbit);
      CHECK_MESSAGE(by_search.exists == by_criterion.exists, "r=", r, " s=", s);
      if (by_criterion.exists) {
        // both witnesses have all-(-1) sign vectors over one period
        for (const auto& witness : {*by_search.witness, *by_criterion.witness})
          CHECK(sign_vector(fam.word(witness), r).all_negative());
      }
    }
  }
}

TEST_CASE("search returns the lexicographically smallest witness") {
  const OdometerReport found = odometer_by_search(build_family({8, 7}));
  REQUIRE(found.exists);
  CHECK(*found.witness == std::vector<int>{1, 2, 5, 6});

  const OdometerReport none = odometer_by_search(build_family({3, 2}));
  CHECK_FALSE(none.exists);
  CHECK_FALSE(none.witness.has_value());
}

TEST_CASE("witness certification as a full cycle") {
  const GeneratorFamily f87 = build_family({8, 7});
  CHECK(certify_odometer(f87, {1, 5, 2, 6}, 12));
  const GeneratorFamily f42 = build_family({4, 2});
  CHECK(certify_odometer(f42, {1, 3}, 12));
  const GeneratorFamily f32 = build_family({3, 2});
  CHECK_FALSE(certify_odometer(f32, {1}, 2));  // a_1 on level 2 is two 2-cycles
}

TEST_CASE("every witness from either method certifies through level 12") {
  for (int r = 3; r <= 10; ++r) {
    for (int s = 2; s <= r; ++s) {
      const GeneratorFamily fam = build_family({r, s});
      const OdometerReport a = odometer_by_criterion({r, s});
      const OdometerReport b = odometer_by_search(fam);
      if (a.exists) CHECK(certify_odometer(fam, *a.witness, 12));
      if (b.exists) CHECK(certify_odometer(fam, *b.witness, 12));
    }
  }
}

TEST_CASE("doubling identities behind the diagonal embedding") {
  // a_i (a_s a_i a_s^-1) = (a_{i-1}, a_{i-1}) for 1 < i < s, and
  // a_j (a_1 a_j a_1^-1) = (a_{j-1}, a_{j-1}) for s < j <= r.
  for (const PCOrbit orbit : {PCOrbit{5, 4}, PCOrbit{6, 3}, PCOrbit{4, 2}}) {
    const GeneratorFamily fam = build_family(orbit);
    const auto doubled = [&](int i, int conj, int n) {
      const TreeWord ai = fam.generator(i);
      const TreeWord c = fam.generator(conj);
      const TreeWord w = concat(ai, concat(c, concat(ai, inverse(c))));
      const LevelPerm half = restrict_word(fam.generator(i - 1), n - 1);
      return restrict_word(w, n) == compose_parts(false, half, half);
    };
    for (int n : {1, 3, 6}) {
      for (int i = 2; i <= orbit.s - 1; ++i) CHECK(doubled(i, orbit.s, n));
      for (int j = orbit.s + 1; j <= orbit.r; ++j) CHECK(doubled(j, 1, n));
    }
  }
}

TEST_CASE("search refuses unreasonably large orbits") {
  PCOrbit big{21, 2};
  CHECK_THROWS_AS(odometer_by_search(build_family(big)), resource_error);
}
