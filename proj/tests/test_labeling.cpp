#include "doctest.h"
#include "test_support.hpp"

#include "rentharmony/errors.hpp"
#include "rentharmony/labeling.hpp"

#include <set>

using namespace rentharmony;

namespace {

LatticePoint lp(std::vector<Coord> x, Coord m) { return LatticePoint(std::move(x), m); }

// Labels every vertex with the smallest index of its support, except for the
// given overrides.
std::map<LatticePoint, int> min_support_table(int n, Coord m, std::map<LatticePoint, int> overrides = {}) {
  std::map<LatticePoint, int> t;
  for (const auto& v : enumerate_lattice_points(n, m)) t[v] = v.support().front();
  for (const auto& [v, l] : overrides) t[v] = l;
  return t;
}

// Independent count: a cell is fully labeled when its vertex labels are exactly 1..n.
int count_fully_labeled(const SpernerLabeling& l) {
  int count = 0;
  for (const auto& c : enumerate_cells(l.n(), l.resolution())) {
    std::set<int> labels;
    for (const auto& v : c.vertices()) labels.insert(l.label(v));
    if (static_cast<int>(labels.size()) == l.n()) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("sperner validation") {
  auto bad = SpernerLabeling::from_table(3, 2, min_support_table(3, 2, {{lp({1, 1, 0}, 2), 3}}));
  auto v = validate_sperner(bad, true);
  REQUIRE(v.size() == 1);
  CHECK(v[0].vertex == lp({1, 1, 0}, 2));
  CHECK(v[0].carrier == std::vector<int>{1, 2});
  CHECK(v[0].label == 3);

  auto good = SpernerLabeling::from_table(3, 2, min_support_table(3, 2, {{lp({1, 1, 0}, 2), 1}}));
  CHECK(validate_sperner(good, true).empty());
  CHECK(good.is_face_preserving());

  auto tiny = SpernerLabeling::from_table(3, 1, min_support_table(3, 1));
  CHECK(validate_sperner(tiny, true).empty());

  SUBCASE("corner-permuted labelings are Sperner but not face-preserving") {
    auto rot = SpernerLabeling::from_oracle(3, 3, [](const LatticePoint& p) { return p.support().front() % 3 + 1; });
    CHECK(validate_sperner(rot, true).empty());
    CHECK_FALSE(rot.is_face_preserving());
    CHECK(count_fully_labeled(rot) % 2 == 1);
  }
  SUBCASE("lazy validation records instead of throwing") {
    auto lazy = SpernerLabeling::from_oracle(3, 2, [](const LatticePoint&) { return 2; }, true);
    CHECK(lazy.label(lp({1, 1, 0}, 2)) == 2);
    CHECK_FALSE(lazy.violations_seen().empty());
  }
  SUBCASE("label range and missing entries") {
    auto out = SpernerLabeling::from_oracle(3, 2, [](const LatticePoint&) { return 4; });
    CHECK_THROWS_AS(out.label(lp({2, 0, 0}, 2)), ConstructionError);
    auto partial = SpernerLabeling::from_table(3, 2, {{lp({2, 0, 0}, 2), 1}});
    CHECK_THROWS_AS(partial.label(lp({0, 2, 0}, 2)), std::out_of_range);
  }
}

TEST_CASE("oracle is queried once per vertex") {
  int calls = 0;
  auto l = SpernerLabeling::from_oracle(3, 4, [&](const LatticePoint& p) {
    ++calls;
    return p.support().back();
  });
  for (int r = 0; r < 3; ++r) {
    for (const auto& v : enumerate_lattice_points(3, 4)) l.label(v);
  }
  CHECK(calls == 15);
  CHECK(l.queries() == 15);
  CHECK(l.snapshot().size() == 15);
}

TEST_CASE("odd number of fully labeled cells") {
  std::uint64_t seed = 1;
  for (Coord m = 1; m <= 8; ++m) {
    for (int trial = 0; trial < 10; ++trial) {
      auto l = random_sperner_labeling(3, m, seed++);
      REQUIRE(validate_sperner(l, true).empty());
      auto cells = enumerate_fully_labeled(l);
      CHECK(static_cast<int>(cells.size()) == count_fully_labeled(l));
      CHECK(cells.size() % 2 == 1);
    }
  }
  for (Coord m = 1; m <= 4; ++m) {
    for (int trial = 0; trial < 10; ++trial) {
      auto l = random_sperner_labeling(4, m, seed++);
      CHECK(enumerate_fully_labeled(l).size() % 2 == 1);
    }
  }
}

TEST_CASE("trapdoor search") {
  SUBCASE("m = 1 ends through the edge {e1, e2}") {
    auto l = SpernerLabeling::from_table(3, 1, min_support_table(3, 1));
    auto r = trapdoor_search(l);
    REQUIRE(r.doors.size() == 2);
    CHECK(r.doors.front() == make_face({lp({1, 0, 0}, 1)}));
    CHECK(r.doors.back() == make_face({lp({1, 0, 0}, 1), lp({0, 1, 0}, 1)}));
  }
  SUBCASE("finds a fully labeled cell and never reuses a door") {
    std::uint64_t seed = 100;
    for (int n = 2; n <= 4; ++n) {
      for (Coord m = 1; m <= (n == 4 ? 4 : 8); ++m) {
        for (int trial = 0; trial < 8; ++trial) {
          auto l = random_sperner_labeling(n, m, seed++);
          auto r = trapdoor_search(l);
          auto all = enumerate_fully_labeled(l);
          CHECK(std::find(all.begin(), all.end(), r.cell) != all.end());
          std::set<GridFace> doors(r.doors.begin(), r.doors.end());
          CHECK(doors.size() == r.doors.size());
        }
      }
    }
  }
  SUBCASE("corner-permuted labeling") {
    auto rot = SpernerLabeling::from_oracle(3, 5, [](const LatticePoint& p) { return p.support().back() % 3 + 1; });
    auto r = trapdoor_search(rot);
    std::set<int> labels;
    for (const auto& v : r.cell.vertices()) labels.insert(rot.label(v));
    CHECK(labels.size() == 3);
  }
}

TEST_CASE("combining two labelings") {
  CHECK(combine_labels(2, 3) == 1);
  CHECK(combine_labels(1, 2) == 3);
  CHECK(combine_labels(3, 1) == 2);
  CHECK(combine_labels(1, 1) == 3);
  CHECK(combine_labels(2, 2) == 1);
  CHECK(combine_labels(3, 3) == 2);

  auto four = random_sperner_labeling(4, 2, 1);
  CHECK_THROWS_AS(combine_pair(four, four), Unsupported);

  // Identical identity labelings merge corner i to i - 1 (cyclic): still distinct.
  auto a = random_sperner_labeling(3, 4, 5);
  auto same = combine_pair(a, a);
  CHECK(same.corner_labels() == std::vector<int>{3, 1, 2});

  // Corner pairs (2,3), (3,1), (1,2) merge to the identity.
  auto shift = [](int k) {
    return [k](const LatticePoint& p) { return (p.support().front() - 1 + k) % 3 + 1; };
  };
  auto l1 = SpernerLabeling::from_oracle(3, 6, shift(1));
  auto l2 = SpernerLabeling::from_oracle(3, 6, shift(2));
  auto merged = combine_pair(l1, l2);
  CHECK(merged.is_face_preserving());
  CHECK(validate_sperner(merged, true).empty());
  auto r = trapdoor_search(merged);
  std::set<int> labels;
  for (const auto& v : r.cell.vertices()) labels.insert(merged.label(v));
  CHECK(labels.size() == 3);

  // Pairs that merge to a repeated corner label are rejected.
  auto c1 = SpernerLabeling::from_oracle(3, 2, [](const LatticePoint& p) { return p.support().front(); });
  auto c2 = SpernerLabeling::from_oracle(3, 2, [](const LatticePoint&) { return 1; });
  CHECK_THROWS_AS(combine_pair(c1, c2), ConstructionError);
}

TEST_CASE("json round trip") {
  auto l = random_sperner_labeling(4, 3, 9);
  auto j = labeling_to_json(l);
  auto back = labeling_from_json(j);
  CHECK(back.n() == 4);
  CHECK(back.resolution() == 3);
  for (const auto& v : enumerate_lattice_points(4, 3)) CHECK(back.label(v) == l.label(v));
  CHECK(labeling_to_json(back) == j);
  j["entries"].push_back(j["entries"][0]);
  CHECK_THROWS_AS(labeling_from_json(j), ConstructionError);
}
