#include "doctest.h"
#include "test_support.hpp"

#include "rentharmony/errors.hpp"
#include "rentharmony/plmap.hpp"
#include "rentharmony/suspend.hpp"

using namespace rentharmony;

namespace {

LatticePoint lp(std::vector<Coord> x, Coord m) { return LatticePoint(std::move(x), m); }

SpernerLabeling constant_on_interior(int n, Coord m, int interior_label, std::map<LatticePoint, int> fixed = {}) {
  return SpernerLabeling::from_oracle(n, m, [=](const LatticePoint& v) {
    if (auto it = fixed.find(v); it != fixed.end()) return it->second;
    auto s = v.support();
    if (static_cast<int>(s.size()) == n) return interior_label;
    return s.front();
  });
}

RVec third(std::vector<long> num, long den) {
  RVec out;
  for (long x : num) out.emplace_back(x, den);
  return out;
}

// Random point on the facet of `cell` opposite vertex k (rational, in m·Δ).
RVec random_facet_point(const GridCell& cell, int k, std::mt19937_64& g) {
  auto f = cell.facet_vertices(k);
  RVec w;
  Rational total = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    w.emplace_back(static_cast<long>(g() % 7 + 1));
    total += w.back();
  }
  RVec x(static_cast<std::size_t>(f[0].n()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (int j = 0; j < f[0].n(); ++j) x[static_cast<std::size_t>(j)] += w[i] / total * Rational(f[i][j]);
  }
  return x;
}

}  // namespace

TEST_CASE("vertex images") {
  auto l1 = SpernerLabeling::from_oracle(3, 2, [](const LatticePoint& v) { return v.support().front(); });
  auto l2 = SpernerLabeling::from_oracle(3, 2, [](const LatticePoint& v) { return v.support().back(); });
  auto map = PLMap::average({l1, l2});
  auto v = lp({1, 0, 1}, 2);
  CHECK(l1.label(v) == 1);
  CHECK(l2.label(v) == 3);
  CHECK(vertex_image(map, v) == third({1, 0, 1}, 2));

  CHECK(vertex_image(PLMap::single(l1), lp({0, 1, 1}, 2)) == RVec{0, 1, 0});

  PLMap scaled({PLMapPart{l1, Rational(3)}, PLMapPart{l1, Rational(2)}}, Rational(5));
  CHECK(vertex_image(scaled, lp({0, 2, 0}, 2)) == RVec{0, 5, 0});

  CHECK_THROWS_AS(PLMap({PLMapPart{l1, Rational(1, 2)}}, Rational(1)), ConstructionError);
  auto other = SpernerLabeling::from_oracle(3, 3, [](const LatticePoint& v) { return v.support().front(); });
  CHECK_THROWS_AS(PLMap::average({l1, other}), ConstructionError);
}

TEST_CASE("evaluation inside a cell") {
  // Single cell at m = 1 with labels 1, 2, 3.
  auto l = SpernerLabeling::from_oracle(3, 1, [](const LatticePoint& v) { return v.support().front(); });
  auto map = PLMap::single(l);
  auto b = third({1, 1, 1}, 3);
  CHECK(evaluate(map, b) == b);

  // Labels 1, 1, 2 on the cell with vertices (2,0,0), (1,1,0), (1,0,1) at m = 2.
  auto l112 = SpernerLabeling::from_table(3, 2,
                                          {{lp({2, 0, 0}, 2), 1},
                                           {lp({1, 1, 0}, 2), 2},
                                           {lp({1, 0, 1}, 2), 1},
                                           {lp({0, 2, 0}, 2), 2},
                                           {lp({0, 1, 1}, 2), 2},
                                           {lp({0, 0, 2}, 2), 3}});
  RVec center = third({4, 1, 1}, 6);  // barycenter of that cell, scaled to Δ
  CHECK(evaluate(PLMap::single(l112), center) == third({2, 1, 0}, 3));

  for (const auto& v : enumerate_lattice_points(3, 2)) {
    RVec x;
    for (int j = 0; j < 3; ++j) x.emplace_back(v[j], 2);
    CHECK(evaluate(PLMap::single(l112), x) == vertex_image(PLMap::single(l112), v));
  }
}

TEST_CASE("evaluation is continuous across shared facets and sums to the scale") {
  auto g = rh_test::rng(11);
  std::uint64_t seed = 1;
  for (int n = 2; n <= 4; ++n) {
    for (Coord m = 1; m <= 6; ++m) {
      auto map = PLMap::average(
          {random_sperner_labeling(n, m, seed), random_sperner_labeling(n, m, seed + 1)});
      seed += 2;
      auto cells = enumerate_cells(n, m);
      for (std::size_t c = 0; c < cells.size(); c += 1 + cells.size() / 12) {
        for (int k = 0; k <= cells[c].dim(); ++k) {
          auto nb = cells[c].neighbor_through_facet(k);
          if (!nb) continue;
          RVec x = random_facet_point(cells[c], k, g);
          for (auto& v : x) v /= m;
          auto y1 = evaluate_in_cell(map, cells[c], x);
          auto y2 = evaluate_in_cell(map, *nb, x);
          REQUIRE(y1.has_value());
          REQUIRE(y2.has_value());
          CHECK(*y1 == *y2);
          CHECK(sum(*y1) == 1);
        }
      }
    }
  }
}

TEST_CASE("faces are preserved setwise") {
  std::uint64_t seed = 3;
  for (int n = 2; n <= 5; ++n) {
    const Coord m = 3;
    auto map = PLMap::average({random_sperner_labeling(n, m, seed), random_sperner_labeling(n, m, seed + 1),
                               random_sperner_labeling(n, m, seed + 2)});
    seed += 3;
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> carrier;
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) carrier.push_back(i + 1);
      }
      CHECK(face_setwise_check(map, carrier));
      CHECK(face_setwise_check(PLMap::single(map.parts()[0].labeling), carrier));
    }
  }
  auto bad = constant_on_interior(3, 2, 1, {{lp({1, 1, 0}, 2), 3}});
  CHECK_FALSE(face_setwise_check(PLMap::single(bad), {1, 2}));
  CHECK(face_setwise_check(PLMap::single(bad), {1, 3}));
}

TEST_CASE("segment against image") {
  const std::vector<RVec> corners = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Segment inside{third({1, 1, 1}, 3), third({1, 1, 0}, 2)};
  CHECK(segment_hits_image(corners, inside).kind == HitKind::Hit);

  const std::vector<RVec> edge = {{1, 0, 0}, {0, 1, 0}, {Rational(1, 2), Rational(1, 2), 0}};
  Segment above{third({1, 1, 2}, 4), third({2, 1, 1}, 4)};
  CHECK(segment_hits_image(edge, above).kind == HitKind::NoHit);

  // Touching only at an endpoint.
  Segment up{third({1, 1, 0}, 2), third({1, 1, 1}, 3)};
  auto touch = segment_hits_image({{1, 0, 0}, {0, 1, 0}}, up);
  CHECK(touch.kind == HitKind::Degenerate);
  CHECK(touch.t == 0);
  // Crossing the edge transversally.
  Segment across{{Rational(1, 2), Rational(-1, 4), Rational(3, 4)}, {Rational(1, 2), Rational(3, 4), Rational(-1, 4)}};
  CHECK(segment_hits_image({{1, 0, 0}, {0, 0, 1}}, across).kind == HitKind::Hit);
  // A repeated image point is forced to share weight, not to vanish.
  CHECK(segment_hits_image({{1, 0, 0}, {1, 0, 0}, {0, 0, 1}}, across).kind == HitKind::Hit);
  // Passing through an image vertex.
  Segment through{{1, Rational(-1, 2), Rational(1, 2)}, {1, Rational(1, 2), Rational(-1, 2)}};
  CHECK(segment_hits_image({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, through).kind == HitKind::Degenerate);

  auto hit = segment_hits_image(corners, inside);
  RVec p(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t c = 0; c < 3; ++c) p[c] += hit.mu[i] * corners[i][c];
  }
  for (std::size_t c = 0; c < 3; ++c) CHECK(p[c] == inside.a[c] + hit.t * (inside.b[c] - inside.a[c]));
}

TEST_CASE("segment test agrees with brute force and is orientation symmetric") {
  auto g = rh_test::rng(2024);
  auto rnd_point = [&](int n, int den) {
    RVec x(static_cast<std::size_t>(n));
    int left = den;
    for (int i = 0; i + 1 < n; ++i) {
      int v = rh_test::uniform_int(g, 0, left);
      x[static_cast<std::size_t>(i)] = Rational(v, den);
      left -= v;
    }
    x[static_cast<std::size_t>(n - 1)] = Rational(left, den);
    return x;
  };
  int hits = 0, misses = 0, degenerate = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = rh_test::uniform_int(g, 2, 4);
    const int k = rh_test::uniform_int(g, 1, n);
    // Coarse denominators for image points give plenty of coincidences.
    std::vector<RVec> pts;
    for (int i = 0; i < k; ++i) pts.push_back(rnd_point(n, rh_test::uniform_int(g, 1, 3)));
    Segment s{rnd_point(n, rh_test::uniform_int(g, 1, 6)), rnd_point(n, rh_test::uniform_int(g, 1, 6))};
    auto r = segment_hits_image(pts, s);
    const bool expected = rh_test::brute_force_segment_hit(pts, s.a, s.b);
    CHECK(r.intersects() == expected);
    CHECK(segment_intersects(pts, s) == expected);
    auto rev = segment_hits_image(pts, Segment{s.b, s.a});
    CHECK(rev.kind == r.kind);
    hits += r.kind == HitKind::Hit;
    misses += r.kind == HitKind::NoHit;
    degenerate += r.kind == HitKind::Degenerate;
  }
  CHECK(hits > 0);
  CHECK(misses > 0);
  CHECK(degenerate > 0);
}

TEST_CASE("batched labeling reports every pending question") {
  auto asked = std::make_shared<std::vector<LatticePoint>>();
  auto lazy = [asked](int who) {
    return SpernerLabeling::from_oracle(3, 4, [asked, who](const LatticePoint& v) -> int {
      if (v.is_corner()) return v.support().front();
      asked->push_back(v);
      throw QuerySuspended({PendingQuery{who, v}});
    });
  };
  auto map = PLMap::average({lazy(1), lazy(2)});
  GridCell cell(3, 4, {1, 2}, {1, 2});
  try {
    map.signatures(cell.vertices());
    FAIL("expected suspension");
  } catch (const QuerySuspended& e) {
    std::size_t non_corner = 0;
    for (const auto& v : cell.vertices()) non_corner += v.is_corner() ? 0 : 1;
    CHECK(e.pending().size() == 2 * non_corner);
  }
}
