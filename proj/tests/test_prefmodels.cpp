#include "doctest.h"
#include "test_support.hpp"

#include "rentharmony/errors.hpp"
#include "rentharmony/prefmodels.hpp"

using namespace rentharmony;

namespace {

PricePoint prices(std::vector<long> cents) {
  RVec p;
  long total = 0;
  for (long c : cents) {
    p.emplace_back(c);
    total += c;
  }
  return PricePoint(p, Rational(total));
}

class AlwaysLast : public PreferenceOracle {
 public:
  explicit AlwaysLast(int n) : n_(n) {}
  int n() const override { return n_; }
  std::string name() const override { return "always-last"; }
  int prefer(const PricePoint&) const override { return n_; }
  bool acceptable(const PricePoint&, int room, const Rational&) const override { return room == n_; }
  nlohmann::json to_json() const override { return {{"type", "always-last"}}; }

 private:
  int n_;
};

}  // namespace

TEST_CASE("quasilinear answers") {
  QuasiLinearModel q({Rational(100), Rational(900), Rational(0)});
  CHECK(q.prefer(prices({0, 500, 500})) == 1);
  CHECK(q.prefer(prices({0, 0, 1000})) == 1);
  CHECK(q.prefer(prices({300, 0, 700})) == 2);

  QuasiLinearModel two({Rational(600), Rational(400)});
  CHECK(two.prefer(prices({500, 500})) == 1);
  CHECK(two.prefer(prices({600, 400})) == 1);  // tie goes to the lower index
  CHECK(two.prefer(prices({601, 399})) == 2);

  CHECK(two.acceptable(prices({600, 400}), 2, Rational(0)));
  CHECK(two.acceptable(prices({501, 499}), 1, Rational(0)));
  CHECK_FALSE(two.acceptable(prices({700, 300}), 1, Rational(0)));
  CHECK(two.acceptable(prices({700, 300}), 1, Rational(200)));
  CHECK(two.acceptable(prices({1000, 0}), 2, Rational(0)));
}

TEST_CASE("free-room rule does not depend on valuations") {
  auto g = rh_test::rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rh_test::uniform_int(g, 2, 5);
    RVec v;
    for (int j = 0; j < n; ++j) v.emplace_back(rh_test::uniform_int(g, 0, 2000));
    QuasiLinearModel q(v);
    std::vector<long> c(static_cast<std::size_t>(n));
    for (auto& x : c) x = rh_test::uniform_int(g, 0, 3) == 0 ? 0 : rh_test::uniform_int(g, 1, 800);
    c[static_cast<std::size_t>(rh_test::uniform_int(g, 0, n - 1))] = 0;
    auto p = prices(c);
    CHECK(q.prefer(p) == *lowest_free_room(p));
  }
}

TEST_CASE("scaling valuations and rent together keeps every answer") {
  auto g = rh_test::rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rh_test::uniform_int(g, 2, 5);
    RVec v, vs;
    const Rational k(rh_test::uniform_int(g, 1, 9), rh_test::uniform_int(g, 1, 9));
    for (int j = 0; j < n; ++j) {
      v.emplace_back(rh_test::uniform_int(g, 0, 1000));
      vs.push_back(v.back() * k);
    }
    RVec p, ps;
    Rational total = 0;
    for (int j = 0; j < n; ++j) {
      p.emplace_back(rh_test::uniform_int(g, 0, 400));
      ps.push_back(p.back() * k);
      total += p.back();
    }
    CHECK(QuasiLinearModel(v).prefer(PricePoint(p, total)) == QuasiLinearModel(vs).prefer(PricePoint(ps, total * k)));
  }
}

TEST_CASE("condition audit") {
  QuasiLinearModel q({Rational(5000), Rational(3000), Rational(2000)});
  auto rep = validate_conditions(q, 10000, 300, 1);
  CHECK(rep.samples == 300);
  CHECK(rep.ok());
  CHECK(rep.one_cent_flips >= 0);

  auto bad = validate_conditions(AlwaysLast(3), 10000, 300, 1);
  CHECK(bad.condition1_failures == 0);
  CHECK(bad.condition2_failures > 0);
  CHECK_FALSE(bad.failures.empty());

  // A model whose answers sit at a utility tie flips under a one-cent move.
  QuasiLinearModel flat({Rational(0), Rational(0)});
  CHECK(validate_conditions(flat, 2, 100, 3).one_cent_flips > 0);
}

TEST_CASE("recorded answers") {
  RecordedOracle r(3, 2, "moe", Rational(3000), 6);
  auto v = LatticePoint({2, 2, 2}, 6);
  auto p = lattice_to_price(v, Rational(3000));
  try {
    r.prefer(p);
    FAIL("expected suspension");
  } catch (const QuerySuspended& e) {
    REQUIRE(e.pending().size() == 1);
    CHECK(e.pending()[0].roommate == 2);
    CHECK(e.pending()[0].vertex == v);
  }
  r.record(v, 3);
  CHECK(r.prefer(p) == 3);
  CHECK_THROWS_AS(r.record(v, 1), ConstructionError);
  CHECK_THROWS_AS(r.record(LatticePoint({6, 0, 0}, 6), 4), ConstructionError);
  CHECK(r.acceptable(p, 3, Rational(0)));
  CHECK_FALSE(r.acceptable(p, 1, Rational(0)));
  // A point within tolerance of an answered vertex.
  PricePoint near({Rational(1001), Rational(999), Rational(1000)}, Rational(3000));
  CHECK(r.acceptable(near, 3, Rational(1)));
  CHECK_FALSE(r.acceptable(near, 3, Rational(1, 2)));
  CHECK(r.answers().size() == 1);
}

TEST_CASE("oracle json") {
  auto o = oracle_from_json({{"type", "quasilinear"}, {"valuations", {600, 400}}}, 2);
  CHECK(o->prefer(prices({500, 500})) == 1);
  auto j = o->to_json();
  CHECK(j["type"] == "quasilinear");
  CHECK(oracle_from_json(j, 2)->prefer(prices({500, 500})) == 1);
  CHECK_THROWS_AS(oracle_from_json({{"type", "quasilinear"}, {"valuations", {1, 2, 3}}}, 2), ConstructionError);
  CHECK_THROWS_AS(oracle_from_json({{"type", "psychic"}}, 2), ConstructionError);
}
