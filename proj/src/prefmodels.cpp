#include "rentharmony/prefmodels.hpp"

#include "rentharmony/errors.hpp"

#include <random>

namespace rentharmony {

std::optional<int> lowest_free_room(const PricePoint& prices) {
  for (int j = 0; j < prices.n(); ++j) {
    if (prices[static_cast<std::size_t>(j)] == 0) return j + 1;
  }
  return std::nullopt;
}

QuasiLinearModel::QuasiLinearModel(RVec valuations, std::string name)
    : valuations_(std::move(valuations)), name_(std::move(name)) {
  if (valuations_.size() < 2) throw ConstructionError("quasilinear model needs at least two rooms");
}

int QuasiLinearModel::prefer(const PricePoint& prices) const {
  if (prices.n() != n()) throw ConstructionError("price vector has the wrong number of rooms");
  if (auto free = lowest_free_room(prices)) return *free;
  int best = 1;
  Rational best_u = valuations_[0] - prices[0];
  for (int j = 1; j < n(); ++j) {
    Rational u = valuations_[static_cast<std::size_t>(j)] - prices[static_cast<std::size_t>(j)];
    if (u > best_u) {
      best_u = u;
      best = j + 1;
    }
  }
  return best;
}

bool QuasiLinearModel::acceptable(const PricePoint& prices, int room, const Rational& tolerance) const {
  if (room < 1 || room > n()) return false;
  const auto r = static_cast<std::size_t>(room - 1);
  if (prices[r] <= tolerance) return true;
  Rational best = valuations_[0] - prices[0];
  for (std::size_t j = 1; j < valuations_.size(); ++j) best = std::max(best, Rational(valuations_[j] - prices[j]));
  return valuations_[r] - prices[r] >= best - tolerance;
}

nlohmann::json QuasiLinearModel::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : valuations_) v.push_back(to_string(x));
  return {{"type", "quasilinear"}, {"name", name_}, {"valuations", std::move(v)}};
}

// ---------------------------------------------------------------------------

RecordedOracle::RecordedOracle(int n, int roommate, std::string name, Rational total, Coord resolution)
    : n_(n), roommate_(roommate), name_(std::move(name)), total_(std::move(total)), m_(resolution) {}

LatticePoint RecordedOracle::vertex_of(const PricePoint& prices) const {
  std::vector<Coord> c;
  for (int j = 0; j < prices.n(); ++j) {
    Rational x = prices[static_cast<std::size_t>(j)] * m_ / total_;
    if (denominator(x) != 1) throw ConstructionError("prices are not on the grid of this session");
    c.push_back(static_cast<Coord>(numerator(x)));
  }
  return LatticePoint(std::move(c), m_);
}

int RecordedOracle::prefer(const PricePoint& prices) const {
  auto v = vertex_of(prices);
  if (auto a = answer_at(v)) return *a;
  throw QuerySuspended({PendingQuery{roommate_, std::move(v)}});
}

bool RecordedOracle::acceptable(const PricePoint& prices, int room, const Rational& tolerance) const {
  if (room < 1 || room > n_) return false;
  if (prices[static_cast<std::size_t>(room - 1)] <= tolerance) return true;
  std::lock_guard lock(mu_);
  for (const auto& [v, r] : answers_) {
    if (r != room) continue;
    bool close = true;
    for (int j = 0; j < n_ && close; ++j) {
      Rational d = Rational(v[static_cast<std::size_t>(j)]) * total_ / m_ - prices[static_cast<std::size_t>(j)];
      close = abs(d) <= tolerance;
    }
    if (close) return true;
  }
  return false;
}

nlohmann::json RecordedOracle::to_json() const {
  return {{"type", "session"}, {"roommate", name_}};
}

void RecordedOracle::record(const LatticePoint& v, int room) {
  if (room < 1 || room > n_) throw ConstructionError("room " + std::to_string(room) + " out of range");
  if (v.n() != n_ || v.resolution() != m_) throw ConstructionError("vertex does not belong to this session");
  std::lock_guard lock(mu_);
  if (!answers_.emplace(v, room).second) {
    throw ConstructionError("vertex " + to_string(v) + " was already answered by " + name_);
  }
}

std::optional<int> RecordedOracle::answer_at(const LatticePoint& v) const {
  std::lock_guard lock(mu_);
  auto it = answers_.find(v);
  if (it == answers_.end()) return std::nullopt;
  return it->second;
}

std::map<LatticePoint, int> RecordedOracle::answers() const {
  std::lock_guard lock(mu_);
  return answers_;
}

// ---------------------------------------------------------------------------

OraclePtr oracle_from_json(const nlohmann::json& spec, int n) {
  const auto type = spec.at("type").get<std::string>();
  if (type != "quasilinear") throw ConstructionError("unknown oracle type '" + type + "'");
  RVec v;
  for (const auto& x : spec.at("valuations")) {
    v.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<std::int64_t>()));
  }
  if (static_cast<int>(v.size()) != n) {
    throw ConstructionError("quasilinear oracle has " + std::to_string(v.size()) + " valuations, expected " +
                            std::to_string(n));
  }
  return std::make_shared<QuasiLinearModel>(std::move(v), spec.value("name", std::string("quasilinear")));
}

// ---------------------------------------------------------------------------

ConditionReport validate_conditions(const PreferenceOracle& model, std::int64_t total_cents, int samples,
                                    std::uint64_t seed) {
  const int n = model.n();
  std::mt19937_64 gen(seed);
  ConditionReport rep;
  auto note = [&](std::string s) {
    if (rep.failures.size() < 5) rep.failures.push_back(std::move(s));
  };
  auto render = [](const std::vector<std::int64_t>& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + std::to_string(c[i]);
    return s + ")";
  };

  for (int s = 0; s < samples; ++s) {
    // Random composition of total_cents; sometimes zero out a room.
    std::vector<std::int64_t> cents(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> cuts{0, total_cents};
    for (int i = 0; i + 1 < n; ++i) cuts.push_back(static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(total_cents + 1)));
    std::sort(cuts.begin(), cuts.end());
    for (int i = 0; i < n; ++i) cents[static_cast<std::size_t>(i)] = cuts[static_cast<std::size_t>(i + 1)] - cuts[static_cast<std::size_t>(i)];
    if (s % 3 == 0) {
      const auto z = static_cast<std::size_t>(gen() % static_cast<std::uint64_t>(n));
      const auto to = (z + 1) % static_cast<std::size_t>(n);
      cents[to] += cents[z];
      cents[z] = 0;
    }
    RVec p;
    for (auto c : cents) p.emplace_back(c);
    PricePoint prices(p, Rational(total_cents));
    ++rep.samples;

    int room = 0;
    try {
      room = model.prefer(prices);
    } catch (const Error& e) {
      ++rep.condition1_failures;
      note("no answer at " + render(cents) + ": " + e.what());
      continue;
    }
    if (room < 1 || room > n) {
      ++rep.condition1_failures;
      note("room " + std::to_string(room) + " out of range at " + render(cents));
      continue;
    }
    if (lowest_free_room(prices) && cents[static_cast<std::size_t>(room - 1)] != 0) {
      ++rep.condition2_failures;
      note("chose room " + std::to_string(room) + " although a room is free at " + render(cents));
    }

    // One-cent probe: move a cent between two rooms.
    const auto from = static_cast<std::size_t>(gen() % static_cast<std::uint64_t>(n));
    const auto to = static_cast<std::size_t>(gen() % static_cast<std::uint64_t>(n));
    if (from != to && cents[from] > 0) {
      auto moved = cents;
      --moved[from];
      ++moved[to];
      RVec q;
      for (auto c : moved) q.emplace_back(c);
      try {
        if (model.prefer(PricePoint(q, Rational(total_cents))) != room) ++rep.one_cent_flips;
      } catch (const Error&) {
      }
    }
  }
  return rep;
}

}  // namespace rentharmony
