#include "rentharmony/harmony.hpp"

#include "rentharmony/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace rentharmony {

CornerRule CornerRule::cyclic(int n) {
  CornerRule r;
  for (int i = 1; i <= n; ++i) r.pi.push_back(i % n + 1);
  return r;
}

CornerRule CornerRule::power(int k) const {
  CornerRule r;
  for (int i = 1; i <= n(); ++i) {
    int j = i;
    for (int t = 0; t < k; ++t) j = (*this)(j);
    r.pi.push_back(j);
  }
  return r;
}

int CornerRule::inverse(int r) const {
  for (int i = 1; i <= n(); ++i) {
    if ((*this)(i) == r) return i;
  }
  throw InternalInconsistency("corner rule is not a permutation");
}

bool CornerRule::is_single_cycle() const {
  std::vector<bool> seen(static_cast<std::size_t>(n()) + 1, false);
  int j = 1, len = 0;
  while (!seen[static_cast<std::size_t>(j)]) {
    seen[static_cast<std::size_t>(j)] = true;
    j = (*this)(j);
    ++len;
  }
  return len == n() && j == 1;
}

Coord HarmonyProblem::resolution() const {
  if (m > 0) return m;
  if (denominator(total_rent) != 1) throw ConstructionError("total rent must be a whole number of cents");
  return resolution_for_one_cent(static_cast<Coord>(numerator(total_rent)));
}

void HarmonyProblem::validate() const {
  if (n < 2) throw ConstructionError("a problem needs at least two rooms");
  if (total_rent <= 0) throw ConstructionError("total rent must be positive");
  if (static_cast<int>(oracles.size()) != n - 1) {
    throw ConstructionError("expected " + std::to_string(n - 1) + " preference oracles, got " +
                            std::to_string(oracles.size()));
  }
  for (const auto& o : oracles) {
    if (!o || o->n() != n) throw ConstructionError("oracle does not match the number of rooms");
  }
  if (m < 0) throw ConstructionError("resolution must be positive");
  if (tolerance < 0) throw ConstructionError("tolerance must be nonnegative");
  if (strategy == Strategy::N3Trapdoor && n != 3) throw Unsupported("the n3-trapdoor strategy needs n = 3");
}

void OverrideLog::add(Override o) {
  std::lock_guard lock(mu_);
  entries_.push_back(std::move(o));
}

std::vector<Override> OverrideLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

// ---------------------------------------------------------------------------

std::optional<int> boundary_label(const LatticePoint& v, const CornerRule& rule) {
  auto s = v.support();
  if (static_cast<int>(s.size()) == v.n()) return std::nullopt;
  std::vector<bool> in(static_cast<std::size_t>(v.n()) + 1, false);
  for (int i : s) in[static_cast<std::size_t>(i)] = true;
  for (int i : s) {
    if (!in[static_cast<std::size_t>(rule(i))]) return rule(i);
  }
  throw InternalInconsistency("corner rule has a proper invariant set");
}

std::optional<int> free_room_override(const LatticePoint& v, int answer, const CornerRule& rule) {
  if (v.is_corner()) {
    const int forced = rule(v.support().front());
    return answer == forced ? std::nullopt : std::optional<int>(forced);
  }
  const auto fill = boundary_label(v, rule);
  if (!fill) return std::nullopt;
  const auto s = v.support();
  const bool is_free = !std::binary_search(s.begin(), s.end(), answer);
  if (is_free && std::binary_search(s.begin(), s.end(), rule.inverse(answer))) return std::nullopt;
  return fill;
}

CornerRule corner_rule_for(const HarmonyProblem& problem, int roommate) {
  const auto rule = CornerRule::cyclic(problem.n);
  if (problem.strategy == Strategy::N3Trapdoor && roommate == 2) return rule.power(2);
  return rule;
}

SpernerLabeling build_labeling(const OraclePtr& oracle, int roommate, const HarmonyProblem& problem,
                               const CornerRule& rule, OverrideLog* log) {
  const int n = problem.n;
  const Rational total = problem.total_rent;
  const bool ask_boundary = problem.ask_boundary;
  return SpernerLabeling::from_oracle(n, problem.resolution(), [=](const LatticePoint& v) -> int {
    if (v.is_corner()) return rule(v.support().front());
    const auto fill = boundary_label(v, rule);
    if (fill && oracle->is_recorded() && !ask_boundary) return *fill;

    const int r = oracle->prefer(lattice_to_price(v, total));
    if (r < 1 || r > n) {
      throw ConditionViolation("roommate " + std::to_string(roommate) + " answered room " + std::to_string(r) +
                               " at vertex " + to_string(v));
    }
    if (!fill) return r;
    if (!free_room_override(v, r, rule)) return r;
    const auto s = v.support();
    if (std::binary_search(s.begin(), s.end(), r) && !oracle->is_recorded()) {
      throw ConditionViolation("roommate " + std::to_string(roommate) + " prefers room " + std::to_string(r) +
                               " at vertex " + to_string(v) + " although a room is free");
    }
    if (log) log->add(Override{roommate, v, r, *fill});
    return *fill;
  });
}

LatticePoint rename_point(const LatticePoint& x, const CornerRule& rule) {
  std::vector<Coord> y(static_cast<std::size_t>(x.n()));
  for (int i = 1; i <= x.n(); ++i) y[static_cast<std::size_t>(rule(i) - 1)] = x[static_cast<std::size_t>(i - 1)];
  return LatticePoint(std::move(y), x.resolution());
}

LatticePoint unrename_point(const LatticePoint& y, const CornerRule& rule) {
  std::vector<Coord> x(static_cast<std::size_t>(y.n()));
  for (int i = 1; i <= y.n(); ++i) x[static_cast<std::size_t>(i - 1)] = y[static_cast<std::size_t>(rule(i) - 1)];
  return LatticePoint(std::move(x), y.resolution());
}

SpernerLabeling apply_corner_renaming(const SpernerLabeling& l, const CornerRule& rule) {
  return SpernerLabeling::from_oracle(l.n(), l.resolution(),
                                      [l, rule](const LatticePoint& y) { return l.label(unrename_point(y, rule)); });
}

SpernerLabeling undo_corner_renaming(const SpernerLabeling& l, const CornerRule& rule) {
  return SpernerLabeling::from_oracle(l.n(), l.resolution(),
                                      [l, rule](const LatticePoint& x) { return l.label(rename_point(x, rule)); });
}

// ---------------------------------------------------------------------------

std::optional<CounterExample> verify_k_subset(const std::vector<std::vector<int>>& labels) {
  const std::size_t count = labels.size();
  if (count >= 31) throw Unsupported("k-subset check is exhaustive and limited to 30 labelings");
  for (std::uint32_t mask = 1; mask < (1u << count); ++mask) {
    std::set<int> seen;
    std::vector<int> subset;
    for (std::size_t j = 0; j < count; ++j) {
      if (!(mask & (1u << j))) continue;
      subset.push_back(static_cast<int>(j) + 1);
      seen.insert(labels[j].begin(), labels[j].end());
    }
    if (seen.size() < subset.size() + 1) {
      return CounterExample{std::move(subset), std::vector<int>(seen.begin(), seen.end())};
    }
  }
  return std::nullopt;
}

std::optional<CounterExample> verify_k_subset(const GridCell& cell, const std::vector<SpernerLabeling>& labelings) {
  const auto vs = cell.vertices();
  std::vector<std::vector<int>> labels;
  for (const auto& l : labelings) {
    std::vector<int> row;
    for (const auto& v : vs) row.push_back(l.label(v));
    labels.push_back(std::move(row));
  }
  return verify_k_subset(labels);
}

HallResult hall_matching(const std::vector<std::vector<int>>& adj, const std::vector<int>& right) {
  const std::size_t left = adj.size();
  std::map<int, std::size_t> rindex;
  for (std::size_t r = 0; r < right.size(); ++r) rindex[right[r]] = r;
  std::vector<std::vector<std::size_t>> g(left);
  for (std::size_t i = 0; i < left; ++i) {
    for (int r : adj[i]) {
      if (auto it = rindex.find(r); it != rindex.end()) g[i].push_back(it->second);
    }
    std::sort(g[i].begin(), g[i].end());
    g[i].erase(std::unique(g[i].begin(), g[i].end()), g[i].end());
  }
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match_left(left, kNone), match_right(right.size(), kNone);
  std::vector<bool> seen;
  auto augment = [&](auto&& self, std::size_t u) -> bool {
    for (std::size_t r : g[u]) {
      if (seen[r]) continue;
      seen[r] = true;
      if (match_right[r] == kNone || self(self, match_right[r])) {
        match_right[r] = u;
        match_left[u] = r;
        return true;
      }
    }
    return false;
  };

  HallResult res;
  for (std::size_t u = 0; u < left; ++u) {
    seen.assign(right.size(), false);
    if (augment(augment, u)) continue;
    // König witness: left vertices reachable from u by alternating paths.
    std::vector<bool> in_w(left, false), in_n(right.size(), false);
    std::vector<std::size_t> stack{u};
    in_w[u] = true;
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t r : g[x]) {
        if (in_n[r]) continue;
        in_n[r] = true;
        std::size_t y = match_right[r];
        if (y != kNone && !in_w[y]) {
          in_w[y] = true;
          stack.push_back(y);
        }
      }
    }
    for (std::size_t i = 0; i < left; ++i) {
      if (in_w[i]) res.violating.push_back(static_cast<int>(i));
    }
    for (std::size_t r = 0; r < right.size(); ++r) {
      if (in_n[r]) res.neighborhood.push_back(right[r]);
    }
    return res;
  }
  res.perfect = left <= right.size();
  for (std::size_t i = 0; i < left; ++i) res.match.push_back(right[match_left[i]]);
  return res;
}

bool EnvyReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const EnvyEntry& e) { return e.margin_ok; });
}

EnvyReport check_envy(const std::vector<int>& assignment, const std::vector<OraclePtr>& oracles,
                      const PricePoint& prices, const Rational& tolerance) {
  EnvyReport rep;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    EnvyEntry e;
    e.roommate = static_cast<int>(j) + 1;
    e.room = assignment[j];
    for (int r = 1; r <= prices.n(); ++r) {
      if (oracles[j]->acceptable(prices, r, tolerance)) e.preferred.push_back(r);
    }
    e.margin_ok = std::find(e.preferred.begin(), e.preferred.end(), e.room) != e.preferred.end();
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

Rational effective_tolerance(const HarmonyProblem& problem) {
  return std::max(problem.tolerance, Rational(2 * problem.total_rent / problem.resolution()));
}

// ---------------------------------------------------------------------------

namespace {

// Fills in everything downstream of a certified cell. `to_price` maps the
// cell's vertices to price coordinates; `raw` are the price-domain labelings.
HarmonySolution finish(const HarmonyProblem& problem, const GridCell& cell,
                       const std::function<LatticePoint(const LatticePoint&)>& to_price,
                       const std::vector<SpernerLabeling>& raw) {
  const int n = problem.n;
  HarmonySolution sol;
  sol.strategy = problem.strategy;
  sol.m = problem.resolution();
  sol.cell = cell;
  for (const auto& v : cell.vertices()) sol.vertices.push_back(to_price(v));
  std::sort(sol.vertices.begin(), sol.vertices.end());
  sol.price_vertex = sol.vertices.front();
  sol.prices = lattice_to_price(sol.price_vertex, problem.total_rent);
  for (const auto& l : raw) {
    std::vector<int> row;
    for (const auto& v : sol.vertices) row.push_back(l.label(v));
    sol.labels.push_back(std::move(row));
  }
  sol.envy_tolerance = effective_tolerance(problem);
  for (int s = 1; s <= n; ++s) {
    std::vector<int> rooms;
    for (int r = 1; r <= n; ++r) {
      if (r != s) rooms.push_back(r);
    }
    auto h = hall_matching(sol.labels, rooms);
    if (!h.perfect) {
      throw InternalInconsistency("certified cell admits no matching when room " + std::to_string(s) +
                                  " is taken by the secretive roommate");
    }
    sol.envy.push_back(check_envy(h.match, problem.oracles, sol.prices, sol.envy_tolerance));
    sol.assignments.push_back(std::move(h.match));
  }
  for (const auto& l : raw) sol.queries += l.queries();
  return sol;
}

HarmonySolution solve_general(const HarmonyProblem& problem, const WalkOptions& opt) {
  const int n = problem.n;
  const auto rule = CornerRule::cyclic(n);
  auto log = std::make_shared<OverrideLog>();
  std::vector<SpernerLabeling> raw, renamed;
  for (int j = 0; j + 1 < n; ++j) {
    raw.push_back(build_labeling(problem.oracles[static_cast<std::size_t>(j)], j + 1, problem, rule, log.get()));
    renamed.push_back(apply_corner_renaming(raw.back(), rule));
  }
  const auto map = PLMap::average(renamed);
  const RVec barycenter(static_cast<std::size_t>(n), Rational(1, n));

  auto certified = [&](const GridCell& c) {
    return convex_witness(image_simplex(map, c).points, barycenter).has_value() && !verify_k_subset(c, renamed);
  };

  const Rational eps = default_epsilon(n);
  const int attempts = std::max(1, opt.max_attempts);
  std::string last_problem = "no attempt made";
  for (int a = 0; a < attempts; ++a) {
    const auto chain = make_chain(n, problem.seed + static_cast<std::uint64_t>(a), eps / Rational(BigInt(1) << a));
    WalkResult w;
    try {
      w = walk_once(map, chain, opt);
    } catch (const DegeneracySignal& e) {
      last_problem = e.what();
      continue;
    }
    std::vector<GridCell> candidates{w.cell};
    for (int k = 0; k <= w.cell.dim(); ++k) {
      if (auto nb = w.cell.neighbor_through_facet(k)) candidates.push_back(*nb);
    }
    for (const auto& c : candidates) {
      if (!certified(c)) continue;
      auto sol = finish(problem, c, [&](const LatticePoint& y) { return unrename_point(y, rule); }, raw);
      sol.trace = std::move(w.trace);
      sol.trace.reperturbations = a;
      sol.trace.queries_made = map.queries();
      sol.attempts = a + 1;
      sol.overrides = log->entries();
      return sol;
    }
    last_problem = "cell " + to_string(w.cell) + " and its neighbors fail the exact certificate";
  }
  throw InternalInconsistency("no certified cell after " + std::to_string(attempts) + " attempts: " + last_problem);
}

HarmonySolution solve_n3(const HarmonyProblem& problem) {
  auto log = std::make_shared<OverrideLog>();
  std::vector<SpernerLabeling> raw{build_labeling(problem.oracles[0], 1, problem, corner_rule_for(problem, 1), log.get()),
                                   build_labeling(problem.oracles[1], 2, problem, corner_rule_for(problem, 2), log.get())};
  const auto merged = combine_pair(raw[0], raw[1]);
  const auto tr = trapdoor_search(merged);
  if (auto bad = verify_k_subset(tr.cell, raw)) {
    throw InternalInconsistency("trapdoor cell " + to_string(tr.cell) + " fails the k-subset certificate");
  }
  auto sol = finish(problem, tr.cell, [](const LatticePoint& x) { return x; }, raw);
  sol.trace.steps = tr.doors.size();
  sol.trace.queries_made = sol.queries;
  sol.attempts = 1;
  sol.overrides = log->entries();
  return sol;
}

}  // namespace

HarmonySolution solve(const HarmonyProblem& problem, const WalkOptions& opt) {
  problem.validate();
  return problem.strategy == Strategy::N3Trapdoor ? solve_n3(problem) : solve_general(problem, opt);
}

// ---------------------------------------------------------------------------

std::string to_string(Strategy s) { return s == Strategy::General ? "general" : "n3-trapdoor"; }

Strategy strategy_from_string(const std::string& s) {
  if (s == "general") return Strategy::General;
  if (s == "n3-trapdoor") return Strategy::N3Trapdoor;
  throw ConstructionError("unknown strategy '" + s + "'");
}

std::int64_t floor_cents(const Rational& cents) { return static_cast<std::int64_t>(floor_of(cents)); }

namespace {

Rational rational_field(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw ConstructionError("expected an integer or a rational string");
}

}  // namespace

HarmonyProblem problem_from_json(const nlohmann::json& j, const SessionOracleFactory& session_oracle) {
  if (!j.is_object()) throw ConstructionError("problem must be a JSON object");
  HarmonyProblem p;
  try {
    p.n = j.at("n").get<int>();
    p.total_rent = rational_field(j.at("total_rent_cents"));
    p.m = j.value("m", Coord{0});
    p.seed = j.value("seed", std::uint64_t{0});
    p.strategy = strategy_from_string(j.value("strategy", std::string("general")));
    p.ask_boundary = j.value("ask_boundary", false);
    if (j.contains("tolerance_cents")) p.tolerance = rational_field(j.at("tolerance_cents"));
    const auto& specs = j.at("oracles");
    if (!specs.is_array()) throw ConstructionError("oracles must be an array");
    int index = 0;
    for (const auto& spec : specs) {
      ++index;
      if (spec.is_string() && spec.get<std::string>() == "session") {
        if (!session_oracle) throw Unsupported("session oracles need the session service");
        p.oracles.push_back(session_oracle(nlohmann::json{{"type", "session"}}, index, p));
      } else if (spec.value("type", std::string()) == "session") {
        if (!session_oracle) throw Unsupported("session oracles need the session service");
        p.oracles.push_back(session_oracle(spec, index, p));
      } else {
        p.oracles.push_back(oracle_from_json(spec, p.n));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConstructionError(std::string("malformed problem: ") + e.what());
  }
  p.validate();
  return p;
}

nlohmann::json problem_to_json(const HarmonyProblem& p) {
  nlohmann::json oracles = nlohmann::json::array();
  for (const auto& o : p.oracles) oracles.push_back(o->to_json());
  return {{"n", p.n},
          {"total_rent_cents", to_string(p.total_rent)},
          {"oracles", std::move(oracles)},
          {"m", p.resolution()},
          {"seed", p.seed},
          {"strategy", to_string(p.strategy)},
          {"ask_boundary", p.ask_boundary},
          {"tolerance_cents", to_string(p.tolerance)}};
}

nlohmann::json solution_to_json(const HarmonySolution& s) {
  nlohmann::json prices = nlohmann::json::array(), exact = nlohmann::json::array();
  for (const auto& c : s.prices.coords()) {
    prices.push_back(floor_cents(c));
    exact.push_back(to_string(c));
  }
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : s.vertices) vertices.push_back(v.coords());
  nlohmann::json assignments = nlohmann::json::array();
  bool envy_ok = true;
  for (std::size_t i = 0; i < s.assignments.size(); ++i) {
    nlohmann::json envy = nlohmann::json::array();
    for (const auto& e : s.envy[i].entries) {
      envy.push_back({{"roommate", e.roommate}, {"room", e.room}, {"acceptable", e.preferred}, {"ok", e.margin_ok}});
    }
    envy_ok = envy_ok && s.envy[i].ok();
    assignments.push_back(
        {{"secretive_room", static_cast<int>(i) + 1}, {"rooms", s.assignments[i]}, {"envy", std::move(envy)}});
  }
  nlohmann::json overrides = nlohmann::json::array();
  for (const auto& o : s.overrides) {
    overrides.push_back({{"roommate", o.roommate}, {"vertex", o.vertex.coords()}, {"answer", o.answer}, {"label", o.label}});
  }
  return {{"strategy", to_string(s.strategy)},
          {"m", s.m},
          {"prices_cents", std::move(prices)},
          {"prices_exact", std::move(exact)},
          {"price_vertex", s.price_vertex.coords()},
          {"cell_vertices", std::move(vertices)},
          {"labels", s.labels},
          {"assignments", std::move(assignments)},
          {"envy_ok", envy_ok},
          {"envy_tolerance_cents", to_string(s.envy_tolerance)},
          {"overrides", std::move(overrides)},
          {"trace", {{"steps", s.trace.steps},
                     {"queries", s.trace.queries_made},
                     {"reperturbations", s.trace.reperturbations},
                     {"attempts", s.attempts}}}};
}

}  // namespace rentharmony
