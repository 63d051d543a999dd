#pragma once

#include "rentharmony/labeling.hpp"
#include "rentharmony/pathfollow.hpp"
#include "rentharmony/prefmodels.hpp"

#include <json.hpp>

#include <functional>
#include <mutex>
#include <optional>
#include <vector>

namespace rentharmony {

/// A single-cycle permutation of the rooms deciding the label at each corner:
/// at the corner where room i carries the whole rent, the answer is pi(i).
struct CornerRule {
  std::vector<int> pi;  // pi[i-1] = π(i)

  /// π(i) = i+1 for i < n, π(n) = 1.
  static CornerRule cyclic(int n);
  /// π^k, which is again a single cycle when gcd(k, n) = 1.
  CornerRule power(int k) const;

  int n() const { return static_cast<int>(pi.size()); }
  int operator()(int i) const { return pi[static_cast<std::size_t>(i - 1)]; }
  int inverse(int r) const;
  bool is_single_cycle() const;
};

enum class Strategy { General, N3Trapdoor };

struct HarmonyProblem {
  int n = 0;
  Rational total_rent;  // in cents
  std::vector<OraclePtr> oracles;  // n-1 of them; the secretive roommate has none
  Coord m = 0;                     // 0: twice the rent in cents
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::General;
  /// Recorded oracles are asked at boundary vertices too (and corrected when
  /// they break the free-room rule). Otherwise boundary labels are filled in.
  bool ask_boundary = false;
  Rational tolerance = 1;  // envy tolerance in cents

  Coord resolution() const;
  void validate() const;  // throws ConstructionError
};

/// A boundary answer replaced by the free-room rule.
struct Override {
  int roommate = 0;
  LatticePoint vertex;
  int answer = 0;
  int label = 0;
};

/// Collects overrides from every labeling of one solve.
class OverrideLog {
 public:
  void add(Override o);
  std::vector<Override> entries() const;

 private:
  mutable std::mutex mu_;
  std::vector<Override> entries_;
};

/// Labeling of price-domain vertices by the rooms roommate `roommate` (1-based)
/// picks. Corner e_i gets rule(i). A vertex whose carrier S misses some room
/// may only carry a free room r with rule⁻¹(r) ∈ S; a free answer outside that
/// set is replaced by rule(i) for the least i ∈ S with rule(i) ∉ S. A model
/// answering a non-free room there raises ConditionViolation; a recorded
/// answer is replaced and logged. Interior answers are used verbatim.
SpernerLabeling build_labeling(const OraclePtr& oracle, int roommate, const HarmonyProblem& problem,
                               const CornerRule& rule, OverrideLog* log = nullptr);

/// Label that fills in an unasked boundary vertex, or nullopt in the interior.
std::optional<int> boundary_label(const LatticePoint& v, const CornerRule& rule);

/// The label build_labeling uses instead of `answer` at v, or nullopt when
/// the answer is kept.
std::optional<int> free_room_override(const LatticePoint& v, int answer, const CornerRule& rule);

/// Corner rule of roommate `roommate` (1-based) under the problem's strategy.
CornerRule corner_rule_for(const HarmonyProblem& problem, int roommate);

/// f(e_i) = e_{π(i)} on coordinates: (f x)_{π(i)} = x_i.
LatticePoint rename_point(const LatticePoint& x, const CornerRule& rule);
LatticePoint unrename_point(const LatticePoint& y, const CornerRule& rule);

/// y ↦ l(f⁻¹ y). Turns a labeling with corner labels rule(i) into a
/// face-preserving one.
SpernerLabeling apply_corner_renaming(const SpernerLabeling& l, const CornerRule& rule);
/// Inverse of apply_corner_renaming.
SpernerLabeling undo_corner_renaming(const SpernerLabeling& l, const CornerRule& rule);

struct CounterExample {
  std::vector<int> subset;       // 1-based labeling indices
  std::vector<int> labels_seen;  // fewer than subset.size() + 1
};

/// Every nonempty subset of k labelings shows at least k+1 labels on the
/// cell's vertices; otherwise the first failing subset (by bitmask order).
std::optional<CounterExample> verify_k_subset(const GridCell& cell, const std::vector<SpernerLabeling>& labelings);
std::optional<CounterExample> verify_k_subset(const std::vector<std::vector<int>>& labels_per_labeling);

struct HallResult {
  bool perfect = false;
  std::vector<int> match;         // left index -> right id, when perfect
  std::vector<int> violating;     // left indices W with |N(W)| < |W|
  std::vector<int> neighborhood;  // N(W)
};

/// Perfect matching of left vertices 0..L-1 into right ids `right` by
/// augmenting paths; `adj[i]` lists the right ids acceptable to i.
HallResult hall_matching(const std::vector<std::vector<int>>& adj, const std::vector<int>& right);

struct EnvyEntry {
  int roommate = 0;
  int room = 0;
  std::vector<int> preferred;  // rooms acceptable at the prices
  bool margin_ok = false;
};

struct EnvyReport {
  std::vector<EnvyEntry> entries;
  bool ok() const;
};

/// `assignment[j]` is the room of known roommate j+1; `oracles` in the same order.
EnvyReport check_envy(const std::vector<int>& assignment, const std::vector<OraclePtr>& oracles,
                      const PricePoint& prices, const Rational& tolerance);

struct HarmonySolution {
  Strategy strategy = Strategy::General;
  Coord m = 0;
  GridCell cell;                        // walk coordinates (price coordinates for N3Trapdoor)
  std::vector<LatticePoint> vertices;   // the cell in price coordinates, sorted
  LatticePoint price_vertex;            // vertices.front()
  PricePoint prices;                    // in cents
  std::vector<std::vector<int>> labels; // labels[j][i]: room of roommate j+1 at vertices[i]
  /// assignments[s-1][j]: room of roommate j+1 when the secretive roommate takes room s.
  std::vector<std::vector<int>> assignments;
  std::vector<EnvyReport> envy;         // one per secretive choice
  Rational envy_tolerance;
  WalkTrace trace;
  int attempts = 0;
  std::vector<Override> overrides;
  std::size_t queries = 0;
};

/// Runs the chosen strategy and certifies the result; throws
/// InternalInconsistency if no certified cell is found within 8 attempts.
/// Oracle calls may raise QuerySuspended, which is propagated.
HarmonySolution solve(const HarmonyProblem& problem, const WalkOptions& opt = {});

/// Envy tolerance the grid can guarantee: max(problem tolerance, 2 · rent / m).
Rational effective_tolerance(const HarmonyProblem& problem);

/// `session_oracle(spec, index)` builds oracles for `{type: "session"}` specs;
/// without it such specs are rejected.
using SessionOracleFactory = std::function<OraclePtr(const nlohmann::json& spec, int roommate, const HarmonyProblem&)>;
HarmonyProblem problem_from_json(const nlohmann::json& j, const SessionOracleFactory& session_oracle = nullptr);
nlohmann::json problem_to_json(const HarmonyProblem& p);
nlohmann::json solution_to_json(const HarmonySolution& s);

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

/// Whole cents rounded down, for display.
std::int64_t floor_cents(const Rational& cents);

}  // namespace rentharmony
