#pragma once

#include "rentharmony/plmap.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

namespace rentharmony {

/// Targets b'_1..b'_n of the walk. b_k is the barycenter of conv{e_1..e_k}
/// and b'_k = b_k + δ_k with δ_1 = 0. The walk ends in a cell whose image
/// contains b'_n; callers needing b_n itself check the cell afterwards.
struct BarycenterChain {
  std::vector<RVec> points;  // b_k
  std::vector<RVec> deltas;  // δ_k
  Rational epsilon;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(points.size()); }
  /// b'_k for k = 1..n.
  RVec perturbed(int k) const;
};

/// δ_k for k ≥ 2 is supported on the first k coordinates, sums to zero
/// and has ‖δ_k‖∞ < ε/2. The same (n, seed, ε) always gives the same chain.
BarycenterChain make_chain(int n, std::uint64_t seed, const Rational& epsilon);

/// Replaces the final point b_n by `target` (must lie in the open simplex),
/// shrinking δ_n so that b'_n stays inside.
BarycenterChain with_final_target(BarycenterChain chain, RVec target);

Rational default_epsilon(int n);

/// Level k of the walk holds (k-1)-cells of conv{e_1..e_k}.
struct WalkNode {
  int level = 0;
  GridCell cell;
  std::optional<GridFace> entered_through;  // nullopt at the start
};

struct Door {
  GridFace face;
  std::optional<GridCell> to;  // nullopt: the target door of a top cell
};

/// Memo of hit tests, keyed by level and the set of image signatures.
class HitCache {
 public:
  std::optional<bool> find(int level, bool segment, const std::vector<Signature>& key) const;
  void store(int level, bool segment, std::vector<Signature> key, bool value);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::tuple<int, bool, std::vector<Signature>>, bool> entries_;
};

/// Every door of a node, including the one it was entered through:
/// facets whose image meets [b'_{k-1}, b'_k] and, when b'_k lies in the
/// node's image, the door up (or the target door at level n).
std::vector<Door> node_doors(const PLMap& map, const BarycenterChain& chain, const WalkNode& node,
                             HitCache* cache = nullptr);

struct WalkTrace {
  std::vector<WalkNode> nodes;  // may be truncated, see `truncated`
  std::uint64_t steps = 0;
  std::size_t queries_made = 0;
  int reperturbations = 0;
  bool truncated = false;
};

struct WalkOptions {
  std::uint64_t budget = 10'000'000;
  int max_attempts = 8;
  /// Nodes beyond this many are counted but not stored.
  std::size_t trace_limit = 200'000;
};

struct WalkResult {
  GridCell cell;
  WalkTrace trace;
  BarycenterChain chain;  // the chain of the successful attempt
};

/// One walk from m·e_1 along the given chain. Throws DegeneracySignal when a
/// node does not have exactly the expected number of doors, BudgetExceeded
/// after `budget` steps.
WalkResult walk_once(const PLMap& map, const BarycenterChain& chain, const WalkOptions& opt = {},
                     HitCache* cache = nullptr);

/// Walks with make_chain(n, seed + a, ε / 2^a) for attempts a = 0, 1, ...
WalkResult walk_to_barycenter(const PLMap& map, std::uint64_t seed, const Rational& epsilon,
                              const WalkOptions& opt = {});
/// Same, with the final target replaced.
WalkResult walk_to_target(const PLMap& map, const RVec& target, std::uint64_t seed, const Rational& epsilon,
                          const WalkOptions& opt = {});

/// One JSON object per line: level, dim, vertices, entered_through.
void write_trace_jsonl(std::ostream& os, const WalkTrace& trace);
nlohmann::json node_to_json(const WalkNode& node);

}  // namespace rentharmony
