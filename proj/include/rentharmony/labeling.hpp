#pragma once

#include "rentharmony/simplex_core.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rentharmony {

/// Produces the room label (1..n) of a grid vertex. May throw; exceptions are
/// propagated to the caller and nothing is memoized for that vertex.
using LabelOracle = std::function<int(const LatticePoint&)>;

struct SpernerViolation {
  LatticePoint vertex;
  std::vector<int> carrier;  // 1-based support of the vertex
  int label = 0;
  std::string reason;
};

/// A labeling of the grid vertices of m·Δ_{n-1} by rooms 1..n, backed either
/// by a complete table or by a lazily queried oracle with memoization.
///
/// Copies share the same memo. The memo is synchronized, so one labeling can
/// be read from several walks at once.
///
/// Sperner rules (checked, not assumed): the n corners carry pairwise
/// distinct labels, and a vertex in the face spanned by corners S carries the
/// label of one of the corners in S. A labeling is face-preserving when in
/// addition corner m·e_i carries label i.
class SpernerLabeling {
 public:
  static SpernerLabeling from_table(int n, Coord resolution, std::map<LatticePoint, int> table);
  /// With `validate_on_query`, each vertex is checked against the Sperner
  /// rules the first time it is labeled; problems are recorded, not thrown.
  static SpernerLabeling from_oracle(int n, Coord resolution, LabelOracle oracle,
                                     bool validate_on_query = false);

  int n() const;
  Coord resolution() const;

  /// Throws std::out_of_range for a vertex missing from a table, and
  /// ConstructionError for an out-of-range label.
  int label(const LatticePoint& v) const;

  /// Number of distinct vertices labeled so far.
  std::size_t queries() const;

  /// Labels of m·e_1, ..., m·e_n.
  std::vector<int> corner_labels() const;
  bool is_face_preserving() const;

  /// Violations recorded by lazy validation so far.
  std::vector<SpernerViolation> violations_seen() const;

  /// Every vertex labeled so far, in lexicographic order.
  std::map<LatticePoint, int> snapshot() const;

  /// Identity of the shared memo; copies compare equal.
  const void* id() const { return state_.get(); }

 private:
  struct State;
  explicit SpernerLabeling(std::shared_ptr<State> state);
  std::shared_ptr<State> state_;
};

/// Checks the Sperner rules for one vertex given the corner labels.
std::optional<SpernerViolation> check_vertex(const LatticePoint& v, int label,
                                             const std::vector<int>& corner_labels);

/// Exhaustive mode scans every grid vertex (refusing grids above
/// `max_points`); lazy mode reports what validation-on-query has seen.
std::vector<SpernerViolation> validate_sperner(const SpernerLabeling& l, bool exhaustive,
                                               std::uint64_t max_points = 10'000'000);

/// Top cells of the grid exhibiting all n labels. For a valid labeling the
/// count is odd; an even count raises InternalInconsistency.
std::vector<GridCell> enumerate_fully_labeled(const SpernerLabeling& l,
                                              std::uint64_t max_cells = 10'000'000);

struct TrapdoorResult {
  GridCell cell;
  std::vector<GridFace> doors;  // in traversal order, starting at {m·e_1}
};

/// Classical door-following search for a fully labeled cell. Works level by
/// level through the faces conv{e_1..e_k}: a face exhibiting labels
/// {1..k-1} (after normalizing by the corner labels) is a door. Starts at the
/// corner m·e_1 and never walks back through a door.
TrapdoorResult trapdoor_search(const SpernerLabeling& l);

/// Merges two labelings of a triangle (n = 3) into one, mapping each label pair
/// through the fixed table
///   (1,1),(1,2),(2,1) -> 3;  (2,2),(2,3),(3,2) -> 1;  (3,3),(3,1),(1,3) -> 2.
/// Requires the merged corner labels to be pairwise distinct.
SpernerLabeling combine_pair(const SpernerLabeling& l1, const SpernerLabeling& l2);
int combine_labels(int a, int b);

/// A valid face-preserving labeling with labels drawn uniformly from each
/// vertex's carrier (table backed).
SpernerLabeling random_sperner_labeling(int n, Coord resolution, std::uint64_t seed);

/// `{n, m, entries: [{vertex: [...], label: int}]}`. Dumping labels every
/// vertex of the grid.
nlohmann::json labeling_to_json(const SpernerLabeling& l);
SpernerLabeling labeling_from_json(const nlohmann::json& j);

}  // namespace rentharmony
