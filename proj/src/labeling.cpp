#include "rentharmony/labeling.hpp"

#include "rentharmony/errors.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <set>
#include <unordered_map>

namespace rentharmony {

namespace {

struct CoordsHash {
  std::size_t operator()(const std::vector<Coord>& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (Coord c : v) {
      h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

struct SpernerLabeling::State {
  int n = 0;
  Coord m = 0;
  std::optional<std::map<LatticePoint, int>> table;
  LabelOracle oracle;
  bool validate = false;

  mutable std::mutex mu;
  mutable std::unordered_map<std::vector<Coord>, int, CoordsHash> memo;
  mutable std::vector<SpernerViolation> violations;
  mutable bool corners_checked = false;
};

SpernerLabeling::SpernerLabeling(std::shared_ptr<State> state) : state_(std::move(state)) {}

SpernerLabeling SpernerLabeling::from_table(int n, Coord resolution, std::map<LatticePoint, int> table) {
  auto s = std::make_shared<State>();
  s->n = n;
  s->m = resolution;
  for (const auto& [v, label] : table) {
    if (v.n() != n || v.resolution() != resolution) {
      throw ConstructionError("labeling table: vertex " + to_string(v) + " does not belong to the grid");
    }
    if (label < 1 || label > n) throw ConstructionError("labeling table: label out of range at " + to_string(v));
  }
  s->table = std::move(table);
  return SpernerLabeling(std::move(s));
}

SpernerLabeling SpernerLabeling::from_oracle(int n, Coord resolution, LabelOracle oracle,
                                             bool validate_on_query) {
  if (n < 2) throw ConstructionError("labeling needs n >= 2");
  if (resolution < 1) throw ConstructionError("labeling needs a positive resolution");
  auto s = std::make_shared<State>();
  s->n = n;
  s->m = resolution;
  s->oracle = std::move(oracle);
  s->validate = validate_on_query;
  return SpernerLabeling(std::move(s));
}

int SpernerLabeling::n() const { return state_->n; }
Coord SpernerLabeling::resolution() const { return state_->m; }

int SpernerLabeling::label(const LatticePoint& v) const {
  const State& s = *state_;
  {
    std::lock_guard lock(s.mu);
    auto it = s.memo.find(v.coords());
    if (it != s.memo.end()) return it->second;
  }
  int label = 0;
  if (s.table) {
    label = s.table->at(v);
  } else {
    label = s.oracle(v);
  }
  if (label < 1 || label > s.n) {
    throw ConstructionError("label " + std::to_string(label) + " out of range at vertex " + to_string(v));
  }
  {
    std::lock_guard lock(s.mu);
    s.memo.emplace(v.coords(), label);
  }
  if (s.validate) {
    auto corners = corner_labels();
    std::lock_guard lock(s.mu);
    if (!s.corners_checked) {
      s.corners_checked = true;
      std::set<int> distinct(corners.begin(), corners.end());
      if (static_cast<int>(distinct.size()) != s.n) {
        s.violations.push_back(
            SpernerViolation{LatticePoint::corner(s.n, s.m, 1), {1}, corners[0], "corner labels are not distinct"});
      }
    }
    if (auto bad = check_vertex(v, label, corners)) s.violations.push_back(std::move(*bad));
  }
  return label;
}

std::size_t SpernerLabeling::queries() const {
  std::lock_guard lock(state_->mu);
  return state_->memo.size();
}

std::vector<int> SpernerLabeling::corner_labels() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n()));
  for (int i = 1; i <= n(); ++i) out.push_back(label(LatticePoint::corner(n(), resolution(), i)));
  return out;
}

bool SpernerLabeling::is_face_preserving() const {
  auto c = corner_labels();
  for (int i = 0; i < n(); ++i) {
    if (c[static_cast<std::size_t>(i)] != i + 1) return false;
  }
  return true;
}

std::vector<SpernerViolation> SpernerLabeling::violations_seen() const {
  std::lock_guard lock(state_->mu);
  return state_->violations;
}

std::map<LatticePoint, int> SpernerLabeling::snapshot() const {
  std::lock_guard lock(state_->mu);
  std::map<LatticePoint, int> out;
  for (const auto& [coords, label] : state_->memo) out.emplace(LatticePoint(coords, state_->m), label);
  return out;
}

// ---------------------------------------------------------------------------

std::optional<SpernerViolation> check_vertex(const LatticePoint& v, int label,
                                             const std::vector<int>& corner_labels) {
  auto carrier = v.support();
  for (int i : carrier) {
    if (corner_labels[static_cast<std::size_t>(i - 1)] == label) return std::nullopt;
  }
  return SpernerViolation{v, carrier, label, "label is not a corner label of the carrier face"};
}

std::vector<SpernerViolation> validate_sperner(const SpernerLabeling& l, bool exhaustive,
                                               std::uint64_t max_points) {
  if (!exhaustive) return l.violations_seen();
  // Number of lattice points is C(m + n - 1, n - 1).
  BigInt points = 1;
  for (int i = 1; i < l.n(); ++i) points = points * (l.resolution() + i) / i;
  if (points > BigInt(max_points)) {
    throw GridTooLarge("grid has " + points.str() + " vertices, guard is " + std::to_string(max_points));
  }
  std::vector<SpernerViolation> out;
  auto corners = l.corner_labels();
  std::set<int> distinct(corners.begin(), corners.end());
  if (static_cast<int>(distinct.size()) != l.n()) {
    out.push_back(SpernerViolation{LatticePoint::corner(l.n(), l.resolution(), 1), {1}, corners[0],
                                   "corner labels are not distinct"});
  }
  for (const auto& v : enumerate_lattice_points(l.n(), l.resolution())) {
    if (auto bad = check_vertex(v, l.label(v), corners)) out.push_back(std::move(*bad));
  }
  return out;
}

std::vector<GridCell> enumerate_fully_labeled(const SpernerLabeling& l, std::uint64_t max_cells) {
  auto cells = enumerate_cells(l.n(), l.resolution(), max_cells);
  std::vector<GridCell> out;
  for (const auto& c : cells) {
    std::vector<bool> seen(static_cast<std::size_t>(l.n()) + 1, false);
    int distinct = 0;
    for (const auto& v : c.vertices()) {
      int lab = l.label(v);
      if (!seen[static_cast<std::size_t>(lab)]) {
        seen[static_cast<std::size_t>(lab)] = true;
        ++distinct;
      }
    }
    if (distinct == l.n()) out.push_back(c);
  }
  if (out.size() % 2 == 0 && validate_sperner(l, true).empty()) {
    throw InternalInconsistency("valid Sperner labeling with an even number of fully labeled cells");
  }
  return out;
}

// ---------------------------------------------------------------------------

TrapdoorResult trapdoor_search(const SpernerLabeling& l) {
  const int n = l.n();
  const auto corners = l.corner_labels();
  std::vector<int> normalize(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    int c = corners[static_cast<std::size_t>(i)];
    if (normalize[static_cast<std::size_t>(c)] != 0) {
      throw InternalInconsistency("trapdoor search: corner labels are not distinct");
    }
    normalize[static_cast<std::size_t>(c)] = i + 1;
  }
  // Bit mask of normalized labels exhibited by a vertex set.
  auto label_mask = [&](const std::vector<LatticePoint>& vs) {
    std::uint64_t mask = 0;
    for (const auto& v : vs) mask |= std::uint64_t{1} << (normalize[static_cast<std::size_t>(l.label(v))] - 1);
    return mask;
  };
  auto first_labels = [](int k) { return (std::uint64_t{1} << k) - 1; };

  TrapdoorResult result;
  std::set<GridFace> used;
  GridCell current = GridCell::start_vertex(n, l.resolution());
  if (label_mask(current.vertices()) != first_labels(1)) {
    throw InternalInconsistency("trapdoor search: corner e_1 is not labeled with its own label");
  }
  GridFace entered = make_face(current.vertices());
  result.doors.push_back(entered);
  used.insert(entered);
  current = current.coface_in_upper_face();

  for (;;) {
    const int k = current.dim() + 1;
    const auto vertices = current.vertices();
    const std::uint64_t mask = label_mask(vertices);

    struct Door {
      GridFace face;
      std::optional<GridCell> target;  // nullopt: current cell is the answer
    };
    std::vector<Door> doors;
    for (int i = 0; i <= current.dim(); ++i) {
      auto facet = current.facet_vertices(i);
      if (label_mask(facet) != first_labels(k - 1)) continue;
      if (auto low = current.facet_in_lower_face(i)) {
        doors.push_back(Door{make_face(std::move(facet)), low});
      } else if (auto nb = current.neighbor_through_facet(i)) {
        doors.push_back(Door{make_face(std::move(facet)), nb});
      } else {
        throw InternalInconsistency("trapdoor search: door on a boundary facet of " + to_string(current));
      }
    }
    if (mask == first_labels(k)) {
      if (k == n) {
        result.cell = current;
        return result;
      }
      doors.push_back(Door{make_face(vertices), current.coface_in_upper_face()});
    }
    std::erase_if(doors, [&](const Door& d) { return d.face == entered; });
    if (doors.size() != 1) {
      throw InternalInconsistency("trapdoor search: room " + to_string(current) + " has " +
                                  std::to_string(doors.size()) + " exits");
    }
    if (!used.insert(doors[0].face).second) {
      throw InternalInconsistency("trapdoor search: door visited twice");
    }
    result.doors.push_back(doors[0].face);
    entered = doors[0].face;
    current = *doors[0].target;
  }
}

int combine_labels(int a, int b) {
  static constexpr int table[3][3] = {
      {3, 3, 2},  // (1,1) (1,2) (1,3)
      {3, 1, 1},  // (2,1) (2,2) (2,3)
      {2, 1, 2},  // (3,1) (3,2) (3,3)
  };
  if (a < 1 || a > 3 || b < 1 || b > 3) throw ConstructionError("combine_labels: labels must be in 1..3");
  return table[a - 1][b - 1];
}

SpernerLabeling combine_pair(const SpernerLabeling& l1, const SpernerLabeling& l2) {
  if (l1.n() != 3 || l2.n() != 3) throw Unsupported("combine_pair is defined for triangles (n = 3) only");
  if (l1.resolution() != l2.resolution()) throw ConstructionError("combine_pair: resolutions differ");
  std::set<int> corners;
  for (int i = 1; i <= 3; ++i) {
    auto c = LatticePoint::corner(3, l1.resolution(), i);
    corners.insert(combine_labels(l1.label(c), l2.label(c)));
  }
  if (corners.size() != 3) {
    throw ConstructionError("combine_pair: corner label pairs do not merge to distinct labels");
  }
  return SpernerLabeling::from_oracle(
      3, l1.resolution(), [l1, l2](const LatticePoint& v) { return combine_labels(l1.label(v), l2.label(v)); },
      true);
}

SpernerLabeling random_sperner_labeling(int n, Coord resolution, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::map<LatticePoint, int> table;
  for (auto& v : enumerate_lattice_points(n, resolution)) {
    auto s = v.support();
    int label = s[static_cast<std::size_t>(gen() % s.size())];
    table.emplace(std::move(v), label);
  }
  return SpernerLabeling::from_table(n, resolution, std::move(table));
}

nlohmann::json labeling_to_json(const SpernerLabeling& l) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& v : enumerate_lattice_points(l.n(), l.resolution())) {
    entries.push_back({{"vertex", v.coords()}, {"label", l.label(v)}});
  }
  return {{"n", l.n()}, {"m", l.resolution()}, {"entries", std::move(entries)}};
}

SpernerLabeling labeling_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const Coord m = j.at("m").get<Coord>();
  std::map<LatticePoint, int> table;
  for (const auto& e : j.at("entries")) {
    LatticePoint v(e.at("vertex").get<std::vector<Coord>>(), m);
    if (v.n() != n) throw ConstructionError("labeling json: vertex " + to_string(v) + " has wrong dimension");
    if (!table.emplace(v, e.at("label").get<int>()).second) {
      throw ConstructionError("labeling json: duplicate vertex " + to_string(v));
    }
  }
  return SpernerLabeling::from_table(n, m, std::move(table));
}

}  // namespace rentharmony
