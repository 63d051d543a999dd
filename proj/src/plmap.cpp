#include "rentharmony/plmap.hpp"

#include "rentharmony/errors.hpp"
#include "rentharmony/exact_lp.hpp"
#include "rentharmony/suspend.hpp"

#include <set>

namespace rentharmony {

PLMap::PLMap(std::vector<PLMapPart> parts, Rational target_scale)
    : parts_(std::move(parts)), scale_(std::move(target_scale)) {
  if (parts_.empty()) throw ConstructionError("PL map needs at least one labeling");
  n_ = parts_[0].labeling.n();
  m_ = parts_[0].labeling.resolution();
  Rational total = 0;
  for (const auto& p : parts_) {
    if (p.labeling.n() != n_ || p.labeling.resolution() != m_) {
      throw ConstructionError("PL map parts are defined on different grids");
    }
    if (p.weight < 0) throw ConstructionError("PL map weight is negative");
    total += p.weight;
  }
  if (total != scale_) {
    throw ConstructionError("PL map weights sum to " + to_string(total) + ", expected " + to_string(scale_));
  }
}

PLMap PLMap::single(SpernerLabeling l) { return PLMap({PLMapPart{std::move(l), Rational(1)}}, Rational(1)); }

PLMap PLMap::average(std::vector<SpernerLabeling> ls) {
  if (ls.empty()) throw ConstructionError("PL map needs at least one labeling");
  const Rational w(1, static_cast<long>(ls.size()));
  std::vector<PLMapPart> parts;
  for (auto& l : ls) parts.push_back(PLMapPart{std::move(l), w});
  return PLMap(std::move(parts), Rational(1));
}

Signature PLMap::signature(const LatticePoint& v) const { return signatures({v}).front(); }

std::vector<Signature> PLMap::signatures(const std::vector<LatticePoint>& vs) const {
  std::vector<Signature> out(vs.size(), Signature(parts_.size()));
  std::vector<PendingQuery> pending;
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      try {
        out[i][j] = parts_[j].labeling.label(vs[i]);
      } catch (const QuerySuspended& e) {
        pending.insert(pending.end(), e.pending().begin(), e.pending().end());
      }
    }
  }
  if (!pending.empty()) {
    std::set<PendingQuery> unique(pending.begin(), pending.end());
    throw QuerySuspended(std::vector<PendingQuery>(unique.begin(), unique.end()));
  }
  return out;
}

RVec PLMap::image_of(const Signature& s) const {
  RVec y(static_cast<std::size_t>(n_));
  for (std::size_t j = 0; j < parts_.size(); ++j) y[static_cast<std::size_t>(s[j] - 1)] += parts_[j].weight;
  return y;
}

std::size_t PLMap::queries() const {
  std::set<const void*> seen;
  std::size_t total = 0;
  for (const auto& p : parts_) {
    if (seen.insert(p.labeling.id()).second) total += p.labeling.queries();
  }
  return total;
}

RVec vertex_image(const PLMap& map, const LatticePoint& v) { return map.image_of(map.signature(v)); }

ImageSimplex image_simplex(const PLMap& map, const GridCell& cell) {
  ImageSimplex img{{}, cell};
  for (const auto& s : map.signatures(cell.vertices())) img.points.push_back(map.image_of(s));
  return img;
}

namespace {

RVec combine(const PLMap& map, const GridCell& cell, const RVec& mu) {
  RVec y(static_cast<std::size_t>(map.n()));
  auto imgs = image_simplex(map, cell).points;
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    if (mu[i] == 0) continue;
    for (std::size_t c = 0; c < y.size(); ++c) y[c] += mu[i] * imgs[i][c];
  }
  return y;
}

RVec scaled(const RVec& x, Coord m) {
  RVec out = x;
  for (auto& v : out) v *= m;
  return out;
}

}  // namespace

RVec evaluate(const PLMap& map, const RVec& x) {
  auto loc = locate(map.n(), map.resolution(), scaled(x, map.resolution()));
  return combine(map, loc.cell, loc.mu);
}

std::optional<RVec> evaluate_in_cell(const PLMap& map, const GridCell& cell, const RVec& x) {
  auto mu = barycentric_in(cell, scaled(x, map.resolution()));
  if (!mu) return std::nullopt;
  return combine(map, cell, *mu);
}

bool face_setwise_check(const PLMap& map, const std::vector<int>& carrier, std::uint64_t max_points) {
  BigInt points = 1;
  for (int i = 1; i < map.n(); ++i) points = points * (map.resolution() + i) / i;
  if (points > BigInt(max_points)) throw GridTooLarge("face check: grid has " + points.str() + " vertices");
  std::vector<bool> in(static_cast<std::size_t>(map.n()) + 1, false);
  for (int i : carrier) in[static_cast<std::size_t>(i)] = true;
  for (const auto& v : enumerate_lattice_points(map.n(), map.resolution())) {
    auto s = v.support();
    if (!std::all_of(s.begin(), s.end(), [&](int i) { return in[static_cast<std::size_t>(i)]; })) continue;
    auto y = vertex_image(map, v);
    for (int c = 1; c <= map.n(); ++c) {
      if (!in[static_cast<std::size_t>(c)] && y[static_cast<std::size_t>(c - 1)] != 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

// Unknowns (μ_1..μ_k, t, s):  Σ μ_i p_i − t (b − a) = a,  Σ μ = 1,  t + s = 1.
struct HitSystem {
  lp::Matrix a;
  RVec rhs;
};

HitSystem hit_system(const std::vector<RVec>& points, const Segment& seg) {
  const std::size_t k = points.size();
  const std::size_t dim = seg.a.size();
  HitSystem sys{lp::Matrix(dim + 2, k + 2), RVec(dim + 2)};
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t i = 0; i < k; ++i) sys.a(c, i) = points[i][c];
    sys.a(c, k) = seg.a[c] - seg.b[c];
    sys.rhs[c] = seg.a[c];
  }
  for (std::size_t i = 0; i < k; ++i) sys.a(dim, i) = 1;
  sys.rhs[dim] = 1;
  sys.a(dim + 1, k) = 1;
  sys.a(dim + 1, k + 1) = 1;
  sys.rhs[dim + 1] = 1;
  return sys;
}

// Whether some solution has z_j > 0. The solution set is bounded, so the
// homogenized system  A y = σ b,  y ≥ 0,  σ ≥ 0,  y_j = 1  is feasible exactly then.
bool can_be_positive(const HitSystem& sys, std::size_t j) {
  const std::size_t rows = sys.a.rows;
  const std::size_t cols = sys.a.cols;
  lp::Matrix h(rows + 1, cols + 1);
  RVec rhs(rows + 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) h(r, c) = sys.a(r, c);
    h(r, cols) = -sys.rhs[r];
  }
  h(rows, j) = 1;
  rhs[rows] = 1;
  return lp::find_feasible(h, rhs).has_value();
}

void check_dims(const std::vector<RVec>& points, const Segment& seg) {
  if (seg.a.size() != seg.b.size()) throw ConstructionError("segment endpoints differ in dimension");
  for (const auto& p : points) {
    if (p.size() != seg.a.size()) throw ConstructionError("image point and segment differ in dimension");
  }
}

}  // namespace

HitResult segment_hits_image(const std::vector<RVec>& points, const Segment& seg) {
  check_dims(points, seg);
  auto sys = hit_system(points, seg);
  auto z = lp::find_feasible(sys.a, sys.rhs);
  HitResult r;
  if (!z) return r;
  const std::size_t k = points.size();
  r.kind = HitKind::Hit;
  r.mu.assign(z->begin(), z->begin() + static_cast<long>(k));
  r.t = (*z)[k];
  for (std::size_t j = 0; j < k + 2; ++j) {
    if ((*z)[j] > 0) continue;
    if (!can_be_positive(sys, j)) {
      r.kind = HitKind::Degenerate;
      break;
    }
  }
  return r;
}

HitResult segment_hits_image(const ImageSimplex& img, const Segment& seg) {
  return segment_hits_image(img.points, seg);
}

bool segment_intersects(const std::vector<RVec>& points, const Segment& seg) {
  check_dims(points, seg);
  auto sys = hit_system(points, seg);
  return lp::find_feasible(sys.a, sys.rhs).has_value();
}

std::optional<RVec> convex_witness(const std::vector<RVec>& points, const RVec& y) {
  const std::size_t k = points.size();
  const std::size_t dim = y.size();
  lp::Matrix a(dim + 1, k);
  RVec rhs(dim + 1);
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t i = 0; i < k; ++i) a(c, i) = points[i][c];
    rhs[c] = y[c];
  }
  for (std::size_t i = 0; i < k; ++i) a(dim, i) = 1;
  rhs[dim] = 1;
  return lp::find_feasible(a, rhs);
}

}  // namespace rentharmony
