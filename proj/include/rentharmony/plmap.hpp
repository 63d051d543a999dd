#pragma once

#include "rentharmony/labeling.hpp"
#include "rentharmony/rational.hpp"
#include "rentharmony/simplex_core.hpp"

#include <optional>
#include <vector>

namespace rentharmony {

struct PLMapPart {
  SpernerLabeling labeling;
  Rational weight;
};

/// Labels of every part at one vertex, in part order. Two vertices with the
/// same signature have the same image.
using Signature = std::vector<int>;

/// The piecewise-linear map  x ↦ Σ_j w_j λ_j(x)  where λ_j sends a grid vertex
/// to the corner of its label and is extended linearly over each cell.
class PLMap {
 public:
  /// Throws ConstructionError if the parts disagree on (n, m), a weight is
  /// negative, or the weights do not sum to `target_scale`.
  PLMap(std::vector<PLMapPart> parts, Rational target_scale);

  static PLMap single(SpernerLabeling l);
  /// Equal weights 1/k, target scale 1.
  static PLMap average(std::vector<SpernerLabeling> ls);

  int n() const { return n_; }
  Coord resolution() const { return m_; }
  const Rational& target_scale() const { return scale_; }
  const std::vector<PLMapPart>& parts() const { return parts_; }

  Signature signature(const LatticePoint& v) const;
  /// Signatures of several vertices. Every part is asked about every vertex
  /// before any QuerySuspended escapes, so a caller waiting on answers gets
  /// the whole batch at once.
  std::vector<Signature> signatures(const std::vector<LatticePoint>& vs) const;

  RVec image_of(const Signature& s) const;

  /// Distinct vertices labeled so far, summed over distinct labelings.
  std::size_t queries() const;

 private:
  std::vector<PLMapPart> parts_;
  Rational scale_;
  int n_ = 0;
  Coord m_ = 0;
};

RVec vertex_image(const PLMap& map, const LatticePoint& v);

/// Images of a cell's vertices. Points may coincide or be affinely dependent.
struct ImageSimplex {
  std::vector<RVec> points;
  GridCell source;
};

ImageSimplex image_simplex(const PLMap& map, const GridCell& cell);

/// Value at a point x of the standard simplex (coordinates summing to 1).
RVec evaluate(const PLMap& map, const RVec& x);
/// Same, through a specific top cell; nullopt if x is outside it.
std::optional<RVec> evaluate_in_cell(const PLMap& map, const GridCell& cell, const RVec& x);

/// True iff every grid vertex with support inside `carrier` (1-based indices)
/// has its image supported on `carrier`.
bool face_setwise_check(const PLMap& map, const std::vector<int>& carrier,
                        std::uint64_t max_points = 10'000'000);

struct Segment {
  RVec a;
  RVec b;
};

enum class HitKind { NoHit, Hit, Degenerate };

struct HitResult {
  HitKind kind = HitKind::NoHit;
  RVec mu;     // barycentric witness over the image points
  Rational t;  // witness point is a + t (b - a)

  bool intersects() const { return kind != HitKind::NoHit; }
};

/// Exact test of conv(points) ∩ [a, b] ≠ ∅. A hit is Degenerate when every
/// intersection point has some μ_i = 0, or has t = 0, or has t = 1.
HitResult segment_hits_image(const ImageSimplex& img, const Segment& seg);
HitResult segment_hits_image(const std::vector<RVec>& points, const Segment& seg);

/// Intersection test only (one LP solve); what the walk uses.
bool segment_intersects(const std::vector<RVec>& points, const Segment& seg);

/// Barycentric coordinates of `y` over `points` if y ∈ conv(points).
std::optional<RVec> convex_witness(const std::vector<RVec>& points, const RVec& y);

}  // namespace rentharmony
