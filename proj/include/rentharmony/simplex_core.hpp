#pragma once

#include "rentharmony/rational.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rentharmony {

using Coord = std::int64_t;

/// A point with nonnegative integer coordinates summing to the resolution m,
/// i.e. a vertex of the triangulated dilated simplex m·Δ_{n-1}.
class LatticePoint {
 public:
  LatticePoint() = default;
  /// Throws ConstructionError unless coords are nonnegative and sum to m.
  LatticePoint(std::vector<Coord> coords, Coord resolution);

  /// The corner m·e_room (room is 1-based).
  static LatticePoint corner(int n, Coord resolution, int room);

  const std::vector<Coord>& coords() const { return coords_; }
  Coord resolution() const { return m_; }
  int n() const { return static_cast<int>(coords_.size()); }
  Coord operator[](std::size_t i) const { return coords_[i]; }

  /// 1-based indices of the nonzero coordinates (the carrier face).
  std::vector<int> support() const;
  bool is_corner() const { return support().size() == 1; }

  auto operator<=>(const LatticePoint&) const = default;

 private:
  std::vector<Coord> coords_;
  Coord m_ = 0;
};

std::string to_string(const LatticePoint& p);

/// A division of the rent: nonnegative exact coordinates summing to the total.
class PricePoint {
 public:
  PricePoint() = default;
  /// Throws ConstructionError on a negative coordinate or a wrong sum.
  PricePoint(RVec coords, Rational total);

  const RVec& coords() const { return coords_; }
  const Rational& total() const { return total_; }
  int n() const { return static_cast<int>(coords_.size()); }
  const Rational& operator[](std::size_t i) const { return coords_[i]; }

  bool operator==(const PricePoint&) const = default;

 private:
  RVec coords_;
  Rational total_;
};

/// coords_i = total · p_i / m.
PricePoint lattice_to_price(const LatticePoint& p, const Rational& total);

/// Smallest resolution the library uses to keep all vertices of one cell
/// within one cent of each other: 2 · total_cents.
Coord resolution_for_one_cent(Coord total_cents);

/// Returns m if acceptable, otherwise throws ConstructionError in strict mode.
/// A non-strict check only requires m >= 1.
Coord checked_resolution(Coord m, Coord total_cents, bool strict);

/// A simplex of the Freudenthal–Kuhn triangulation of m·Δ_{n-1}.
///
/// The triangulation lives in partial-sum coordinates w_k = x_1 + ... + x_k,
/// where the dilated simplex becomes the order simplex
/// 0 <= w_1 <= ... <= w_{n-1} <= m and each unit cube is split into the d!
/// Kuhn simplexes. A cell of dimension d lies in the face conv{e_1..e_{d+1}}
/// (coordinates w_{d+1}, ..., w_{n-1} pinned to m); top cells have d = n-1.
/// Vertex v_0 is the base and v_k = v_{k-1} + u_{perm(k)}, where a unit step
/// in w_j moves one lattice unit from x_{j+1} to x_j.
class GridCell {
 public:
  GridCell() = default;
  /// `base` holds w_1..w_d, `perm` is a permutation of 1..d.
  /// Throws ConstructionError if any vertex leaves the dilated simplex.
  GridCell(int n, Coord resolution, std::vector<Coord> base, std::vector<int> perm);

  /// Like the constructor but returns nullopt instead of throwing when the
  /// cell would leave the simplex.
  static std::optional<GridCell> make(int n, Coord resolution, std::vector<Coord> base,
                                      std::vector<int> perm);

  /// The 0-dimensional cell {m·e_1}.
  static GridCell start_vertex(int n, Coord resolution);

  int n() const { return n_; }
  Coord resolution() const { return m_; }
  int dim() const { return static_cast<int>(base_.size()); }
  const std::vector<Coord>& base() const { return base_; }
  const std::vector<int>& perm() const { return perm_; }

  /// The dim()+1 vertices v_0..v_d in full n-coordinate form.
  std::vector<LatticePoint> vertices() const;
  /// All vertices except v_k.
  std::vector<LatticePoint> facet_vertices(int k) const;

  /// The other cell of the same dimension sharing the facet opposite v_k,
  /// or nullopt when that facet lies on the boundary of the cell's face.
  std::optional<GridCell> neighbor_through_facet(int k) const;

  /// If the facet opposite v_k lies in the next lower face
  /// conv{e_1..e_d}, returns it as a (d-1)-dimensional cell.
  std::optional<GridCell> facet_in_lower_face(int k) const;

  /// The unique (d+1)-dimensional cell in conv{e_1..e_{d+2}} having this
  /// cell as a facet. Requires dim() < n-1.
  GridCell coface_in_upper_face() const;

  auto operator<=>(const GridCell&) const = default;

 private:
  static bool fits(int n, Coord m, const std::vector<Coord>& base, const std::vector<int>& perm);

  int n_ = 0;
  Coord m_ = 0;
  std::vector<Coord> base_;
  std::vector<int> perm_;
};

std::string to_string(const GridCell& cell);

/// A face of the triangulation, given by its sorted vertex set.
struct GridFace {
  std::vector<LatticePoint> vertices;
  int dim() const { return static_cast<int>(vertices.size()) - 1; }
  auto operator<=>(const GridFace&) const = default;
};

GridFace make_face(std::vector<LatticePoint> vertices);

/// Partial sums w_1..w_{n-1} of a (rational) point of m·Δ.
RVec partial_sums(const RVec& x);

/// Top cell containing the point x (coordinates summing to m) together with
/// its barycentric coordinates. Points on shared faces are resolved toward the
/// simplex center, then toward the lexicographically smallest permutation.
struct Location {
  GridCell cell;
  RVec mu;
};
Location locate(int n, Coord resolution, const RVec& x);

/// Barycentric coordinates of x in `cell` (same dimension as the ambient face),
/// or nullopt when x is outside the cell.
std::optional<RVec> barycentric_in(const GridCell& cell, const RVec& x);

/// Every lattice point of m·Δ_{n-1}, in lexicographic order.
std::vector<LatticePoint> enumerate_lattice_points(int n, Coord resolution);

/// Number of top cells, m^(n-1).
BigInt cell_count(int n, Coord resolution);

/// Every top cell, in (base, perm) lexicographic order. Throws GridTooLarge
/// when the count exceeds `max_cells`.
std::vector<GridCell> enumerate_cells(int n, Coord resolution, std::uint64_t max_cells = 10'000'000);

}  // namespace rentharmony
