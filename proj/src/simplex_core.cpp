#include "rentharmony/simplex_core.hpp"

#include "rentharmony/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rentharmony {

namespace {

// Full partial-sum vector (length n-1) of a cell vertex given the free
// coordinates w_1..w_d; trailing coordinates are pinned to m.
std::vector<Coord> pinned(int n, Coord m, const std::vector<Coord>& w) {
  std::vector<Coord> full(static_cast<std::size_t>(n - 1), m);
  std::copy(w.begin(), w.end(), full.begin());
  return full;
}

LatticePoint from_partial_sums(int n, Coord m, const std::vector<Coord>& w_free) {
  const auto w = pinned(n, m, w_free);
  std::vector<Coord> x(static_cast<std::size_t>(n));
  Coord prev = 0;
  for (int i = 0; i + 1 < n; ++i) {
    x[i] = w[i] - prev;
    prev = w[i];
  }
  x[n - 1] = m - prev;
  return LatticePoint(std::move(x), m);
}

bool is_permutation_of_1_to_d(const std::vector<int>& perm) {
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != static_cast<int>(i) + 1) return false;
  }
  return true;
}

}  // namespace

LatticePoint::LatticePoint(std::vector<Coord> coords, Coord resolution)
    : coords_(std::move(coords)), m_(resolution) {
  if (m_ < 1) throw ConstructionError("lattice point: resolution must be positive");
  if (coords_.empty()) throw ConstructionError("lattice point: no coordinates");
  Coord total = 0;
  for (Coord c : coords_) {
    if (c < 0) throw ConstructionError("lattice point: negative coordinate in " + to_string(*this));
    total += c;
  }
  if (total != m_) {
    throw ConstructionError("lattice point: coordinates of " + to_string(*this) + " sum to " +
                            std::to_string(total) + ", expected " + std::to_string(m_));
  }
}

LatticePoint LatticePoint::corner(int n, Coord resolution, int room) {
  std::vector<Coord> x(static_cast<std::size_t>(n), 0);
  x.at(static_cast<std::size_t>(room - 1)) = resolution;
  return LatticePoint(std::move(x), resolution);
}

std::vector<int> LatticePoint::support() const {
  std::vector<int> s;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] != 0) s.push_back(static_cast<int>(i) + 1);
  }
  return s;
}

std::string to_string(const LatticePoint& p) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < p.coords().size(); ++i) out << (i ? "," : "") << p.coords()[i];
  out << ')';
  return out.str();
}

PricePoint::PricePoint(RVec coords, Rational total) : coords_(std::move(coords)), total_(std::move(total)) {
  Rational s = 0;
  for (const auto& c : coords_) {
    if (c < 0) throw ConstructionError("price point: negative price");
    s += c;
  }
  if (s != total_) throw ConstructionError("price point: prices do not sum to the total rent");
}

PricePoint lattice_to_price(const LatticePoint& p, const Rational& total) {
  RVec coords;
  coords.reserve(p.coords().size());
  for (Coord c : p.coords()) coords.push_back(total * Rational(c) / Rational(p.resolution()));
  return PricePoint(std::move(coords), total);
}

Coord resolution_for_one_cent(Coord total_cents) {
  if (total_cents < 1) throw ConstructionError("total rent must be at least one cent");
  return 2 * total_cents;
}

Coord checked_resolution(Coord m, Coord total_cents, bool strict) {
  if (m < 1) throw ConstructionError("resolution must be positive");
  if (strict && m < resolution_for_one_cent(total_cents)) {
    throw ConstructionError("resolution " + std::to_string(m) + " is below the one-cent bound " +
                            std::to_string(resolution_for_one_cent(total_cents)));
  }
  return m;
}

// ---------------------------------------------------------------------------

bool GridCell::fits(int n, Coord m, const std::vector<Coord>& base, const std::vector<int>& perm) {
  const int d = static_cast<int>(base.size());
  if (n < 2 || d > n - 1 || static_cast<int>(perm.size()) != d || !is_permutation_of_1_to_d(perm)) {
    return false;
  }
  std::vector<Coord> w = base;
  auto monotone = [&](const std::vector<Coord>& v) {
    Coord prev = 0;
    for (Coord c : v) {
      if (c < prev) return false;
      prev = c;
    }
    return prev <= m;
  };
  if (!monotone(w)) return false;
  for (int step : perm) {
    ++w[static_cast<std::size_t>(step - 1)];
    if (!monotone(w)) return false;
  }
  return true;
}

GridCell::GridCell(int n, Coord resolution, std::vector<Coord> base, std::vector<int> perm)
    : n_(n), m_(resolution), base_(std::move(base)), perm_(std::move(perm)) {
  if (m_ < 1 || !fits(n_, m_, base_, perm_)) {
    throw ConstructionError("invalid grid cell " + to_string(*this));
  }
}

std::optional<GridCell> GridCell::make(int n, Coord resolution, std::vector<Coord> base,
                                       std::vector<int> perm) {
  if (resolution < 1 || !fits(n, resolution, base, perm)) return std::nullopt;
  return GridCell(n, resolution, std::move(base), std::move(perm));
}

GridCell GridCell::start_vertex(int n, Coord resolution) { return GridCell(n, resolution, {}, {}); }

std::vector<LatticePoint> GridCell::vertices() const {
  std::vector<LatticePoint> out;
  out.reserve(base_.size() + 1);
  std::vector<Coord> w = base_;
  out.push_back(from_partial_sums(n_, m_, w));
  for (int step : perm_) {
    ++w[static_cast<std::size_t>(step - 1)];
    out.push_back(from_partial_sums(n_, m_, w));
  }
  return out;
}

std::vector<LatticePoint> GridCell::facet_vertices(int k) const {
  auto v = vertices();
  v.erase(v.begin() + k);
  return v;
}

std::optional<GridCell> GridCell::neighbor_through_facet(int k) const {
  const int d = dim();
  if (k < 0 || k > d) throw ConstructionError("facet index out of range");
  if (d == 0) return std::nullopt;
  std::vector<Coord> base = base_;
  std::vector<int> perm = perm_;
  if (k == 0) {
    ++base[static_cast<std::size_t>(perm.front() - 1)];
    std::rotate(perm.begin(), perm.begin() + 1, perm.end());
  } else if (k == d) {
    --base[static_cast<std::size_t>(perm.back() - 1)];
    std::rotate(perm.rbegin(), perm.rbegin() + 1, perm.rend());
  } else {
    std::swap(perm[static_cast<std::size_t>(k - 1)], perm[static_cast<std::size_t>(k)]);
  }
  return make(n_, m_, std::move(base), std::move(perm));
}

std::optional<GridCell> GridCell::facet_in_lower_face(int k) const {
  const int d = dim();
  if (d == 0 || k != 0) return std::nullopt;
  if (perm_.front() != d || base_.back() != m_ - 1) return std::nullopt;
  std::vector<Coord> base(base_.begin(), base_.end() - 1);
  std::vector<int> perm(perm_.begin() + 1, perm_.end());
  return GridCell(n_, m_, std::move(base), std::move(perm));
}

GridCell GridCell::coface_in_upper_face() const {
  const int d = dim();
  if (d >= n_ - 1) throw ConstructionError("top cell has no coface");
  std::vector<Coord> base = base_;
  base.push_back(m_ - 1);
  std::vector<int> perm;
  perm.reserve(perm_.size() + 1);
  perm.push_back(d + 1);
  perm.insert(perm.end(), perm_.begin(), perm_.end());
  return GridCell(n_, m_, std::move(base), std::move(perm));
}

std::string to_string(const GridCell& cell) {
  std::ostringstream out;
  out << "cell(n=" << cell.n() << ", m=" << cell.resolution() << ", base=[";
  for (std::size_t i = 0; i < cell.base().size(); ++i) out << (i ? "," : "") << cell.base()[i];
  out << "], perm=[";
  for (std::size_t i = 0; i < cell.perm().size(); ++i) out << (i ? "," : "") << cell.perm()[i];
  out << "])";
  return out.str();
}

GridFace make_face(std::vector<LatticePoint> vertices) {
  std::sort(vertices.begin(), vertices.end());
  return GridFace{std::move(vertices)};
}

// ---------------------------------------------------------------------------

RVec partial_sums(const RVec& x) {
  RVec w;
  if (x.empty()) return w;
  w.reserve(x.size() - 1);
  Rational acc = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    acc += x[i];
    w.push_back(acc);
  }
  return w;
}

namespace {

RVec kuhn_barycentric(const RVec& y, const std::vector<int>& perm) {
  const std::size_t d = perm.size();
  RVec mu(d + 1);
  if (d == 0) {
    mu[0] = 1;
    return mu;
  }
  auto at = [&](std::size_t i) -> const Rational& { return y[static_cast<std::size_t>(perm[i] - 1)]; };
  mu[0] = 1 - at(0);
  for (std::size_t k = 1; k < d; ++k) mu[k] = at(k - 1) - at(k);
  mu[d] = at(d - 1);
  return mu;
}

}  // namespace

Location locate(int n, Coord resolution, const RVec& x) {
  if (static_cast<int>(x.size()) != n) throw ConstructionError("locate: dimension mismatch");
  if (sum(x) != Rational(resolution)) throw ConstructionError("locate: point not in the simplex");
  for (const auto& c : x) {
    if (c < 0) throw ConstructionError("locate: point not in the simplex");
  }
  const RVec w = partial_sums(x);
  const std::size_t d = w.size();

  struct Axis {
    Coord floor;
    Rational frac;
    Rational drift;  // direction toward the simplex center
    int index;
  };
  std::vector<Axis> axes;
  axes.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    BigInt fl = floor_of(w[j]);
    Rational frac = w[j] - Rational(fl);
    Rational drift = Rational(static_cast<long long>(j + 1)) * Rational(resolution) / Rational(n) - w[j];
    Coord f = static_cast<Coord>(fl);
    if (frac == 0 && drift < 0) {
      f -= 1;
      frac = 1;
    }
    axes.push_back(Axis{f, frac, drift, static_cast<int>(j) + 1});
  }
  std::vector<Coord> base;
  base.reserve(d);
  for (const auto& a : axes) base.push_back(a.floor);
  std::stable_sort(axes.begin(), axes.end(), [](const Axis& l, const Axis& r) {
    if (l.frac != r.frac) return l.frac > r.frac;
    if (l.drift != r.drift) return l.drift > r.drift;
    return l.index < r.index;
  });
  std::vector<int> perm;
  perm.reserve(d);
  for (const auto& a : axes) perm.push_back(a.index);

  auto cell = GridCell::make(n, resolution, base, perm);
  if (!cell) throw InternalInconsistency("locate: no valid cell for point");
  auto mu = barycentric_in(*cell, x);
  if (!mu) throw InternalInconsistency("locate: point outside located cell");
  return Location{std::move(*cell), std::move(*mu)};
}

std::optional<RVec> barycentric_in(const GridCell& cell, const RVec& x) {
  if (static_cast<int>(x.size()) != cell.n()) return std::nullopt;
  const RVec w = partial_sums(x);
  const std::size_t d = static_cast<std::size_t>(cell.dim());
  for (std::size_t j = d; j < w.size(); ++j) {
    if (w[j] != Rational(cell.resolution())) return std::nullopt;
  }
  RVec y(d);
  for (std::size_t j = 0; j < d; ++j) y[j] = w[j] - Rational(cell.base()[j]);
  RVec mu = kuhn_barycentric(y, cell.perm());
  for (const auto& v : mu) {
    if (v < 0) return std::nullopt;
  }
  return mu;
}

std::vector<LatticePoint> enumerate_lattice_points(int n, Coord resolution) {
  std::vector<LatticePoint> out;
  std::vector<Coord> x(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int i, Coord remaining) -> void {
    if (i == n - 1) {
      x[static_cast<std::size_t>(i)] = remaining;
      out.emplace_back(x, resolution);
      return;
    }
    for (Coord c = remaining; c >= 0; --c) {
      x[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, remaining - c);
    }
  };
  rec(rec, 0, resolution);
  return out;
}

BigInt cell_count(int n, Coord resolution) {
  BigInt count = 1;
  for (int i = 0; i + 1 < n; ++i) count *= resolution;
  return count;
}

std::vector<GridCell> enumerate_cells(int n, Coord resolution, std::uint64_t max_cells) {
  if (cell_count(n, resolution) > BigInt(max_cells)) {
    throw GridTooLarge("grid has " + cell_count(n, resolution).str() + " cells, guard is " +
                       std::to_string(max_cells));
  }
  const int d = n - 1;
  std::vector<GridCell> out;
  std::vector<int> identity(static_cast<std::size_t>(d));
  std::iota(identity.begin(), identity.end(), 1);
  std::vector<Coord> base(static_cast<std::size_t>(d), 0);
  auto rec = [&](auto&& self, int i, Coord lo) -> void {
    if (i == d) {
      std::vector<int> perm = identity;
      do {
        if (auto cell = GridCell::make(n, resolution, base, perm)) out.push_back(std::move(*cell));
      } while (std::next_permutation(perm.begin(), perm.end()));
      return;
    }
    for (Coord c = lo; c <= resolution - 1; ++c) {
      base[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, c);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace rentharmony
