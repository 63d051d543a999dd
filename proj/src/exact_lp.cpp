#include "rentharmony/exact_lp.hpp"

#include <stdexcept>

namespace rentharmony::lp {

std::optional<RVec> find_feasible(const Matrix& a, const RVec& b) {
  if (b.size() != a.rows) throw std::invalid_argument("find_feasible: rhs size mismatch");
  const std::size_t rows = a.rows;
  const std::size_t cols = a.cols;
  const std::size_t width = cols + rows + 1;  // structural | artificial | rhs

  // Tableau with artificial basis; rows flipped so the rhs is nonnegative.
  std::vector<RVec> tab(rows, RVec(width));
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const bool flip = b[r] < 0;
    for (std::size_t c = 0; c < cols; ++c) tab[r][c] = flip ? -a(r, c) : a(r, c);
    tab[r][cols + r] = 1;
    tab[r][width - 1] = flip ? -b[r] : b[r];
    basis[r] = cols + r;
  }

  // Reduced costs of the phase-one objective (minimise the artificial sum).
  RVec cost(width);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) cost[c] -= tab[r][c];
    cost[width - 1] -= tab[r][width - 1];
  }

  for (;;) {
    std::size_t enter = width;
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (cost[c] < 0) {
        enter = c;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = rows;
    Rational best;
    for (std::size_t r = 0; r < rows; ++r) {
      if (tab[r][enter] <= 0) continue;
      Rational ratio = tab[r][width - 1] / tab[r][enter];
      if (leave == rows || ratio < best || (ratio == best && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == rows) break;  // phase one is bounded below by zero; unreachable

    const Rational pivot = tab[leave][enter];
    for (auto& x : tab[leave]) x /= pivot;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave || tab[r][enter] == 0) continue;
      const Rational f = tab[r][enter];
      for (std::size_t c = 0; c < width; ++c) {
        if (tab[leave][c] != 0) tab[r][c] -= f * tab[leave][c];
      }
    }
    if (cost[enter] != 0) {
      const Rational f = cost[enter];
      for (std::size_t c = 0; c < width; ++c) {
        if (tab[leave][c] != 0) cost[c] -= f * tab[leave][c];
      }
    }
    basis[leave] = enter;
  }

  if (cost[width - 1] != 0) return std::nullopt;  // residual artificial mass

  RVec z(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] < cols) z[basis[r]] = tab[r][width - 1];
  }
  return z;
}

}  // namespace rentharmony::lp
