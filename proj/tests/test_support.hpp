// Helpers shared by the unit and acceptance suites. Everything here is
// deliberately independent of the library's own solvers so it can act as a
// cross-check.
#pragma once

#include "rentharmony/rational.hpp"
#include "rentharmony/simplex_core.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace rh_test {

using rentharmony::Rational;
using rentharmony::RVec;

/// Rank of a list of rational row vectors by Gaussian elimination.
inline int rank_of(std::vector<RVec> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t pivot = rows.size();
    for (std::size_t r = static_cast<std::size_t>(rank); r < rows.size(); ++r) {
      if (rows[r][c] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank) || rows[r][c] == 0) continue;
      Rational f = rows[r][c] / rows[static_cast<std::size_t>(rank)][c];
      for (std::size_t k = 0; k < cols; ++k) rows[r][k] -= f * rows[static_cast<std::size_t>(rank)][k];
    }
    ++rank;
  }
  return rank;
}

/// Solves the square system M z = b; nullopt when singular.
inline std::optional<RVec> solve_square(std::vector<RVec> m, RVec b) {
  const std::size_t n = m.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = n;
    for (std::size_t r = c; r < n; ++r) {
      if (m[r][c] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == n) return std::nullopt;
    std::swap(m[pivot], m[c]);
    std::swap(b[pivot], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  RVec z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = b[i] / m[i][i];
  return z;
}

/// Feasibility of { z >= 0 : A z = b } by enumerating every basis: choose an
/// independent row subset of full rank, then every column subset of that
/// size, solve, and test nonnegativity. Exponential; only for tiny systems.
inline bool brute_force_feasible(const std::vector<RVec>& a, const RVec& b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  // Keep a maximal independent set of rows of [A | b].
  std::vector<std::size_t> keep;
  std::vector<RVec> acc;
  for (std::size_t r = 0; r < rows; ++r) {
    RVec row = a[r];
    row.push_back(b[r]);
    auto trial = acc;
    trial.push_back(row);
    if (rank_of(trial) > static_cast<int>(acc.size())) {
      acc.push_back(row);
      keep.push_back(r);
    }
  }
  // Inconsistent system: rank of A smaller than rank of [A | b].
  {
    std::vector<RVec> plain;
    for (auto r : keep) plain.push_back(a[r]);
    if (rank_of(plain) < static_cast<int>(keep.size())) return false;
  }
  const std::size_t k = keep.size();
  if (k == 0) return true;
  std::vector<bool> choose(cols, false);
  std::fill(choose.begin(), choose.begin() + static_cast<long>(std::min(k, cols)), true);
  if (k > cols) return false;
  do {
    std::vector<std::size_t> picked;
    for (std::size_t c = 0; c < cols; ++c) {
      if (choose[c]) picked.push_back(c);
    }
    std::vector<RVec> m(k, RVec(k));
    RVec rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) m[i][j] = a[keep[i]][picked[j]];
      rhs[i] = b[keep[i]];
    }
    if (auto z = solve_square(m, rhs)) {
      if (std::all_of(z->begin(), z->end(), [](const Rational& v) { return v >= 0; })) return true;
    }
  } while (std::prev_permutation(choose.begin(), choose.end()));
  return false;
}

/// Brute-force test of conv(points) ∩ [a, b] != ∅ over the system
/// sum mu_i p_i - t (b - a) = a, sum mu = 1, t + s = 1, all >= 0.
inline bool brute_force_segment_hit(const std::vector<RVec>& points, const RVec& a, const RVec& b) {
  const std::size_t dim = a.size();
  const std::size_t k = points.size();
  std::vector<RVec> rows;
  RVec rhs;
  for (std::size_t c = 0; c < dim; ++c) {
    RVec row(k + 2);
    for (std::size_t i = 0; i < k; ++i) row[i] = points[i][c];
    row[k] = -(b[c] - a[c]);
    rows.push_back(row);
    rhs.push_back(a[c]);
  }
  RVec sum_row(k + 2);
  for (std::size_t i = 0; i < k; ++i) sum_row[i] = 1;
  rows.push_back(sum_row);
  rhs.push_back(1);
  RVec t_row(k + 2);
  t_row[k] = 1;
  t_row[k + 1] = 1;
  rows.push_back(t_row);
  rhs.push_back(1);
  return brute_force_feasible(rows, rhs);
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {
  return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace rh_test
