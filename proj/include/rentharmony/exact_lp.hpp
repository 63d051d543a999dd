#pragma once

#include "rentharmony/rational.hpp"

#include <optional>
#include <vector>

namespace rentharmony::lp {

/// Dense row-major matrix of rationals.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  RVec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  Rational& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Finds a basic feasible solution of { z >= 0 : A z = b } with an exact
/// phase-one simplex under Bland's rule, or nullopt when the system is
/// infeasible. The returned vertex is deterministic for a given input.
std::optional<RVec> find_feasible(const Matrix& a, const RVec& b);

}  // namespace rentharmony::lp
