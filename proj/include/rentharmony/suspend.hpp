#pragma once

#include "rentharmony/errors.hpp"
#include "rentharmony/simplex_core.hpp"

#include <vector>

namespace rentharmony {

/// One unanswered question: which room roommate `roommate` (1-based) prefers
/// at the prices of grid vertex `vertex`.
struct PendingQuery {
  int roommate = 0;
  LatticePoint vertex;
  auto operator<=>(const PendingQuery&) const = default;
};

/// Raised by a label source whose answer is not available yet. Callers that
/// label several vertices at once collect these and rethrow one merged batch.
class QuerySuspended : public Error {
 public:
  explicit QuerySuspended(std::vector<PendingQuery> pending)
      : Error("waiting for " + std::to_string(pending.size()) + " answer(s)"), pending_(std::move(pending)) {}
  const std::vector<PendingQuery>& pending() const { return pending_; }

 private:
  std::vector<PendingQuery> pending_;
};

}  // namespace rentharmony
