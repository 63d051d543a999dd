#pragma once

#include "rentharmony/labeling.hpp"
#include "rentharmony/pathfollow.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace rentharmony {

// Several face-preserving labelings of the same grid. With N coordinates the
// simplex has dimension N-1 and every labeling uses labels 1..N.

/// How many labelings give each label at one vertex: a lattice point whose
/// resolution is the number of labelings.
LatticePoint multiplicity_vector(const std::vector<SpernerLabeling>& labelings, const LatticePoint& v);

/// True iff y (coordinates summing to m) lies in the convex hull of no N-1
/// lattice points of m·Δ. Every subset is tested exactly; throws GridTooLarge
/// when there are more than `max_subsets` of them.
bool check_capture_hypothesis(const RVec& y, Coord m, std::uint64_t max_subsets = 5'000'000);

struct CaptureResult {
  GridCell cell;
  std::vector<LatticePoint> vertices;        // the cell's vertices, in cell order
  std::vector<LatticePoint> multiplicities;  // one per vertex
  RVec weights;                              // y = Σ weights[i] · multiplicities[i]
  WalkTrace trace;
  int attempts = 0;
};

/// Cell whose multiplicity vectors capture y, found by walking the averaged
/// map towards y / m. Throws HypothesisFailure if `check_hypothesis` is set
/// and y is captured by fewer points, InternalInconsistency if no attempt
/// certifies.
CaptureResult find_capture_cell(const std::vector<SpernerLabeling>& labelings, const RVec& y,
                                bool check_hypothesis = true, std::uint64_t seed = 0,
                                const WalkOptions& opt = {});

/// k_j distinct labels requested from labeling j. Valid when every
/// 1 <= k_j <= N and Σ k_j = (N-1) + m.
struct DistinctCountSpec {
  int n = 0;  // coordinates N
  std::vector<int> k;

  int labelings() const { return static_cast<int>(k.size()); }
  std::optional<std::string> problem() const;
  /// α_j = (k_j + 1/m - 1) / N.
  RVec alpha() const;
};

struct DistinctLabelCertificate {
  RVec mu;                          // barycentric coordinates over the cell's vertices
  RVec alpha;
  std::vector<RVec> beta;           // beta[i][j]: label i+1, labeling j+1
  std::vector<int> support_counts;  // per labeling, labels i with beta[i][j] > 0
};

struct DistinctCountResult {
  GridCell cell;
  DistinctLabelCertificate certificate;
  WalkTrace trace;
  int attempts = 0;
};

/// β_ij = α_j · Σ{ μ_k : labeling j gives label i at vertex k }.
DistinctLabelCertificate make_beta_certificate(const std::vector<SpernerLabeling>& labelings, const GridCell& cell,
                                               const RVec& mu, const RVec& alpha);

/// nullopt when both marginals hold exactly and every labeling has support at
/// least k_j; otherwise a description of the first violation.
std::optional<std::string> verify_beta_certificate(const DistinctLabelCertificate& cert,
                                                   const DistinctCountSpec& spec);

/// Cell on which labeling j shows at least k_j labels, with its certificate.
DistinctCountResult find_distinct_count_cell(const std::vector<SpernerLabeling>& labelings,
                                             const DistinctCountSpec& spec, std::uint64_t seed = 0,
                                             const WalkOptions& opt = {});

nlohmann::json capture_to_json(const CaptureResult& r);
nlohmann::json distinct_to_json(const DistinctCountResult& r);

}  // namespace rentharmony
