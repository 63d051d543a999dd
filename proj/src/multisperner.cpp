#include "rentharmony/multisperner.hpp"

#include "rentharmony/errors.hpp"

#include <functional>

namespace rentharmony {

namespace {

void check_labelings(const std::vector<SpernerLabeling>& ls) {
  if (ls.empty()) throw ConstructionError("at least one labeling is required");
  for (const auto& l : ls) {
    if (l.n() != ls[0].n() || l.resolution() != ls[0].resolution()) {
      throw ConstructionError("labelings live on different grids");
    }
    if (!l.is_face_preserving()) throw ConstructionError("labelings must give label i at corner e_i");
  }
}

RVec as_rvec(const LatticePoint& p) {
  RVec r;
  for (auto c : p.coords()) r.emplace_back(c);
  return r;
}

struct Found {
  GridCell cell;
  RVec witness;
  WalkTrace trace;
  int attempts = 0;
};

// Walks along successive chains and returns the first cell, among the
// terminal cell and its neighbors, that `certify` accepts.
Found search(const PLMap& map, const std::optional<RVec>& target, std::uint64_t seed, const WalkOptions& opt,
             const std::function<std::optional<RVec>(const GridCell&)>& certify) {
  const int n = map.n();
  const Rational eps = default_epsilon(n);
  const int attempts = std::max(1, opt.max_attempts);
  std::string last_problem = "no attempt made";
  for (int a = 0; a < attempts; ++a) {
    auto chain = make_chain(n, seed + static_cast<std::uint64_t>(a), eps / Rational(BigInt(1) << a));
    if (target) chain = with_final_target(std::move(chain), *target);
    WalkResult w;
    try {
      w = walk_once(map, chain, opt);
    } catch (const DegeneracySignal& e) {
      last_problem = e.what();
      continue;
    }
    std::vector<GridCell> candidates{w.cell};
    for (int k = 0; k <= w.cell.dim(); ++k) {
      if (auto nb = w.cell.neighbor_through_facet(k)) candidates.push_back(*nb);
    }
    for (const auto& c : candidates) {
      if (auto z = certify(c)) {
        w.trace.reperturbations = a;
        w.trace.queries_made = map.queries();
        return {c, std::move(*z), std::move(w.trace), a + 1};
      }
    }
    last_problem = "cell " + to_string(w.cell) + " and its neighbors fail the exact check";
  }
  throw InternalInconsistency("no certified cell after " + std::to_string(attempts) + " attempts: " + last_problem);
}

nlohmann::json rvec_json(const RVec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : v) j.push_back(to_string(x));
  return j;
}

nlohmann::json trace_json(const WalkTrace& t, int attempts) {
  return {{"steps", t.steps}, {"queries", t.queries_made}, {"reperturbations", t.reperturbations},
          {"attempts", attempts}};
}

}  // namespace

LatticePoint multiplicity_vector(const std::vector<SpernerLabeling>& labelings, const LatticePoint& v) {
  std::vector<Coord> counts(static_cast<std::size_t>(v.n()), 0);
  for (const auto& l : labelings) ++counts[static_cast<std::size_t>(l.label(v) - 1)];
  return LatticePoint(std::move(counts), static_cast<Coord>(labelings.size()));
}

bool check_capture_hypothesis(const RVec& y, Coord m, std::uint64_t max_subsets) {
  const int n = static_cast<int>(y.size());
  if (n < 2 || m < 1) throw ConstructionError("capture target needs two coordinates and m >= 1");
  for (const auto& x : y) {
    if (x < 0) throw ConstructionError("capture target has a negative coordinate");
  }
  if (sum(y) != m) throw ConstructionError("capture target coordinates must sum to " + std::to_string(m));

  std::vector<RVec> pts;
  for (const auto& p : enumerate_lattice_points(n, m)) pts.push_back(as_rvec(p));
  const std::size_t k = static_cast<std::size_t>(n - 1);
  if (pts.size() < k) return !convex_witness(pts, y).has_value();

  BigInt subsets = 1;
  for (std::size_t i = 0; i < k; ++i) subsets = subsets * BigInt(pts.size() - i) / BigInt(i + 1);
  if (subsets > BigInt(max_subsets)) {
    throw GridTooLarge("capture hypothesis needs " + subsets.str() + " subsets, guard is " +
                       std::to_string(max_subsets));
  }

  // Lexicographic walk over index subsets of size k.
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<RVec> chosen(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) chosen[i] = pts[idx[i]];
    if (convex_witness(chosen, y)) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pts.size() - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return true;
}

CaptureResult find_capture_cell(const std::vector<SpernerLabeling>& labelings, const RVec& y,
                                bool check_hypothesis, std::uint64_t seed, const WalkOptions& opt) {
  check_labelings(labelings);
  const int n = labelings[0].n();
  const auto m = static_cast<Coord>(labelings.size());
  if (static_cast<int>(y.size()) != n) throw ConstructionError("capture target has the wrong number of coordinates");
  if (check_hypothesis && !check_capture_hypothesis(y, m)) {
    throw HypothesisFailure("target lies in the convex hull of " + std::to_string(n - 1) + " lattice points");
  }
  RVec target;
  for (const auto& x : y) target.push_back(x / m);

  const auto map = PLMap::average(labelings);
  auto f = search(map, target, seed, opt, [&](const GridCell& c) {
    std::vector<RVec> mult;
    for (const auto& v : c.vertices()) mult.push_back(as_rvec(multiplicity_vector(labelings, v)));
    return convex_witness(mult, y);
  });

  CaptureResult r;
  r.cell = f.cell;
  r.vertices = f.cell.vertices();
  for (const auto& v : r.vertices) r.multiplicities.push_back(multiplicity_vector(labelings, v));
  r.weights = std::move(f.witness);
  r.trace = std::move(f.trace);
  r.attempts = f.attempts;
  return r;
}

// ---------------------------------------------------------------------------

std::optional<std::string> DistinctCountSpec::problem() const {
  if (n < 2) return "need at least two coordinates";
  if (k.empty()) return "need at least one labeling";
  int total = 0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] < 1 || k[j] > n) {
      return "k_" + std::to_string(j + 1) + " = " + std::to_string(k[j]) + " is outside 1.." + std::to_string(n);
    }
    total += k[j];
  }
  const int want = n - 1 + labelings();
  if (total != want) return "k sums to " + std::to_string(total) + ", expected " + std::to_string(want);
  return std::nullopt;
}

RVec DistinctCountSpec::alpha() const {
  RVec a;
  const Rational inv_m(1, labelings());
  for (int kj : k) a.push_back((Rational(kj) + inv_m - 1) / n);
  return a;
}

DistinctLabelCertificate make_beta_certificate(const std::vector<SpernerLabeling>& labelings, const GridCell& cell,
                                               const RVec& mu, const RVec& alpha) {
  const auto vs = cell.vertices();
  if (mu.size() != vs.size() || alpha.size() != labelings.size()) {
    throw ConstructionError("certificate inputs have mismatched sizes");
  }
  const auto n = static_cast<std::size_t>(cell.n());
  DistinctLabelCertificate c;
  c.mu = mu;
  c.alpha = alpha;
  c.beta.assign(n, RVec(labelings.size(), Rational(0)));
  for (std::size_t j = 0; j < labelings.size(); ++j) {
    for (std::size_t v = 0; v < vs.size(); ++v) {
      c.beta[static_cast<std::size_t>(labelings[j].label(vs[v]) - 1)][j] += mu[v];
    }
    for (std::size_t i = 0; i < n; ++i) c.beta[i][j] *= alpha[j];
  }
  c.support_counts.assign(labelings.size(), 0);
  for (std::size_t j = 0; j < labelings.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) c.support_counts[j] += c.beta[i][j] > 0 ? 1 : 0;
  }
  return c;
}

std::optional<std::string> verify_beta_certificate(const DistinctLabelCertificate& cert,
                                                   const DistinctCountSpec& spec) {
  if (auto p = spec.problem()) return "invalid spec: " + *p;
  const auto n = static_cast<std::size_t>(spec.n);
  const auto m = static_cast<std::size_t>(spec.labelings());
  if (cert.beta.size() != n || cert.alpha.size() != m || cert.support_counts.size() != m) {
    return std::string("certificate has the wrong shape");
  }
  for (const auto& row : cert.beta) {
    if (row.size() != m) return std::string("certificate has the wrong shape");
  }
  if (cert.alpha != spec.alpha()) return std::string("alpha does not match the spec");
  for (std::size_t i = 0; i < n; ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (cert.beta[i][j] < 0) return "beta[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "] is negative";
      s += cert.beta[i][j];
    }
    if (s != Rational(1, spec.n)) {
      return "row " + std::to_string(i + 1) + " sums to " + to_string(s) + ", expected 1/" + std::to_string(spec.n);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    Rational s = 0;
    int support = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s += cert.beta[i][j];
      support += cert.beta[i][j] > 0 ? 1 : 0;
    }
    if (s != cert.alpha[j]) {
      return "column " + std::to_string(j + 1) + " sums to " + to_string(s) + ", expected " + to_string(cert.alpha[j]);
    }
    if (support != cert.support_counts[j]) return "support count of labeling " + std::to_string(j + 1) + " is stale";
    if (support < spec.k[j]) {
      return "labeling " + std::to_string(j + 1) + " has support " + std::to_string(support) + " < " +
             std::to_string(spec.k[j]);
    }
  }
  return std::nullopt;
}

DistinctCountResult find_distinct_count_cell(const std::vector<SpernerLabeling>& labelings,
                                             const DistinctCountSpec& spec, std::uint64_t seed,
                                             const WalkOptions& opt) {
  check_labelings(labelings);
  if (auto p = spec.problem()) throw ConstructionError("invalid distinct-count spec: " + *p);
  if (spec.n != labelings[0].n() || spec.labelings() != static_cast<int>(labelings.size())) {
    throw ConstructionError("distinct-count spec does not match the labelings");
  }
  const auto alpha = spec.alpha();
  std::vector<PLMapPart> parts;
  for (std::size_t j = 0; j < labelings.size(); ++j) parts.push_back({labelings[j], alpha[j]});
  const PLMap map(std::move(parts), Rational(1));
  const RVec barycenter(static_cast<std::size_t>(spec.n), Rational(1, spec.n));

  auto f = search(map, std::nullopt, seed, opt, [&](const GridCell& c) -> std::optional<RVec> {
    auto mu = convex_witness(image_simplex(map, c).points, barycenter);
    if (!mu) return std::nullopt;
    if (verify_beta_certificate(make_beta_certificate(labelings, c, *mu, alpha), spec)) return std::nullopt;
    return mu;
  });

  DistinctCountResult r;
  r.cell = f.cell;
  r.certificate = make_beta_certificate(labelings, f.cell, f.witness, alpha);
  r.trace = std::move(f.trace);
  r.attempts = f.attempts;
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json capture_to_json(const CaptureResult& r) {
  nlohmann::json vs = nlohmann::json::array(), ms = nlohmann::json::array();
  for (const auto& v : r.vertices) vs.push_back(v.coords());
  for (const auto& v : r.multiplicities) ms.push_back(v.coords());
  return {{"mode", "capture"},     {"cell_vertices", std::move(vs)}, {"multiplicities", std::move(ms)},
          {"weights", rvec_json(r.weights)}, {"trace", trace_json(r.trace, r.attempts)}};
}

nlohmann::json distinct_to_json(const DistinctCountResult& r) {
  nlohmann::json vs = nlohmann::json::array(), beta = nlohmann::json::array();
  for (const auto& v : r.cell.vertices()) vs.push_back(v.coords());
  for (const auto& row : r.certificate.beta) beta.push_back(rvec_json(row));
  return {{"mode", "distinct"},
          {"cell_vertices", std::move(vs)},
          {"mu", rvec_json(r.certificate.mu)},
          {"alpha", rvec_json(r.certificate.alpha)},
          {"beta", std::move(beta)},
          {"support_counts", r.certificate.support_counts},
          {"trace", trace_json(r.trace, r.attempts)}};
}

}  // namespace rentharmony
