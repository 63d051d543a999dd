#include "rentharmony/pathfollow.hpp"

#include "rentharmony/errors.hpp"

#include <algorithm>
#include <random>

namespace rentharmony {

RVec BarycenterChain::perturbed(int k) const {
  RVec out = points.at(static_cast<std::size_t>(k - 1));
  const RVec& d = deltas.at(static_cast<std::size_t>(k - 1));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  return out;
}

BarycenterChain make_chain(int n, std::uint64_t seed, const Rational& epsilon) {
  if (n < 2) throw ConstructionError("chain needs n >= 2");
  if (epsilon < 0) throw ConstructionError("chain epsilon must be nonnegative");
  constexpr int kBits = 20;
  const Rational scale = epsilon / 2 / Rational(BigInt(1) << kBits);

  BarycenterChain c;
  c.epsilon = epsilon;
  c.seed = seed;
  std::mt19937_64 gen(seed);
  for (int k = 1; k <= n; ++k) {
    RVec b(static_cast<std::size_t>(n));
    for (int i = 0; i < k; ++i) b[static_cast<std::size_t>(i)] = Rational(1, k);
    c.points.push_back(b);

    RVec d(static_cast<std::size_t>(n));
    if (k > 1) {
      std::vector<long> r(static_cast<std::size_t>(k));
      long total = 0;
      for (auto& x : r) {
        x = static_cast<long>(gen() >> (64 - kBits));
        total += x;
      }
      const Rational mean(total, k);
      for (int i = 0; i < k; ++i) d[static_cast<std::size_t>(i)] = scale * (Rational(r[static_cast<std::size_t>(i)]) - mean);
    }
    c.deltas.push_back(d);
  }
  return c;
}

BarycenterChain with_final_target(BarycenterChain chain, RVec target) {
  const std::size_t n = chain.points.size();
  if (target.size() != n || sum(target) != 1) throw ConstructionError("final target must be a point of the simplex");
  Rational lowest = target[0];
  for (const auto& x : target) {
    if (x <= 0) throw ConstructionError("final target must lie in the open simplex");
    lowest = std::min(lowest, x);
  }
  // Rescale δ_n so the perturbed target stays well inside the simplex.
  const Rational shrink = std::min(Rational(1), Rational(lowest * static_cast<long>(n)));
  for (auto& d : chain.deltas.back()) d *= shrink;
  chain.points.back() = std::move(target);
  return chain;
}

Rational default_epsilon(int n) { return Rational(1, 8 * n); }

// ---------------------------------------------------------------------------

std::optional<bool> HitCache::find(int level, bool segment, const std::vector<Signature>& key) const {
  auto it = entries_.find({level, segment, key});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void HitCache::store(int level, bool segment, std::vector<Signature> key, bool value) {
  entries_.emplace(std::make_tuple(level, segment, std::move(key)), value);
}

namespace {

std::vector<RVec> images_of(const PLMap& map, const std::vector<Signature>& key) {
  std::vector<RVec> out;
  out.reserve(key.size());
  for (const auto& s : key) out.push_back(map.image_of(s));
  return out;
}

// Signature set of the chosen vertices, sorted and deduplicated.
std::vector<Signature> key_of(const std::vector<Signature>& sigs, std::size_t skip) {
  std::vector<Signature> key;
  key.reserve(sigs.size());
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    if (i != skip) key.push_back(sigs[i]);
  }
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  return key;
}

class DoorFinder {
 public:
  DoorFinder(const PLMap& map, const BarycenterChain& chain, HitCache* cache)
      : map_(map), chain_(chain), cache_(cache ? cache : &local_) {
    for (int k = 1; k <= chain.n(); ++k) targets_.push_back(chain.perturbed(k));
  }

  std::vector<Door> doors(const WalkNode& node) {
    const int k = node.level;
    const int n = map_.n();
    const auto sigs = map_.signatures(node.cell.vertices());
    std::vector<Door> out;
    if (k >= 2) {
      const Segment seg{targets_[static_cast<std::size_t>(k - 2)], targets_[static_cast<std::size_t>(k - 1)]};
      for (int i = 0; i <= node.cell.dim(); ++i) {
        if (!test(k, true, key_of(sigs, static_cast<std::size_t>(i)), &seg)) continue;
        Door d{make_face(node.cell.facet_vertices(i)), std::nullopt};
        if (auto low = node.cell.facet_in_lower_face(i)) {
          d.to = std::move(low);
        } else if (auto nb = node.cell.neighbor_through_facet(i)) {
          d.to = std::move(nb);
        } else {
          throw InternalInconsistency("walk: segment meets the image of boundary facet of " +
                                      to_string(node.cell) + "; labeling is not face-preserving");
        }
        out.push_back(std::move(d));
      }
    }
    if (test(k, false, key_of(sigs, sigs.size()), nullptr)) {
      Door d{make_face(node.cell.vertices()), std::nullopt};
      if (k < n) d.to = node.cell.coface_in_upper_face();
      out.push_back(std::move(d));
    }
    return out;
  }

 private:
  // segment: does the segment meet conv(key images); otherwise: does b'_k lie in it.
  bool test(int k, bool segment, std::vector<Signature> key, const Segment* seg) {
    if (auto hit = cache_->find(k, segment, key)) return *hit;
    auto pts = images_of(map_, key);
    bool value = segment ? segment_intersects(pts, *seg)
                         : convex_witness(pts, targets_[static_cast<std::size_t>(k - 1)]).has_value();
    cache_->store(k, segment, std::move(key), value);
    return value;
  }

  const PLMap& map_;
  const BarycenterChain& chain_;
  HitCache local_;
  HitCache* cache_;
  std::vector<RVec> targets_;
};

}  // namespace

std::vector<Door> node_doors(const PLMap& map, const BarycenterChain& chain, const WalkNode& node,
                             HitCache* cache) {
  DoorFinder f(map, chain, cache);
  return f.doors(node);
}

WalkResult walk_once(const PLMap& map, const BarycenterChain& chain, const WalkOptions& opt, HitCache* cache) {
  const int n = map.n();
  if (chain.n() != n) throw ConstructionError("chain and map dimensions differ");
  DoorFinder finder(map, chain, cache);

  WalkResult res;
  res.chain = chain;
  WalkNode node{1, GridCell::start_vertex(n, map.resolution()), std::nullopt};
  auto record = [&](const WalkNode& nd) {
    if (res.trace.nodes.size() < opt.trace_limit) {
      res.trace.nodes.push_back(nd);
    } else {
      res.trace.truncated = true;
    }
  };

  for (;;) {
    record(node);
    if (++res.trace.steps > opt.budget) {
      throw BudgetExceeded("walk exceeded its budget of " + std::to_string(opt.budget) + " steps at " +
                           to_string(node.cell));
    }
    auto doors = finder.doors(node);
    if (node.entered_through) {
      auto it = std::find_if(doors.begin(), doors.end(), [&](const Door& d) { return d.face == *node.entered_through; });
      if (it == doors.end()) {
        throw DegeneracySignal("walk: entry door of " + to_string(node.cell) + " is not a door");
      }
      doors.erase(it);
    }
    if (doors.size() != 1) {
      throw DegeneracySignal("walk: node " + to_string(node.cell) + " at level " + std::to_string(node.level) +
                             " has " + std::to_string(doors.size()) + " exits");
    }
    Door& d = doors.front();
    if (!d.to) {
      res.cell = node.cell;
      res.trace.queries_made = map.queries();
      return res;
    }
    const int level = d.to->dim() + 1;
    node = WalkNode{level, std::move(*d.to), std::move(d.face)};
  }
}

namespace {

WalkResult with_retries(const PLMap& map, const std::function<BarycenterChain(int)>& chain_for,
                        const WalkOptions& opt) {
  for (int attempt = 0;; ++attempt) {
    try {
      auto r = walk_once(map, chain_for(attempt), opt);
      r.trace.reperturbations = attempt;
      return r;
    } catch (const DegeneracySignal&) {
      if (attempt + 1 >= opt.max_attempts) throw;
    }
  }
}

}  // namespace

WalkResult walk_to_barycenter(const PLMap& map, std::uint64_t seed, const Rational& epsilon,
                              const WalkOptions& opt) {
  return with_retries(
      map,
      [&](int a) { return make_chain(map.n(), seed + static_cast<std::uint64_t>(a), epsilon / Rational(BigInt(1) << a)); },
      opt);
}

WalkResult walk_to_target(const PLMap& map, const RVec& target, std::uint64_t seed, const Rational& epsilon,
                          const WalkOptions& opt) {
  return with_retries(
      map,
      [&](int a) {
        return with_final_target(
            make_chain(map.n(), seed + static_cast<std::uint64_t>(a), epsilon / Rational(BigInt(1) << a)), target);
      },
      opt);
}

nlohmann::json node_to_json(const WalkNode& node) {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : node.cell.vertices()) vs.push_back(v.coords());
  nlohmann::json j{{"level", node.level}, {"dim", node.cell.dim()}, {"vertices", std::move(vs)}};
  if (node.entered_through) {
    nlohmann::json door = nlohmann::json::array();
    for (const auto& v : node.entered_through->vertices) door.push_back(v.coords());
    j["entered_through"] = std::move(door);
  } else {
    j["entered_through"] = nullptr;
  }
  return j;
}

void write_trace_jsonl(std::ostream& os, const WalkTrace& trace) {
  for (const auto& n : trace.nodes) os << node_to_json(n).dump() << '\n';
}

}  // namespace rentharmony
