#pragma once

#include "rentharmony/rational.hpp"
#include "rentharmony/simplex_core.hpp"
#include "rentharmony/suspend.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace rentharmony {

/// A roommate's answers to "which room would you take at these prices?".
/// Prices are exact; rooms are 1-based. Ties go to the lowest index.
class PreferenceOracle {
 public:
  virtual ~PreferenceOracle() = default;

  virtual int n() const = 0;
  virtual std::string name() const = 0;
  /// Throws QuerySuspended if the answer is not known yet.
  virtual int prefer(const PricePoint& prices) const = 0;
  /// Whether taking `room` at `prices` leaves the roommate without envy,
  /// up to `tolerance` in currency units. A free room is always acceptable.
  virtual bool acceptable(const PricePoint& prices, int room, const Rational& tolerance) const = 0;
  virtual nlohmann::json to_json() const = 0;
  /// Answers typed by a person. Rule-breaking answers at the boundary are
  /// overridden and flagged instead of rejected.
  virtual bool is_recorded() const { return false; }
};

using OraclePtr = std::shared_ptr<const PreferenceOracle>;

/// Lowest-index room with price 0, if any.
std::optional<int> lowest_free_room(const PricePoint& prices);

/// Utility valuation_j - price_j; the free-room rule is applied first.
class QuasiLinearModel : public PreferenceOracle {
 public:
  explicit QuasiLinearModel(RVec valuations, std::string name = "quasilinear");

  int n() const override { return static_cast<int>(valuations_.size()); }
  std::string name() const override { return name_; }
  int prefer(const PricePoint& prices) const override;
  bool acceptable(const PricePoint& prices, int room, const Rational& tolerance) const override;
  nlohmann::json to_json() const override;

  const RVec& valuations() const { return valuations_; }

 private:
  RVec valuations_;
  std::string name_;
};

/// Answers collected from a person, one per grid vertex. An unanswered vertex
/// raises QuerySuspended with (roommate, vertex). Safe to share between
/// threads.
class RecordedOracle : public PreferenceOracle {
 public:
  RecordedOracle(int n, int roommate, std::string name, Rational total, Coord resolution);

  int n() const override { return n_; }
  std::string name() const override { return name_; }
  int roommate() const { return roommate_; }
  int prefer(const PricePoint& prices) const override;
  bool acceptable(const PricePoint& prices, int room, const Rational& tolerance) const override;
  nlohmann::json to_json() const override;
  bool is_recorded() const override { return true; }

  LatticePoint vertex_of(const PricePoint& prices) const;
  /// Throws ConstructionError on a room out of range or a second answer for
  /// the same vertex.
  void record(const LatticePoint& v, int room);
  std::optional<int> answer_at(const LatticePoint& v) const;
  std::map<LatticePoint, int> answers() const;

 private:
  int n_;
  int roommate_;
  std::string name_;
  Rational total_;
  Coord m_;
  mutable std::mutex mu_;
  std::map<LatticePoint, int> answers_;
};

/// `{type: "quasilinear", valuations: [cents...]}`. Session specs are
/// handled by the session layer.
OraclePtr oracle_from_json(const nlohmann::json& spec, int n);

struct ConditionReport {
  int samples = 0;
  int condition1_failures = 0;  // no valid room returned
  int condition2_failures = 0;  // a free room existed but was not chosen
  int one_cent_flips = 0;       // answer changed under a one-cent price move
  std::vector<std::string> failures;  // first few, human readable

  bool ok() const { return condition1_failures == 0 && condition2_failures == 0; }
};

/// Random audit on prices in whole cents summing to `total_cents`. Roughly a
/// third of the samples have at least one free room.
ConditionReport validate_conditions(const PreferenceOracle& model, std::int64_t total_cents, int samples,
                                    std::uint64_t seed);

}  // namespace rentharmony
