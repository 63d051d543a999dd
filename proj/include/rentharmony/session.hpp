#pragma once

#include "rentharmony/harmony.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace rentharmony {

enum class SessionState { Created, AwaitingAnswers, Walking, Solved, Failed };

std::string to_string(SessionState s);
SessionState session_state_from_string(const std::string& s);

struct Query {
  std::string query_id;
  int roommate = 0;  // 1-based position in the problem's oracle list
  LatticePoint vertex;
};

struct Answer {
  std::string query_id;
  int roommate = 0;
  LatticePoint vertex;
  int room = 0;
  std::optional<int> override_label;  // set when the free-room rule replaced the answer
};

/// A live elicitation. The walk is replayed from the start on every advance,
/// with the recorded answers standing in for the humans.
class Session {
 public:
  /// Parses `spec` (a problem JSON) and runs the walk until it needs answers.
  /// Throws ConstructionError or Unsupported for a bad spec.
  static Session create(std::string id, nlohmann::json spec, std::string now);
  /// Rebuilds a session from its snapshot without re-running the walk.
  static Session from_json(const nlohmann::json& j);
  /// Canonical snapshot: load followed by to_json gives the same document.
  nlohmann::json to_json() const;

  /// Records an answer and advances. Throws NotFound for an unknown or
  /// superseded query, Conflict for a query already answered and
  /// ConstructionError for a room outside 1..n.
  const Answer& submit(const std::string& query_id, int room, std::string now);

  const std::string& id() const { return id_; }
  SessionState state() const { return state_; }
  const std::vector<Query>& pending() const { return pending_; }
  const std::vector<Answer>& answers() const { return answers_; }
  const std::optional<nlohmann::json>& solution() const { return solution_; }
  const std::string& failure() const { return failure_; }
  const nlohmann::json& spec() const { return spec_; }
  int n() const { return n_; }
  std::vector<std::string> roommate_names() const;

  /// Human answers per roommate stay within n times the walk length.
  bool query_economy_ok() const;

  /// Public description; lattice points appear only under "debug".
  nlohmann::json view() const;
  nlohmann::json queries_view() const;

 private:
  void advance();
  HarmonyProblem build_problem() const;
  void init_from_spec();

  std::string id_;
  nlohmann::json spec_;
  int n_ = 0;
  Rational total_;
  Coord m_ = 0;
  Strategy strategy_ = Strategy::General;
  std::vector<std::string> names_;   // per roommate, plus the secretive one last
  SessionState state_ = SessionState::Created;
  std::vector<Query> pending_;
  std::vector<Answer> answers_;
  std::uint64_t next_query_ = 1;
  std::optional<nlohmann::json> solution_;
  std::uint64_t walk_steps_ = 0;
  std::string failure_;
  std::string created_at_;
  std::string updated_at_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class Conflict : public Error {
 public:
  using Error::Error;
};

struct ServiceConfig {
  std::filesystem::path dir = "sessions";
  std::uint64_t default_seed = 0;
  std::vector<std::string> cors_allowlist;
};

/// Sessions kept in memory and mirrored to one JSON file each under
/// `config.dir`. Mutations of one session are serialized; reads get a copy
/// taken under the same lock.
class SessionStore {
 public:
  explicit SessionStore(ServiceConfig config);

  /// Loads every *.json file of the directory; returns one message per file
  /// that could not be loaded.
  std::vector<std::string> load_all();

  Session create(nlohmann::json spec);
  Session get(const std::string& id) const;
  /// The answer as recorded plus the session after advancing.
  std::pair<Answer, Session> submit(const std::string& id, const std::string& query_id, int room);
  void persist_all() const;
  std::size_t size() const;
  const ServiceConfig& config() const { return config_; }

  std::filesystem::path path_of(const std::string& id) const;
  /// Reads one snapshot file; throws ConstructionError when it is corrupt.
  static Session load_file(const std::filesystem::path& path);

 private:
  struct Entry {
    mutable std::mutex mu;
    Session session;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist(const Session& s) const;
  std::string fresh_id();

  ServiceConfig config_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

/// UTC timestamp, ISO 8601 with seconds.
std::string utc_now();

}  // namespace rentharmony
