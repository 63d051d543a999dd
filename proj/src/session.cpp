#include "rentharmony/session.hpp"

#include "rentharmony/errors.hpp"
#include "rentharmony/suspend.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace rentharmony {

namespace {

const char* const kStates[] = {"created", "awaiting_answers", "walking", "solved", "failed"};

nlohmann::json vertex_json(const LatticePoint& v) { return v.coords(); }

LatticePoint vertex_from(const nlohmann::json& j, Coord m) { return LatticePoint(j.get<std::vector<Coord>>(), m); }

std::string roommate_name(const nlohmann::json& spec, int index) {
  if (spec.is_object() && spec.contains("name") && spec.at("name").is_string()) return spec.at("name").get<std::string>();
  return "roommate " + std::to_string(index);
}

}  // namespace

std::string to_string(SessionState s) { return kStates[static_cast<int>(s)]; }

SessionState session_state_from_string(const std::string& s) {
  for (int i = 0; i < 5; ++i) {
    if (s == kStates[i]) return static_cast<SessionState>(i);
  }
  throw ConstructionError("unknown session state '" + s + "'");
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------

HarmonyProblem Session::build_problem() const {
  return problem_from_json(spec_, [this](const nlohmann::json& spec, int roommate, const HarmonyProblem& p) {
    auto o = std::make_shared<RecordedOracle>(p.n, roommate, roommate_name(spec, roommate), p.total_rent,
                                              p.resolution());
    for (const auto& a : answers_) {
      if (a.roommate == roommate) o->record(a.vertex, a.room);
    }
    return o;
  });
}

void Session::init_from_spec() {
  const auto p = build_problem();
  n_ = p.n;
  total_ = p.total_rent;
  m_ = p.resolution();
  strategy_ = p.strategy;
  names_.clear();
  const auto& specs = spec_.at("oracles");
  for (int i = 0; i < n_ - 1; ++i) names_.push_back(roommate_name(specs.at(static_cast<std::size_t>(i)), i + 1));
  names_.push_back(spec_.value("secretive", std::string("secretive roommate")));
}

Session Session::create(std::string id, nlohmann::json spec, std::string now) {
  if (!spec.is_object()) throw ConstructionError("problem must be a JSON object");
  Session s;
  s.id_ = std::move(id);
  s.spec_ = std::move(spec);
  s.init_from_spec();
  s.created_at_ = now;
  s.updated_at_ = std::move(now);
  s.advance();
  return s;
}

void Session::advance() {
  state_ = SessionState::Walking;
  try {
    const auto sol = solve(build_problem());
    solution_ = solution_to_json(sol);
    walk_steps_ = sol.trace.steps;
    pending_.clear();
    state_ = SessionState::Solved;
  } catch (const QuerySuspended& e) {
    std::vector<Query> next;
    for (const auto& q : e.pending()) {
      auto old = std::find_if(pending_.begin(), pending_.end(),
                              [&](const Query& p) { return p.roommate == q.roommate && p.vertex == q.vertex; });
      if (old != pending_.end()) {
        next.push_back(*old);
      } else {
        next.push_back({"q" + std::to_string(next_query_++), q.roommate, q.vertex});
      }
    }
    pending_ = std::move(next);
    state_ = SessionState::AwaitingAnswers;
  } catch (const Error& e) {
    pending_.clear();
    failure_ = e.what();
    state_ = SessionState::Failed;
  }
}

const Answer& Session::submit(const std::string& query_id, int room, std::string now) {
  for (const auto& a : answers_) {
    if (a.query_id == query_id) throw Conflict("query " + query_id + " was already answered");
  }
  auto it = std::find_if(pending_.begin(), pending_.end(), [&](const Query& q) { return q.query_id == query_id; });
  if (it == pending_.end()) throw NotFound("no pending query " + query_id);
  if (state_ != SessionState::AwaitingAnswers) throw Conflict("session is " + to_string(state_));
  if (room < 1 || room > n_) throw ConstructionError("room " + std::to_string(room) + " is outside 1.." + std::to_string(n_));

  HarmonyProblem shape;
  shape.n = n_;
  shape.strategy = strategy_;
  Answer a{it->query_id, it->roommate, it->vertex, room,
           free_room_override(it->vertex, room, corner_rule_for(shape, it->roommate))};
  pending_.erase(it);
  answers_.push_back(std::move(a));
  updated_at_ = std::move(now);
  advance();
  return answers_.back();
}

std::vector<std::string> Session::roommate_names() const { return names_; }

bool Session::query_economy_ok() const {
  if (state_ != SessionState::Solved) return true;
  std::vector<std::uint64_t> per(static_cast<std::size_t>(n_) + 1, 0);
  for (const auto& a : answers_) ++per[static_cast<std::size_t>(a.roommate)];
  const std::uint64_t bound = static_cast<std::uint64_t>(n_) * std::max<std::uint64_t>(1, walk_steps_);
  return std::all_of(per.begin(), per.end(), [&](std::uint64_t c) { return c <= bound; });
}

// ---------------------------------------------------------------------------

nlohmann::json Session::to_json() const {
  nlohmann::json pending = nlohmann::json::array(), answers = nlohmann::json::array();
  for (const auto& q : pending_) {
    pending.push_back({{"query_id", q.query_id}, {"roommate", q.roommate}, {"vertex", vertex_json(q.vertex)}});
  }
  for (const auto& a : answers_) {
    answers.push_back({{"query_id", a.query_id},
                       {"roommate", a.roommate},
                       {"vertex", vertex_json(a.vertex)},
                       {"room", a.room},
                       {"override_label", a.override_label ? nlohmann::json(*a.override_label) : nlohmann::json()}});
  }
  return {{"format", 1},
          {"id", id_},
          {"spec", spec_},
          {"state", to_string(state_)},
          {"failure", failure_},
          {"pending", std::move(pending)},
          {"answers", std::move(answers)},
          {"next_query", next_query_},
          {"solution", solution_ ? *solution_ : nlohmann::json()},
          {"walk_steps", walk_steps_},
          {"created_at", created_at_},
          {"updated_at", updated_at_}};
}

Session Session::from_json(const nlohmann::json& j) {
  Session s;
  try {
    if (j.at("format").get<int>() != 1) throw ConstructionError("unsupported session format");
    s.id_ = j.at("id").get<std::string>();
    s.spec_ = j.at("spec");
    s.state_ = session_state_from_string(j.at("state").get<std::string>());
    s.failure_ = j.at("failure").get<std::string>();
    s.next_query_ = j.at("next_query").get<std::uint64_t>();
    s.walk_steps_ = j.at("walk_steps").get<std::uint64_t>();
    s.created_at_ = j.at("created_at").get<std::string>();
    s.updated_at_ = j.at("updated_at").get<std::string>();
    if (!j.at("solution").is_null()) s.solution_ = j.at("solution");
    s.init_from_spec();
    for (const auto& a : j.at("answers")) {
      std::optional<int> ov;
      if (!a.at("override_label").is_null()) ov = a.at("override_label").get<int>();
      s.answers_.push_back({a.at("query_id").get<std::string>(), a.at("roommate").get<int>(),
                            vertex_from(a.at("vertex"), s.m_), a.at("room").get<int>(), ov});
    }
    for (const auto& q : j.at("pending")) {
      s.pending_.push_back({q.at("query_id").get<std::string>(), q.at("roommate").get<int>(),
                            vertex_from(q.at("vertex"), s.m_)});
    }
    // Replays the answers once so that a bad file is caught at load time.
    s.build_problem();
  } catch (const nlohmann::json::exception& e) {
    throw ConstructionError(std::string("corrupt session snapshot: ") + e.what());
  }
  return s;
}

nlohmann::json Session::view() const {
  nlohmann::json roommates = nlohmann::json::array();
  for (int i = 0; i < n_; ++i) {
    const bool secretive = i == n_ - 1;
    nlohmann::json r{{"index", i + 1}, {"name", names_[static_cast<std::size_t>(i)]}, {"secretive", secretive}};
    if (!secretive) {
      const auto& o = spec_.at("oracles").at(static_cast<std::size_t>(i));
      const bool human = (o.is_string() && o.get<std::string>() == "session") ||
                         (o.is_object() && o.value("type", std::string()) == "session");
      r["kind"] = human ? "session" : o.value("type", std::string("model"));
    }
    roommates.push_back(std::move(r));
  }
  nlohmann::json overrides = nlohmann::json::array();
  for (const auto& a : answers_) {
    if (a.override_label) {
      overrides.push_back({{"query_id", a.query_id}, {"roommate", a.roommate}, {"answer", a.room}, {"label", *a.override_label}});
    }
  }
  nlohmann::json debug_pending = nlohmann::json::array();
  for (const auto& q : pending_) debug_pending.push_back({{"query_id", q.query_id}, {"vertex", vertex_json(q.vertex)}});
  nlohmann::json v{{"id", id_},
                   {"state", to_string(state_)},
                   {"n", n_},
                   {"total_rent_cents", floor_cents(total_)},
                   {"roommates", std::move(roommates)},
                   {"answered", answers_.size()},
                   {"pending", pending_.size()},
                   {"overrides", std::move(overrides)},
                   {"query_economy_ok", query_economy_ok()},
                   {"created_at", created_at_},
                   {"updated_at", updated_at_},
                   {"debug", {{"m", m_}, {"pending_vertices", std::move(debug_pending)}}}};
  if (state_ == SessionState::Failed) v["failure"] = failure_;
  if (solution_) {
    v["prices_cents"] = solution_->at("prices_cents");
    v["assignments"] = solution_->at("assignments");
  }
  return v;
}

nlohmann::json Session::queries_view() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& q : pending_) {
    nlohmann::json prices = nlohmann::json::array();
    const auto price = lattice_to_price(q.vertex, total_);
    for (const auto& c : price.coords()) prices.push_back(floor_cents(c));
    out.push_back({{"query_id", q.query_id},
                   {"roommate", names_[static_cast<std::size_t>(q.roommate - 1)]},
                   {"roommate_index", q.roommate},
                   {"prices_cents", std::move(prices)},
                   {"debug", {{"vertex", vertex_json(q.vertex)}}}});
  }
  return out;
}

// ---------------------------------------------------------------------------

SessionStore::SessionStore(ServiceConfig config) : config_(std::move(config)) {
  std::filesystem::create_directories(config_.dir);
}

std::filesystem::path SessionStore::path_of(const std::string& id) const { return config_.dir / (id + ".json"); }

Session SessionStore::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConstructionError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConstructionError("corrupt session file " + path.string() + ": " + e.what());
  }
  return Session::from_json(j);
}

std::vector<std::string> SessionStore::load_all() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(config_.dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> problems;
  for (const auto& f : files) {
    try {
      auto s = load_file(f);
      auto entry = std::make_shared<Entry>();
      entry->session = std::move(s);
      std::lock_guard lock(mu_);
      sessions_[entry->session.id()] = std::move(entry);
    } catch (const Error& e) {
      problems.push_back(f.string() + ": " + e.what());
    }
  }
  return problems;
}

std::string SessionStore::fresh_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(mu_);
  while (true) {
    std::ostringstream os;
    os << std::hex << gen();
    auto id = os.str();
    if (!sessions_.count(id)) return id;
  }
}

Session SessionStore::create(nlohmann::json spec) {
  if (spec.is_object() && !spec.contains("seed")) spec["seed"] = config_.default_seed;
  auto entry = std::make_shared<Entry>();
  entry->session = Session::create(fresh_id(), std::move(spec), utc_now());
  std::lock_guard elock(entry->mu);
  persist(entry->session);
  {
    std::lock_guard lock(mu_);
    sessions_[entry->session.id()] = entry;
  }
  return entry->session;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session " + id);
  return it->second;
}

Session SessionStore::get(const std::string& id) const {
  auto e = find(id);
  std::lock_guard lock(e->mu);
  return e->session;
}

std::pair<Answer, Session> SessionStore::submit(const std::string& id, const std::string& query_id, int room) {
  auto e = find(id);
  std::lock_guard lock(e->mu);
  Answer a = e->session.submit(query_id, room, utc_now());
  persist(e->session);
  return {std::move(a), e->session};
}

void SessionStore::persist(const Session& s) const {
  const auto path = path_of(s.id());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << s.to_json().dump(2) << '\n';
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void SessionStore::persist_all() const {
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, e] : sessions_) all.push_back(e);
  }
  for (const auto& e : all) {
    std::lock_guard lock(e->mu);
    persist(e->session);
  }
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace rentharmony
