#include "doctest.h"

#include "rentharmony/http_service.hpp"

#include <httplib.h>

#include <thread>

using namespace rentharmony;
namespace fs = std::filesystem;

namespace {

struct Running {
  SessionStore store;
  HttpService service;
  int port = -1;
  std::thread th;

  explicit Running(ServiceConfig c) : store(std::move(c)), service(store) {
    store.load_all();
    port = service.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    th = std::thread([this] { service.run(); });
    while (!service.running()) std::this_thread::yield();
  }
  ~Running() {
    service.stop();
    th.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

ServiceConfig config(const fs::path& dir) {
  ServiceConfig c;
  c.dir = dir;
  c.cors_allowlist = {"http://localhost:5173"};
  return c;
}

const nlohmann::json kSpec = {{"n", 3},
                              {"total_rent_cents", 3000},
                              {"m", 24},
                              {"seed", 3},
                              {"oracles", {{{"type", "session"}, {"name", "ann"}}, "session"}}};

int human_answer(const nlohmann::json& q) {
  // Prefers the cheapest room, lowest index on ties.
  const auto& p = q.at("prices_cents");
  int best = 0;
  for (int j = 1; j < static_cast<int>(p.size()); ++j) {
    if (p[static_cast<std::size_t>(j)].get<long>() < p[static_cast<std::size_t>(best)].get<long>()) best = j;
  }
  return best + 1;
}

// Answers through the API until solved or `limit` answers are given.
nlohmann::json answer_all(httplib::Client& c, const std::string& id, int limit = 1 << 30) {
  nlohmann::json view;
  for (int given = 0; given < limit; ++given) {
    auto qs = c.Get("/sessions/" + id + "/queries");
    REQUIRE(qs);
    auto body = nlohmann::json::parse(qs->body);
    if (body["state"] != "awaiting_answers") break;
    const auto& q = body["queries"][0];
    nlohmann::json a{{"query_id", q["query_id"]}, {"room", human_answer(q)}};
    auto r = c.Post("/sessions/" + id + "/answers", a.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 200);
    view = nlohmann::json::parse(r->body);
  }
  return view;
}

}  // namespace

TEST_CASE("health and error statuses") {
  const auto dir = fs::temp_directory_path() / "rh_http_errors";
  fs::remove_all(dir);
  {
    Running srv(config(dir));
    auto c = srv.client();
    auto h = c.Get("/health");
    REQUIRE(h);
    CHECK(h->status == 200);
    auto hj = nlohmann::json::parse(h->body);
    CHECK(hj["status"] == "ok");
    CHECK(hj["version"] == RENTHARMONY_VERSION);

    CHECK(c.Post("/sessions", "{oops", "application/json")->status == 400);
    CHECK(c.Post("/sessions", R"({"n": 3})", "application/json")->status == 400);
    CHECK(c.Get("/sessions/missing")->status == 404);
    CHECK(c.Get("/sessions/missing/result")->status == 404);

    auto created = c.Post("/sessions", kSpec.dump(), "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const auto id = nlohmann::json::parse(created->body)["id"].get<std::string>();
    CHECK(c.Get("/sessions/" + id + "/result")->status == 409);
    CHECK(c.Post("/sessions/" + id + "/answers", R"({"query_id": "q999", "room": 1})", "application/json")->status == 404);
    CHECK(c.Post("/sessions/" + id + "/answers", R"({"room": 1})", "application/json")->status == 400);
    CHECK(c.Post("/sessions/" + id + "/answers", R"({"query_id": "q1", "room": 9})", "application/json")->status == 400);
    CHECK(c.Post("/sessions/" + id + "/answers", R"({"query_id": "q1", "room": 1})", "application/json")->status == 200);
    CHECK(c.Post("/sessions/" + id + "/answers", R"({"query_id": "q1", "room": 1})", "application/json")->status == 409);

    httplib::Headers allowed{{"Origin", "http://localhost:5173"}}, other{{"Origin", "http://evil.example"}};
    CHECK(c.Get("/health", allowed)->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
    CHECK_FALSE(c.Get("/health", other)->has_header("Access-Control-Allow-Origin"));
  }
  fs::remove_all(dir);
}

TEST_CASE("full session over HTTP, with a restart in the middle") {
  const auto dir_a = fs::temp_directory_path() / "rh_http_a";
  const auto dir_b = fs::temp_directory_path() / "rh_http_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  std::string straight;
  {
    Running srv(config(dir_a));
    auto c = srv.client();
    const auto id = nlohmann::json::parse(c.Post("/sessions", kSpec.dump(), "application/json")->body)["id"].get<std::string>();
    auto view = answer_all(c, id);
    CHECK(view["state"] == "solved");
    CHECK(view["query_economy_ok"] == true);
    auto res = c.Get("/sessions/" + id + "/result");
    REQUIRE(res->status == 200);
    straight = res->body;
    auto sol = nlohmann::json::parse(straight);
    CHECK(sol["assignments"].size() == 3);
    CHECK(sol["prices_cents"] == view["prices_cents"]);
  }

  std::string id;
  {
    Running srv(config(dir_b));
    auto c = srv.client();
    id = nlohmann::json::parse(c.Post("/sessions", kSpec.dump(), "application/json")->body)["id"].get<std::string>();
    answer_all(c, id, 3);
  }
  {
    Running srv(config(dir_b));
    auto c = srv.client();
    auto view = nlohmann::json::parse(c.Get("/sessions/" + id)->body);
    CHECK(view["answered"] == 3);
    answer_all(c, id);
    auto res = c.Get("/sessions/" + id + "/result");
    REQUIRE(res->status == 200);
    CHECK(res->body == straight);
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}
