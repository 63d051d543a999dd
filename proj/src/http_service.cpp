#include "rentharmony/http_service.hpp"

#include "rentharmony/errors.hpp"

#include <httplib.h>

#include <algorithm>

namespace rentharmony {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

nlohmann::json answer_json(const Answer& a) {
  nlohmann::json j{{"query_id", a.query_id}, {"room", a.room}, {"overridden", a.override_label.has_value()}};
  if (a.override_label) j["recorded_room"] = *a.override_label;
  return j;
}

}  // namespace

struct HttpService::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) {
    // SO_REUSEADDR only: a second server on a busy port must fail to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });
  }

  // Maps library errors onto status codes.
  template <class F>
  void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const NotFound& e) {
      send_error(res, 404, e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, e.what());
    } catch (const ConstructionError& e) {
      send_error(res, 400, e.what());
    } catch (const Unsupported& e) {
      send_error(res, 400, e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, std::string("malformed request: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  bool origin_allowed(const std::string& origin) const {
    const auto& allow = store.config().cors_allowlist;
    return std::find(allow.begin(), allow.end(), "*") != allow.end() ||
           std::find(allow.begin(), allow.end(), origin) != allow.end();
  }

  void routes() {
    server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      if (!origin.empty() && origin_allowed(origin)) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Vary", "Origin");
      }
    });
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}, {"version", RENTHARMONY_VERSION}, {"sessions", store.size()}});
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto spec = nlohmann::json::parse(req.body);
        send_json(res, 201, store.create(spec).view());
      });
    });

    server.Get("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, store.get(req.path_params.at("id")).view()); });
    });

    server.Get("/sessions/:id/queries", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto s = store.get(req.path_params.at("id"));
        send_json(res, 200, {{"id", s.id()}, {"state", to_string(s.state())}, {"queries", s.queries_view()}});
      });
    });

    server.Post("/sessions/:id/answers", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = nlohmann::json::parse(req.body);
        const auto [a, s] = store.submit(req.path_params.at("id"), body.at("query_id").get<std::string>(),
                                         body.at("room").get<int>());
        auto view = s.view();
        view["answer"] = answer_json(a);
        send_json(res, 200, view);
      });
    });

    server.Get("/sessions/:id/result", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto s = store.get(req.path_params.at("id"));
        if (!s.solution()) {
          nlohmann::json body{{"error", "session is " + to_string(s.state())}, {"state", to_string(s.state())}};
          if (s.state() == SessionState::Failed) body["failure"] = s.failure();
          send_json(res, 409, body);
          return;
        }
        send_json(res, 200, *s.solution());
      });
    });
  }
};

HttpService::HttpService(SessionStore& store) : impl_(std::make_unique<Impl>(store)) { impl_->routes(); }

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::run() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpService::running() const { return impl_->server.is_running(); }

}  // namespace rentharmony
