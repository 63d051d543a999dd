#pragma once

#include "rentharmony/session.hpp"

#include <memory>
#include <string>

namespace rentharmony {

/// JSON API over a SessionStore:
///   GET  /health
///   POST /sessions                  spec -> 201 view
///   GET  /sessions/{id}             view
///   GET  /sessions/{id}/queries     pending queries
///   POST /sessions/{id}/answers     {query_id, room} -> view + answer
///   GET  /sessions/{id}/result      solution, 409 until solved
class HttpService {
 public:
  explicit HttpService(SessionStore& store);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the port, or -1.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop() is called.
  bool run();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rentharmony
