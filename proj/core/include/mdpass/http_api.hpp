#pragma once

#include <memory>
#include <string>
#include <utility>

#include "mdpass/auth_service.hpp"

namespace mdpass::auth {

/// Splits "host:port". Throws Error(kValidation) on a malformed address.
std::pair<std::string, int> parse_bind_address(const std::string& address);

/// JSON-over-HTTP front end for an AuthService:
///
///   POST /api/orgs                          {name, services[]}
///   POST /api/orgs/{org_id}/grants          {service, privileges[]}
///   POST /api/orgs/{org_id}/credentials     {user_id, spec[], values[]}
///   POST /api/challenges                    {org_id, user_id}
///   POST /api/authenticate                  {challenge_id, values[]}
///   GET  /api/services/{service}?privilege= (Authorization: Bearer <token>)
///   GET  /api/probability?inputs=&options=
///   GET  /api/health
///
/// Values are {kind:"text", text} or {kind:"image", pgm_base64}.
class HttpServer {
 public:
  explicit HttpServer(AuthService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks an ephemeral port. Returns the bound port; throws
  /// Error(kIo) if binding fails.
  int bind(const std::string& host, int port);

  /// Serves on the bound socket until stop().
  void listen();

  /// listen() on a background thread; returns once the server accepts.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mdpass::auth
