#include "mdpass/http_api.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "json_codec.hpp"
#include "mdpass/error.hpp"
#include "mdpass/hex.hpp"
#include "mdpass/pgm.hpp"
#include "mdpass/probability.hpp"

namespace mdpass::auth {
namespace {

using nlohmann::json;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownOrg:
    case ErrorCode::kUnknownUser: return 404;
    case ErrorCode::kDuplicateUser: return 409;
    case ErrorCode::kAuthFailed: return 401;
    case ErrorCode::kChallengeExpired:
    case ErrorCode::kChallengeConsumed: return 410;
    case ErrorCode::kIo:
    case ErrorCode::kSchemaVersion:
    case ErrorCode::kCorruptLog: return 500;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  // Authentication failures carry no detail so every cause looks the same.
  if (e.code() == ErrorCode::kAuthFailed) {
    send_json(res, 401, {{"error", "auth_failed"}});
    return;
  }
  send_json(res, status_for(e.code()), {{"error", std::string(to_string(e.code()))}, {"message", e.what()}});
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::kValidation, "request body must be a JSON object");
  }
  return body;
}

std::string string_field(const json& body, const char* name) {
  if (!body.contains(name) || !body[name].is_string()) {
    throw Error(ErrorCode::kValidation, std::string("missing string field '") + name + "'");
  }
  return body[name].get<std::string>();
}

std::vector<std::string> string_list(const json& body, const char* name) {
  if (!body.contains(name) || !body[name].is_array()) {
    throw Error(ErrorCode::kValidation, std::string("missing array field '") + name + "'");
  }
  std::vector<std::string> out;
  for (const auto& v : body[name]) {
    if (!v.is_string()) throw Error(ErrorCode::kValidation, std::string(name) + " must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<DimensionValue> decode_values(const json& body) {
  if (!body.contains("values") || !body["values"].is_array()) {
    throw Error(ErrorCode::kValidation, "missing array field 'values'");
  }
  std::vector<DimensionValue> values;
  for (const auto& v : body["values"]) {
    if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string()) {
      throw Error(ErrorCode::kValidation, "each value needs a kind");
    }
    const std::string kind = v["kind"].get<std::string>();
    if (kind == "text") {
      values.push_back(DimensionValue::text(string_field(v, "text")));
    } else if (kind == "image") {
      const auto bytes = base64_decode(string_field(v, "pgm_base64"));
      if (!bytes) throw Error(ErrorCode::kInvalidImage, "pgm_base64 is not valid base64");
      values.push_back(DimensionValue::image(parse_pgm(*bytes)));
    } else {
      throw Error(ErrorCode::kValidation, "unknown value kind '" + kind + "'");
    }
  }
  return values;
}

std::vector<std::uint64_t> parse_count_list(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data() + pos, text.data() + comma, v);
    if (comma == pos || ec != std::errc{} || end != text.data() + comma) {
      throw Error(ErrorCode::kInvalidQuery, std::string("bad ") + what + " '" + text + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

json challenge_json(const ChallengeSession& c) {
  return {{"challenge_id", c.challenge_id},
          {"org_id", c.org_id},
          {"user_id", c.user_id},
          {"issued_at", to_unix(c.issued_at)},
          {"expires_at", to_unix(c.expires_at)},
          {"dimensions", detail::spec_to_json(c.dimensions)}};
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  };
}

}  // namespace

std::pair<std::string, int> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::kValidation, "bind address must be host:port, got '" + address + "'");
  }
  int port = -1;
  const char* first = address.data() + colon + 1;
  const char* last = address.data() + address.size();
  const auto [end, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || end != last || port < 0 || port > 65535) {
    throw Error(ErrorCode::kValidation, "bad port in '" + address + "'");
  }
  return {address.substr(0, colon), port};
}

struct HttpServer::Impl {
  AuthService& service;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  explicit Impl(AuthService& s) : service(s) { routes(); }

  void routes() {
    server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/api/orgs", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const OrgRecord org = service.enroll_org(string_field(body, "name"), string_list(body, "services"));
      send_json(res, 201, {{"org_id", org.org_id},
                           {"name", org.name},
                           {"services", org.agreed_services},
                           {"created_at", org.created_at}});
    }));

    server.Post(R"(/api/orgs/([^/]+)/grants)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  const ServiceGrant g = service.grant(req.matches[1], string_field(body, "service"),
                                                       string_list(body, "privileges"));
                  send_json(res, 201, {{"org_id", g.org_id},
                                       {"service", g.service},
                                       {"privileges", g.privileges}});
                }));

    server.Post(R"(/api/orgs/([^/]+)/credentials)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  if (!body.contains("spec")) throw Error(ErrorCode::kValidation, "missing field 'spec'");
                  const CredentialSpec spec = detail::spec_from_json(body["spec"]);
                  const auto values = decode_values(body);
                  const StoredCredential cred = service.enroll_credential(
                      req.matches[1], string_field(body, "user_id"), spec, values);
                  send_json(res, 201, {{"org_id", cred.org_id},
                                       {"user_id", cred.user_id},
                                       {"created_at", cred.created_at},
                                       {"dimensions", detail::spec_to_json(cred.spec.dimensions())}});
                }));

    server.Post("/api/challenges", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const ChallengeSession c =
          service.issue_challenge(string_field(body, "org_id"), string_field(body, "user_id"));
      send_json(res, 201, challenge_json(c));
    }));

    server.Post("/api/authenticate", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const std::string challenge_id = string_field(body, "challenge_id");
      std::vector<DimensionValue> values;
      try {
        values = decode_values(body);
      } catch (const Error&) {
        service.reject_attempt(challenge_id);
      }
      const SessionToken token = service.authenticate(challenge_id, values);
      send_json(res, 200, {{"token", token.token},
                           {"org_id", token.org_id},
                           {"user_id", token.user_id},
                           {"expires_at", to_unix(token.expires_at)}});
    }));

    server.Get(R"(/api/services/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 std::string token;
                 const std::string header = req.get_header_value("Authorization");
                 constexpr std::string_view kBearer = "Bearer ";
                 if (header.starts_with(kBearer)) token = header.substr(kBearer.size());
                 const AuthzDecision d =
                     service.authorize(token, req.matches[1], req.get_param_value("privilege"));
                 if (d.allow) {
                   send_json(res, 200, {{"allow", true}});
                 } else {
                   send_json(res, 403, {{"allow", false}, {"reason", std::string(to_string(d.reason))}});
                 }
               }));

    server.Get("/api/probability", guarded([](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("inputs") || !req.has_param("options")) {
        throw Error(ErrorCode::kInvalidQuery, "inputs and options are required");
      }
      const auto inputs = parse_count_list(req.get_param_value("inputs"), "inputs");
      if (inputs.size() != 1 || inputs[0] > prob::ProbabilityQuery::kMaxInputs) {
        throw Error(ErrorCode::kInvalidQuery, "inputs must be a single count up to 4096");
      }
      const auto query = prob::ProbabilityQuery::broadcast(
          inputs[0], parse_count_list(req.get_param_value("options"), "options"));
      res.status = 200;
      res.set_content(prob::report_json(query, prob::hack_probability(query)), "application/json");
    }));
  }
};

HttpServer::HttpServer(AuthService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return impl_->port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace mdpass::auth
