#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <pthread.h>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "mdpass/auth_service.hpp"
#include "mdpass/error.hpp"
#include "mdpass/hex.hpp"
#include "mdpass/http_api.hpp"
#include "mdpass/pgm.hpp"

namespace mdpass::cli {
namespace {

using nlohmann::json;

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-2xx answer from the service.
struct ServiceError : std::runtime_error {
  int status;
  json body;
  ServiceError(int s, json b) : std::runtime_error(b.value("error", "http " + std::to_string(s))), status(s), body(std::move(b)) {}
};

class ApiClient {
 public:
  explicit ApiClient(const std::string& bind) {
    const auto [host, port] = auth::parse_bind_address(bind);
    client_ = std::make_unique<httplib::Client>(host, port);
    client_->set_connection_timeout(std::chrono::seconds(5));
    client_->set_read_timeout(std::chrono::seconds(30));
  }

  json post(const std::string& path, const json& body) {
    return check(client_->Post(path, body.dump(), "application/json"), path);
  }

  json get(const std::string& path, const httplib::Headers& headers = {}) {
    return check(client_->Get(path, headers), path);
  }

 private:
  static json check(const httplib::Result& res, const std::string& path) {
    if (!res) throw TransportError(path + ": " + httplib::to_string(res.error()));
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) body = json::object();
    if (res->status >= 500) throw TransportError(path + ": server error " + std::to_string(res->status));
    if (res->status < 200 || res->status >= 300) throw ServiceError(res->status, body);
    return body;
  }

  std::unique_ptr<httplib::Client> client_;
};

json value_json(const DimArg& dim) {
  if (dim.kind == DimensionKind::kText) return {{"kind", "text"}, {"text", dim.value}};
  std::ifstream in(dim.value, std::ios::binary);
  if (!in) throw UsageError("cannot read image '" + dim.value + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {{"kind", "image"}, {"pgm_base64", base64_encode(bytes)}};
}

std::vector<DimArg> parse_dims(const std::vector<std::string>& raw) {
  std::vector<DimArg> dims;
  for (std::size_t i = 0; i < raw.size(); ++i) dims.push_back(parse_dim(raw[i], i));
  return dims;
}

json values_json(const std::vector<DimArg>& dims) {
  json values = json::array();
  for (const auto& d : dims) values.push_back(value_json(d));
  return values;
}

void print(const GlobalOptions& global, const json& j, const std::string& human) {
  if (global.output == OutputMode::kHuman) {
    std::cout << human << "\n";
  } else {
    std::cout << j.dump() << "\n";
  }
}

template <typename Fn>
void client_guarded(const GlobalOptions& global, int& exit_code, Fn&& fn) {
  try {
    exit_code = fn();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = kUsage;
  } catch (const TransportError& e) {
    std::cerr << "error: transport: " << e.what() << "\n";
    exit_code = kTransport;
  } catch (const ServiceError& e) {
    if (global.output == OutputMode::kHuman) {
      std::cerr << e.what();
      if (e.body.contains("message")) std::cerr << ": " << e.body["message"].get<std::string>();
      std::cerr << "\n";
    } else {
      std::cout << e.body.dump() << "\n";
    }
    exit_code = kNegative;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    exit_code = kUsage;
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = s.find(',', pos);
    out.push_back(s.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

void register_serve(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand("serve", "Run the authentication service (uses --bind and --data)");
  cmd->callback([&global, &exit_code] {
    try {
      // Signals are collected by a dedicated thread; block them everywhere else.
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);

      auth::AuthServiceOptions options;
      if (!global.data.empty()) options.store_path = global.data;
      auth::AuthService service(options);
      for (const auto& w : service.load_warnings()) std::cerr << "warning: " << w << "\n";
      if (global.data.empty()) std::cerr << "warning: no --data / MDPASS_DATA; state is in memory only\n";

      auth::HttpServer server(service);
      const auto [host, port] = auth::parse_bind_address(global.bind);
      const int bound = server.bind(host, port);
      std::cout << "listening on " << host << ":" << bound << std::endl;

      std::jthread waiter([&server, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
      });
      server.listen();
      pthread_kill(waiter.native_handle(), SIGTERM);
      exit_code = kOk;
    } catch (const Error& e) {
      std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
      exit_code = e.code() == ErrorCode::kIo ? kTransport : kUsage;
    }
  });
}

void register_enroll(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand(
      "enroll",
      "Enroll a multi-dimensional credential with a running service.\n"
      "Dimensions are given in order as --dim KIND[:ID[:OPTIONS]]=VALUE, e.g.\n"
      "  --dim text:name:100=Acme --dim image:logo:100=logo.pgm");
  struct Args {
    std::string org_id;
    std::string org_name;
    std::string services = "SaaS";
    std::string user;
    std::vector<std::string> dims;
  };
  auto args = std::make_shared<Args>();
  auto* org_id = cmd->add_option("--org-id", args->org_id, "Existing organization id");
  cmd->add_option("--org-name", args->org_name, "Create (or reuse) an organization by name")->excludes(org_id);
  cmd->add_option("--services", args->services, "Agreed services for --org-name, comma separated")
      ->capture_default_str();
  cmd->add_option("--user", args->user, "User id")->required();
  cmd->add_option("--dim", args->dims, "KIND[:ID[:OPTIONS]]=VALUE (repeat, in order)")->required();

  cmd->callback([&global, &exit_code, args] {
    client_guarded(global, exit_code, [&] {
      if (args->org_id.empty() && args->org_name.empty()) throw UsageError("enroll needs --org-id or --org-name");
      const auto dims = parse_dims(args->dims);
      json spec = json::array();
      for (const auto& d : dims) {
        spec.push_back({{"id", d.id}, {"kind", std::string(to_string(d.kind))}, {"label", d.id},
                        {"option_count", d.option_count}});
      }
      const json values = values_json(dims);

      ApiClient api(global.bind);
      std::string org = args->org_id;
      if (org.empty()) {
        org = api.post("/api/orgs", {{"name", args->org_name}, {"services", split_csv(args->services)}})["org_id"];
      }
      const json res = api.post("/api/orgs/" + org + "/credentials",
                                {{"user_id", args->user}, {"spec", spec}, {"values", values}});
      print(global, res, "enrolled " + args->user + " in " + org);
      return kOk;
    });
  });
}

void register_login(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand(
      "login",
      "Request a challenge and answer it with the given dimension values, in order.\n"
      "Prints the session token; exits 1 with auth_failed on a mismatch.");
  struct Args {
    std::string org_id;
    std::string user;
    std::vector<std::string> dims;
    std::string service;
    std::string privilege = "read";
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--org-id", args->org_id, "Organization id")->required();
  cmd->add_option("--user", args->user, "User id")->required();
  cmd->add_option("--dim", args->dims, "KIND[:ID]=VALUE (repeat, in order)")->required();
  cmd->add_option("--service", args->service, "After login, check access to this service");
  cmd->add_option("--privilege", args->privilege, "Privilege to check with --service")->capture_default_str();

  cmd->callback([&global, &exit_code, args] {
    client_guarded(global, exit_code, [&] {
      const json values = values_json(parse_dims(args->dims));
      ApiClient api(global.bind);
      const json challenge = api.post("/api/challenges", {{"org_id", args->org_id}, {"user_id", args->user}});
      const json session = api.post("/api/authenticate", {{"challenge_id", challenge["challenge_id"]}, {"values", values}});
      const std::string token = session["token"];
      if (args->service.empty()) {
        print(global, session, token);
        return kOk;
      }
      httplib::Headers headers = {{"Authorization", "Bearer " + token}};
      json decision;
      try {
        decision = api.get("/api/services/" + args->service + "?privilege=" + args->privilege, headers);
      } catch (const ServiceError& e) {
        decision = e.body;
      }
      json out = session;
      out["service"] = args->service;
      out["privilege"] = args->privilege;
      out["allow"] = decision.value("allow", false);
      if (decision.contains("reason")) out["reason"] = decision["reason"];
      print(global, out,
            token + "\n" + args->service + ":" + args->privilege + " " +
                (out["allow"].get<bool>() ? "allow" : "deny " + decision.value("reason", std::string())));
      return out["allow"].get<bool>() ? kOk : kNegative;
    });
  });
}

void register_grant(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand("grant", "Grant privileges on an agreed service to an organization");
  struct Args {
    std::string org_id;
    std::string service;
    std::string privileges;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--org-id", args->org_id, "Organization id")->required();
  cmd->add_option("--service", args->service, "Service name (must be agreed)")->required();
  cmd->add_option("--privileges", args->privileges, "Comma separated, e.g. read,write")->required();
  cmd->callback([&global, &exit_code, args] {
    client_guarded(global, exit_code, [&] {
      ApiClient api(global.bind);
      const json res = api.post("/api/orgs/" + args->org_id + "/grants",
                                {{"service", args->service}, {"privileges", split_csv(args->privileges)}});
      print(global, res, "granted " + args->privileges + " on " + args->service);
      return kOk;
    });
  });
}

}  // namespace mdpass::cli
