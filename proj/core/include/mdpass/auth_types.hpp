#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mdpass/credential.hpp"

namespace mdpass::auth {

using Timestamp = std::chrono::system_clock::time_point;

/// Seconds since the Unix epoch; the resolution persisted in the log.
std::int64_t to_unix(Timestamp t);
Timestamp from_unix(std::int64_t seconds);

inline const std::set<std::string> kStandardServices = {"SaaS", "PaaS", "IaaS", "DSaaS"};

struct OrgRecord {
  std::string org_id;
  std::string name;
  std::set<std::string> agreed_services;
  std::int64_t created_at = 0;

  friend bool operator==(const OrgRecord&, const OrgRecord&) = default;
};

/// Privileges granted to an org for one agreed service. Successive grants for
/// the same (org, service) accumulate.
struct ServiceGrant {
  std::string org_id;
  std::string service;
  std::set<std::string> privileges;

  friend bool operator==(const ServiceGrant&, const ServiceGrant&) = default;
};

struct StoredCredential {
  std::string org_id;
  std::string user_id;
  CredentialSpec spec;
  PasswordDigest password;
  std::int64_t created_at = 0;

  friend bool operator==(const StoredCredential&, const StoredCredential&) = default;
};

struct ChallengeSession {
  std::string challenge_id;
  std::string org_id;
  std::string user_id;
  std::vector<DimensionSpec> dimensions;
  Timestamp issued_at;
  Timestamp expires_at;
};

struct SessionToken {
  std::string token;
  std::string org_id;
  std::string user_id;
  Timestamp expires_at;
};

enum class DenyReason { kNone, kBadToken, kTokenExpired, kServiceNotAgreed, kPrivilegeMissing };

std::string_view to_string(DenyReason reason);

struct AuthzDecision {
  bool allow = false;
  DenyReason reason = DenyReason::kBadToken;
};

using LogRecord = std::variant<OrgRecord, StoredCredential, ServiceGrant>;

/// Durable state: everything reconstructed from the record log.
struct ServiceState {
  std::map<std::string, OrgRecord> orgs;
  std::map<std::pair<std::string, std::string>, StoredCredential> credentials;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> grants;

  void apply(const LogRecord& record);

  friend bool operator==(const ServiceState&, const ServiceState&) = default;
};

}  // namespace mdpass::auth
