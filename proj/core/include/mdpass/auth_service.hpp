#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "mdpass/auth_types.hpp"
#include "mdpass/credential.hpp"

namespace mdpass::auth {

class RecordLog;

using Clock = std::function<Timestamp()>;

struct AuthServiceOptions {
  /// Append-only log; in-memory only when unset.
  std::optional<std::filesystem::path> store_path;
  Clock clock = [] { return std::chrono::system_clock::now(); };
  std::chrono::seconds challenge_ttl{std::chrono::minutes(5)};
  std::chrono::seconds token_ttl{std::chrono::minutes(15)};
};

/// Organization enrollment, credential enrollment, challenge/response login
/// and service/privilege authorization.
///
/// Durable records (orgs, credentials, grants) go through the record log
/// before they become visible. Challenges and session tokens live in memory
/// and are lost on restart. All mutations are serialized by one writer lock;
/// digest computation runs outside it.
class AuthService {
 public:
  explicit AuthService(AuthServiceOptions options = {});
  ~AuthService();

  AuthService(const AuthService&) = delete;
  AuthService& operator=(const AuthService&) = delete;

  /// Returns the existing org when name and services match one exactly.
  /// Throws Error(kValidation) on an empty name, empty service list or an
  /// empty service name.
  OrgRecord enroll_org(const std::string& name, const std::vector<std::string>& services);

  /// Throws kUnknownOrg, or kValidation when the service is not agreed or
  /// the privilege list is empty.
  ServiceGrant grant(const std::string& org_id, const std::string& service,
                     const std::vector<std::string>& privileges);

  /// Salts and digests `values`; only salt + digest are kept.
  /// Throws kUnknownOrg, kValidation (empty user id), kDuplicateUser, or the
  /// credential pipeline errors (kSpecMismatch, kEmptyText, ...).
  StoredCredential enroll_credential(const std::string& org_id, const std::string& user_id,
                                     const CredentialSpec& spec,
                                     std::span<const DimensionValue> values);

  /// Throws kUnknownUser when no credential exists for (org, user).
  ChallengeSession issue_challenge(const std::string& org_id, const std::string& user_id);

  /// Consumes the challenge whatever the outcome. A wrong value, wrong order,
  /// undecodable value or unknown challenge id all raise the same
  /// Error(kAuthFailed). kChallengeExpired / kChallengeConsumed are raised for
  /// a known challenge past its deadline or already used.
  SessionToken authenticate(const std::string& challenge_id, std::span<const DimensionValue> values);

  /// Consumes the challenge as a failed attempt; used when a submission
  /// cannot even be decoded. Always throws.
  [[noreturn]] void reject_attempt(const std::string& challenge_id);

  AuthzDecision authorize(const std::string& token, const std::string& service,
                          const std::string& privilege) const;

  ServiceState snapshot() const;
  std::vector<std::string> load_warnings() const;
  Timestamp now() const { return options_.clock(); }

 private:
  struct PendingChallenge {
    ChallengeSession session;
    bool consumed = false;
  };

  void persist(const LogRecord& record);  // caller holds the writer lock
  void purge_expired(Timestamp now);      // caller holds the writer lock
  PendingChallenge& claim_challenge(const std::string& challenge_id, Timestamp now);

  AuthServiceOptions options_;
  std::unique_ptr<RecordLog> log_;
  std::vector<std::string> load_warnings_;

  mutable std::shared_mutex mutex_;
  ServiceState state_;
  std::map<std::string, PendingChallenge> challenges_;
  std::map<std::string, SessionToken> tokens_;
};

}  // namespace mdpass::auth
