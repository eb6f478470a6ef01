#include "mdpass/auth_service.hpp"

#include <algorithm>
#include <mutex>

#include "mdpass/error.hpp"
#include "mdpass/random.hpp"
#include "mdpass/store.hpp"

namespace mdpass::auth {

std::int64_t to_unix(Timestamp t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

Timestamp from_unix(std::int64_t seconds) { return Timestamp(std::chrono::seconds(seconds)); }

std::string_view to_string(DenyReason reason) {
  switch (reason) {
    case DenyReason::kNone: return "none";
    case DenyReason::kBadToken: return "bad_token";
    case DenyReason::kTokenExpired: return "token_expired";
    case DenyReason::kServiceNotAgreed: return "service_not_agreed";
    case DenyReason::kPrivilegeMissing: return "privilege_missing";
  }
  return "unknown";
}

namespace {

struct Applier {
  ServiceState& state;

  void operator()(const OrgRecord& r) const { state.orgs.insert_or_assign(r.org_id, r); }
  void operator()(const StoredCredential& r) const {
    state.credentials.insert_or_assign({r.org_id, r.user_id}, r);
  }
  void operator()(const ServiceGrant& r) const {
    state.grants[{r.org_id, r.service}].insert(r.privileges.begin(), r.privileges.end());
  }
};

std::set<std::string> non_empty_set(const std::vector<std::string>& items, const char* what) {
  if (items.empty()) throw Error(ErrorCode::kValidation, std::string(what) + " list is empty");
  std::set<std::string> out;
  for (const auto& s : items) {
    if (s.empty()) throw Error(ErrorCode::kValidation, std::string(what) + " name is empty");
    out.insert(s);
  }
  return out;
}

[[noreturn]] void auth_failed() { throw Error(ErrorCode::kAuthFailed, "authentication failed"); }

}  // namespace

void ServiceState::apply(const LogRecord& record) { std::visit(Applier{*this}, record); }

AuthService::AuthService(AuthServiceOptions options) : options_(std::move(options)) {
  if (options_.store_path) {
    log_ = std::make_unique<RecordLog>(*options_.store_path);
    for (const auto& record : log_->loaded().records) state_.apply(record);
    load_warnings_ = log_->loaded().warnings;
  }
}

AuthService::~AuthService() = default;

void AuthService::persist(const LogRecord& record) {
  if (log_) log_->append(record);
  state_.apply(record);
}

// Expired entries linger for one more TTL so late callers see "expired"
// rather than "unknown".
void AuthService::purge_expired(Timestamp now) {
  const auto challenge_cutoff = now - options_.challenge_ttl;
  const auto token_cutoff = now - options_.token_ttl;
  std::erase_if(challenges_, [&](const auto& kv) {
    return kv.second.session.expires_at <= challenge_cutoff;
  });
  std::erase_if(tokens_, [&](const auto& kv) { return kv.second.expires_at <= token_cutoff; });
}

OrgRecord AuthService::enroll_org(const std::string& name, const std::vector<std::string>& services) {
  if (name.empty()) throw Error(ErrorCode::kValidation, "organization name is empty");
  const std::set<std::string> agreed = non_empty_set(services, "service");

  std::unique_lock lock(mutex_);
  for (const auto& [id, org] : state_.orgs) {
    if (org.name == name && org.agreed_services == agreed) return org;
  }
  OrgRecord org{"org_" + secure_random_hex(8), name, agreed, to_unix(options_.clock())};
  persist(org);
  return org;
}

ServiceGrant AuthService::grant(const std::string& org_id, const std::string& service,
                                const std::vector<std::string>& privileges) {
  const std::set<std::string> privs = non_empty_set(privileges, "privilege");
  std::unique_lock lock(mutex_);
  const auto org = state_.orgs.find(org_id);
  if (org == state_.orgs.end()) throw Error(ErrorCode::kUnknownOrg, "unknown organization");
  if (!org->second.agreed_services.contains(service)) {
    throw Error(ErrorCode::kValidation, "service '" + service + "' is not in the agreement");
  }
  ServiceGrant g{org_id, service, privs};
  persist(g);
  return g;
}

StoredCredential AuthService::enroll_credential(const std::string& org_id, const std::string& user_id,
                                                const CredentialSpec& spec,
                                                std::span<const DimensionValue> values) {
  if (user_id.empty()) throw Error(ErrorCode::kValidation, "user id is empty");
  {
    std::shared_lock lock(mutex_);
    if (!state_.orgs.contains(org_id)) throw Error(ErrorCode::kUnknownOrg, "unknown organization");
  }
  const PasswordDigest password = generate_password(random_salt(), spec, values);

  std::unique_lock lock(mutex_);
  if (!state_.orgs.contains(org_id)) throw Error(ErrorCode::kUnknownOrg, "unknown organization");
  if (state_.credentials.contains({org_id, user_id})) {
    throw Error(ErrorCode::kDuplicateUser, "user already enrolled");
  }
  StoredCredential cred{org_id, user_id, spec, password, to_unix(options_.clock())};
  persist(cred);
  return cred;
}

ChallengeSession AuthService::issue_challenge(const std::string& org_id, const std::string& user_id) {
  const Timestamp now = options_.clock();
  std::unique_lock lock(mutex_);
  purge_expired(now);
  const auto cred = state_.credentials.find({org_id, user_id});
  if (cred == state_.credentials.end()) throw Error(ErrorCode::kUnknownUser, "unknown user");

  const auto dims = cred->second.spec.dimensions();
  ChallengeSession session{secure_random_hex(16), org_id, user_id,
                           {dims.begin(), dims.end()}, now, now + options_.challenge_ttl};
  challenges_.emplace(session.challenge_id, PendingChallenge{session, false});
  return session;
}

AuthService::PendingChallenge& AuthService::claim_challenge(const std::string& challenge_id,
                                                            Timestamp now) {
  const auto it = challenges_.find(challenge_id);
  if (it == challenges_.end()) auth_failed();
  PendingChallenge& pending = it->second;
  if (pending.consumed) throw Error(ErrorCode::kChallengeConsumed, "challenge already used");
  pending.consumed = true;
  if (pending.session.expires_at <= now) throw Error(ErrorCode::kChallengeExpired, "challenge expired");
  return pending;
}

SessionToken AuthService::authenticate(const std::string& challenge_id,
                                       std::span<const DimensionValue> values) {
  const Timestamp now = options_.clock();
  std::optional<StoredCredential> cred;
  std::string org_id, user_id;
  {
    std::unique_lock lock(mutex_);
    const PendingChallenge& pending = claim_challenge(challenge_id, now);
    org_id = pending.session.org_id;
    user_id = pending.session.user_id;
    const auto it = state_.credentials.find({org_id, user_id});
    if (it != state_.credentials.end()) cred = it->second;
  }

  bool match = false;
  if (cred) {
    try {
      match = verify(cred->password, cred->spec, values);
    } catch (const Error&) {
      match = false;
    }
  }
  if (!match) auth_failed();

  SessionToken token{secure_random_hex(16), org_id, user_id, now + options_.token_ttl};
  std::unique_lock lock(mutex_);
  purge_expired(now);
  tokens_.emplace(token.token, token);
  return token;
}

void AuthService::reject_attempt(const std::string& challenge_id) {
  const Timestamp now = options_.clock();
  {
    std::unique_lock lock(mutex_);
    claim_challenge(challenge_id, now);
  }
  auth_failed();
}

AuthzDecision AuthService::authorize(const std::string& token, const std::string& service,
                                     const std::string& privilege) const {
  const Timestamp now = options_.clock();
  std::shared_lock lock(mutex_);
  const auto tok = tokens_.find(token);
  if (tok == tokens_.end()) return {false, DenyReason::kBadToken};
  if (tok->second.expires_at <= now) return {false, DenyReason::kTokenExpired};

  const auto org = state_.orgs.find(tok->second.org_id);
  if (org == state_.orgs.end() || !org->second.agreed_services.contains(service)) {
    return {false, DenyReason::kServiceNotAgreed};
  }
  const auto grant = state_.grants.find({tok->second.org_id, service});
  if (grant == state_.grants.end() || !grant->second.contains(privilege)) {
    return {false, DenyReason::kPrivilegeMissing};
  }
  return {true, DenyReason::kNone};
}

ServiceState AuthService::snapshot() const {
  std::shared_lock lock(mutex_);
  return state_;
}

std::vector<std::string> AuthService::load_warnings() const { return load_warnings_; }

}  // namespace mdpass::auth
