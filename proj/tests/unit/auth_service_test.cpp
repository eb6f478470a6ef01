#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>

#include "mdpass/auth_service.hpp"
#include "mdpass/error.hpp"
#include "mdpass/pgm.hpp"
#include "mdpass/store.hpp"
#include "support/credentials.hpp"

using namespace mdpass;
using namespace mdpass::auth;
using mdpass::testing::company_spec;
using mdpass::testing::company_values;
using mdpass::testing::FakeClock;
using mdpass::testing::TempDir;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

struct Fixture {
  FakeClock clock;
  AuthService service{AuthServiceOptions{std::nullopt, clock.fn()}};
  OrgRecord org = service.enroll_org("PESIT", {"SaaS", "DSaaS"});

  Fixture() { service.enroll_credential(org.org_id, "alice", company_spec(), company_values()); }

  SessionToken login(std::span<const DimensionValue> values) {
    const auto c = service.issue_challenge(org.org_id, "alice");
    return service.authenticate(c.challenge_id, values);
  }
};

}  // namespace

TEST_CASE("enroll_org validates and is idempotent on exact duplicates") {
  AuthService service;
  const OrgRecord a = service.enroll_org("PESIT", {"SaaS", "DSaaS"});
  CHECK(a.agreed_services == std::set<std::string>{"SaaS", "DSaaS"});
  CHECK(service.enroll_org("PESIT", {"DSaaS", "SaaS"}).org_id == a.org_id);
  CHECK(service.enroll_org("PESIT", {"SaaS"}).org_id != a.org_id);
  CHECK(code_of([&] { service.enroll_org("", {"SaaS"}); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { service.enroll_org("X", {}); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { service.enroll_org("X", {""}); }) == ErrorCode::kValidation);
  CHECK(service.snapshot().orgs.size() == 2);
}

TEST_CASE("enroll_credential error paths") {
  Fixture f;
  CHECK(code_of([&] { f.service.enroll_credential(f.org.org_id, "alice", company_spec(), company_values()); }) ==
        ErrorCode::kDuplicateUser);
  auto shorter = company_values();
  shorter.pop_back();
  CHECK(code_of([&] { f.service.enroll_credential(f.org.org_id, "bob", company_spec(), shorter); }) ==
        ErrorCode::kSpecMismatch);
  CHECK(code_of([&] { f.service.enroll_credential("org_nope", "bob", company_spec(), company_values()); }) ==
        ErrorCode::kUnknownOrg);
  CHECK(code_of([&] { f.service.enroll_credential(f.org.org_id, "", company_spec(), company_values()); }) ==
        ErrorCode::kValidation);
}

TEST_CASE("challenge echoes the spec without secrets") {
  Fixture f;
  const auto c = f.service.issue_challenge(f.org.org_id, "alice");
  REQUIRE(c.dimensions.size() == 4);
  CHECK(c.dimensions[0].id == "name");
  CHECK(c.dimensions[1].kind == DimensionKind::kImage);
  CHECK(c.dimensions[3].id == "id");
  CHECK(c.expires_at - c.issued_at == std::chrono::minutes(5));
  CHECK(c.challenge_id.size() == 32);
  CHECK(code_of([&] { f.service.issue_challenge(f.org.org_id, "mallory"); }) == ErrorCode::kUnknownUser);
}

TEST_CASE("authenticate round trip issues a token") {
  Fixture f;
  const SessionToken t = f.login(company_values());
  CHECK(t.token.size() == 32);
  CHECK(t.user_id == "alice");
  CHECK(t.expires_at - *f.clock.now == std::chrono::minutes(15));
}

TEST_CASE("authenticate failures are uniform") {
  Fixture f;
  CHECK(code_of([&] { f.login(company_values("PESIT", "ORG-0043")); }) == ErrorCode::kAuthFailed);
  CHECK(code_of([&] { f.login(company_values("Pesit")); }) == ErrorCode::kAuthFailed);

  auto swapped = company_values();
  std::swap(swapped[1], swapped[2]);
  CHECK(code_of([&] { f.login(swapped); }) == ErrorCode::kAuthFailed);

  auto kind_swap = company_values();
  std::swap(kind_swap[0], kind_swap[1]);
  CHECK(code_of([&] { f.login(kind_swap); }) == ErrorCode::kAuthFailed);

  CHECK(code_of([&] { f.service.authenticate("0123456789abcdef0123456789abcdef", company_values()); }) ==
        ErrorCode::kAuthFailed);
}

TEST_CASE("challenges are single use, even after a failure") {
  Fixture f;
  const auto c = f.service.issue_challenge(f.org.org_id, "alice");
  CHECK(code_of([&] { f.service.authenticate(c.challenge_id, company_values("nope")); }) ==
        ErrorCode::kAuthFailed);
  CHECK(code_of([&] { f.service.authenticate(c.challenge_id, company_values()); }) ==
        ErrorCode::kChallengeConsumed);

  const auto c2 = f.service.issue_challenge(f.org.org_id, "alice");
  f.service.authenticate(c2.challenge_id, company_values());
  CHECK(code_of([&] { f.service.authenticate(c2.challenge_id, company_values()); }) ==
        ErrorCode::kChallengeConsumed);

  const auto c3 = f.service.issue_challenge(f.org.org_id, "alice");
  CHECK(code_of([&] { f.service.reject_attempt(c3.challenge_id); }) == ErrorCode::kAuthFailed);
  CHECK(code_of([&] { f.service.authenticate(c3.challenge_id, company_values()); }) ==
        ErrorCode::kChallengeConsumed);
}

TEST_CASE("expired challenges are unusable") {
  Fixture f;
  const auto c = f.service.issue_challenge(f.org.org_id, "alice");
  f.clock.advance(std::chrono::minutes(5));
  CHECK(code_of([&] { f.service.authenticate(c.challenge_id, company_values()); }) ==
        ErrorCode::kChallengeExpired);
}

TEST_CASE("concurrent use of one challenge yields at most one token") {
  Fixture f;
  const auto c = f.service.issue_challenge(f.org.org_id, "alice");
  const auto values = company_values();
  std::atomic<int> tokens{0};
  std::atomic<int> consumed{0};
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&] {
        try {
          f.service.authenticate(c.challenge_id, values);
          ++tokens;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::kChallengeConsumed) ++consumed;
        }
      });
    }
  }
  CHECK(tokens == 1);
  CHECK(consumed == 7);
}

TEST_CASE("authorize is the conjunction of token, agreement and privilege") {
  Fixture f;
  f.service.grant(f.org.org_id, "SaaS", {"read"});
  const SessionToken good = f.login(company_values());

  for (int cell = 0; cell < 8; ++cell) {
    const bool token_ok = cell & 1;
    const bool service_ok = cell & 2;
    const bool privilege_ok = cell & 4;
    const std::string token = token_ok ? good.token : std::string(32, '0');
    const std::string service = service_ok ? "SaaS" : "IaaS";
    const std::string privilege = privilege_ok ? "read" : "admin";
    const AuthzDecision d = f.service.authorize(token, service, privilege);
    CAPTURE(cell);
    CHECK(d.allow == (token_ok && service_ok && privilege_ok));
    if (!token_ok) CHECK(d.reason == DenyReason::kBadToken);
    else if (!service_ok) CHECK(d.reason == DenyReason::kServiceNotAgreed);
    else if (!privilege_ok) CHECK(d.reason == DenyReason::kPrivilegeMissing);
    else CHECK(d.reason == DenyReason::kNone);
  }

  // Agreed but never granted.
  CHECK(f.service.authorize(good.token, "DSaaS", "read").reason == DenyReason::kPrivilegeMissing);

  f.clock.advance(std::chrono::minutes(15));
  CHECK(f.service.authorize(good.token, "SaaS", "read").reason == DenyReason::kTokenExpired);
}

TEST_CASE("grant validation") {
  Fixture f;
  CHECK(code_of([&] { f.service.grant(f.org.org_id, "IaaS", {"read"}); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { f.service.grant(f.org.org_id, "SaaS", {}); }) == ErrorCode::kValidation);
  CHECK(code_of([&] { f.service.grant("org_x", "SaaS", {"read"}); }) == ErrorCode::kUnknownOrg);
  f.service.grant(f.org.org_id, "SaaS", {"read"});
  f.service.grant(f.org.org_id, "SaaS", {"write"});
  CHECK(f.service.snapshot().grants.at({f.org.org_id, "SaaS"}) == std::set<std::string>{"read", "write"});
}

TEST_CASE("the store never holds raw inputs or image features") {
  TempDir dir;
  const auto path = dir.path() / "state.jsonl";
  {
    AuthService service(AuthServiceOptions{path});
    const auto org = service.enroll_org("Acme Cloud", {"SaaS"});
    service.enroll_credential(org.org_id, "alice", company_spec(), company_values("SecretName", "SecretId-77"));
  }
  const std::string log = mdpass::testing::read_file(path);
  CHECK(log.find("SecretName") == std::string::npos);
  CHECK(log.find("SecretId-77") == std::string::npos);
  for (const char* img : {"logo.pgm", "signature.pgm"}) {
    const auto feature = extract_image_feature(read_pgm_file(mdpass::testing::fixture(img))).to_hex();
    CHECK(log.find(feature) == std::string::npos);
  }
  CHECK(log.find("\"salt\"") != std::string::npos);
  CHECK(log.find("\"digest\"") != std::string::npos);
}

TEST_CASE("restarted service authenticates against replayed credentials") {
  TempDir dir;
  const auto path = dir.path() / "state.jsonl";
  std::string org_id;
  {
    AuthService service(AuthServiceOptions{path});
    org_id = service.enroll_org("PESIT", {"SaaS"}).org_id;
    service.grant(org_id, "SaaS", {"read"});
    service.enroll_credential(org_id, "alice", company_spec(), company_values());
  }
  AuthService restarted(AuthServiceOptions{path});
  const auto c = restarted.issue_challenge(org_id, "alice");
  const auto token = restarted.authenticate(c.challenge_id, company_values());
  CHECK(restarted.authorize(token.token, "SaaS", "read").allow);
}

#include "support/random_ops.hpp"

TEST_CASE("replaying the log reproduces the live state") {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 5; ++round) {
    TempDir dir;
    const auto path = dir.path() / "state.jsonl";
    ServiceState live;
    {
      AuthService service(AuthServiceOptions{path});
      mdpass::testing::run_random_ops(service, rng, 60);
      live = service.snapshot();
    }
    AuthService replayed(AuthServiceOptions{path});
    CHECK(replayed.snapshot() == live);
    CHECK(replayed.load_warnings().empty());
  }
}
