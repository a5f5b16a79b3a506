// Copyright 2026 The meshsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "meshsim/statestore.hpp"

namespace meshsim {
namespace {

using testing::baseline;
using testing::kBoot;
using testing::kClient;

AclToken token(std::string id, std::vector<Scope> scopes) {
  AclToken t;
  t.token_id = std::move(id);
  t.policy = AclPolicy::from_scopes(scopes);
  t.scopes = std::move(scopes);
  return t;
}

TEST(PolicyTest, DefaultDeny) {
  StateMachine sm;
  EXPECT_FALSE(sm.authorize(std::nullopt, Verb::read, Resource::kv("a"), 0));
  EXPECT_FALSE(sm.authorize("missing", Verb::read, Resource::kv("a"), 0));
}

TEST(PolicyTest, ManagementCoversEverything) {
  StateMachine sm;
  sm.apply(AclMint{token("m", {Scope::management()})});
  EXPECT_TRUE(sm.authorize("m", Verb::read, Resource::kv("secrets/x"), 0));
  EXPECT_TRUE(sm.authorize("m", Verb::admin, Resource::acl(), 0));
  EXPECT_TRUE(sm.authorize("m", Verb::write, Resource::service("db"), 0));
}

TEST(PolicyTest, KvPrefixScope) {
  StateMachine sm;
  sm.apply(AclMint{token("c", {Scope::kv_prefix("app/4/")})});
  EXPECT_TRUE(sm.authorize("c", Verb::write, Resource::kv("app/4/x"), 0));
  EXPECT_FALSE(sm.authorize("c", Verb::write, Resource::kv("secrets/x"), 0));
  EXPECT_FALSE(sm.authorize("c", Verb::read, Resource::kv("app/5/x"), 0));
  EXPECT_FALSE(sm.authorize("c", Verb::admin, Resource::acl(), 0));
}

TEST(PolicyTest, ServiceScope) {
  StateMachine sm;
  sm.apply(AclMint{token("w", {Scope::service("web")})});
  EXPECT_TRUE(sm.authorize("w", Verb::write, Resource::service("web"), 0));
  EXPECT_FALSE(sm.authorize("w", Verb::write, Resource::service("db"), 0));
}

TEST(PolicyTest, ExpiredTokenDenied) {
  StateMachine sm;
  AclToken t = token("m", {Scope::management()});
  t.lifetime = 10;
  sm.apply(AclMint{t});
  EXPECT_TRUE(sm.authorize("m", Verb::read, Resource::kv("k"), 9));
  EXPECT_FALSE(sm.authorize("m", Verb::read, Resource::kv("k"), 10));
}

TEST(PolicyTest, MoreSpecificDenyWins) {
  AclPolicy p;
  p.rules.push_back({Scope::kv_prefix("app/"), Verb::write, Effect::allow});
  p.rules.push_back({Scope::kv_prefix("app/locked/"), Verb::write, Effect::deny});
  EXPECT_TRUE(policy_allows(p, Verb::write, Resource::kv("app/x")));
  EXPECT_FALSE(policy_allows(p, Verb::write, Resource::kv("app/locked/x")));
}

TEST(OwnershipTest, KeysMapToScopes) {
  EXPECT_EQ(owner_scope_for_key("app/4/config"), "node:4");
  EXPECT_EQ(owner_scope_for_key("secrets/db-password"), "operator");
  EXPECT_EQ(owner_scope_for_key("app/x/config"), "operator");
}

TEST(StoreTest, HealthyPutCommits) {
  Deployment d = baseline(SecurityConfig::none());
  auto id = Identity::of(d.cluster.node(kClient));
  EXPECT_EQ(d.cluster.kv_put(id, "app/4/x", "v").status, OpStatus::committed);
}

TEST(StoreTest, EmptyValueRoundTrips) {
  Deployment d = baseline(SecurityConfig::none());
  auto id = Identity::of(d.cluster.node(kClient));
  ASSERT_EQ(d.cluster.kv_put(id, "app/4/empty", "").status, OpStatus::committed);
  auto r = d.cluster.kv_get(id, "app/4/empty");
  EXPECT_EQ(r.status, OpStatus::committed);
  EXPECT_EQ(r.value, std::optional<std::string>(""));
}

TEST(StoreTest, PutSurvivesOneServerCrash) {
  Deployment d = baseline(SecurityConfig::none());
  NodeId leader = testing::leader_of(d.cluster);
  NodeId victim = leader == testing::kServer3 ? testing::kServer2 : testing::kServer3;
  d.cluster.crash(victim);
  auto id = Identity::of(d.cluster.node(kClient));
  EXPECT_EQ(d.cluster.kv_put(id, "app/4/x", "v").status, OpStatus::committed);
}

TEST(StoreTest, AclsScopeClientWrites) {
  Deployment d = baseline(SecurityConfig::acls_only());
  auto client = Identity::of(d.cluster.node(kClient));
  EXPECT_EQ(d.cluster.kv_put(client, "app/4/x", "v").status, OpStatus::committed);
  EXPECT_EQ(d.cluster.kv_put(client, "secrets/x", "v").status, OpStatus::denied);
  EXPECT_EQ(d.cluster.kv_get(client, std::string(kSecretKey)).status, OpStatus::denied);

  auto op = Identity::of(d.cluster.node(kBoot));
  auto r = d.cluster.kv_get(op, std::string(kSecretKey));
  EXPECT_EQ(r.status, OpStatus::committed);
  EXPECT_EQ(r.value, std::optional<std::string>(kSecretValue));
}

TEST(StoreTest, ServiceScopeLimitsRegistration) {
  Deployment d = baseline(SecurityConfig::acls_only());
  auto client = Identity::of(d.cluster.node(kClient));
  EXPECT_EQ(d.cluster.register_service(client, {"web", kClient, 8081, {}, ""}).status,
            OpStatus::committed);
  EXPECT_EQ(d.cluster.register_service(client, {"db", kClient, 6666, {}, ""}).status,
            OpStatus::denied);
}

TEST(StoreTest, DefaultConfigRedirectsService) {
  Deployment d = baseline(SecurityConfig::none());
  auto client = Identity::of(d.cluster.node(kClient));
  ASSERT_EQ(d.cluster.register_service(client, {"db", kClient, 6666, {}, ""}).status,
            OpStatus::committed);
  auto rec = d.cluster.resolve_service("db");
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->endpoint_node, kClient);
  EXPECT_EQ(rec->port, 6666);
  EXPECT_EQ(rec->owner_scope, "operator");
}

TEST(StoreTest, OnlyManagementMints) {
  Deployment d = baseline(SecurityConfig::acls_only());
  auto client = Identity::of(d.cluster.node(kClient));
  EXPECT_EQ(d.cluster.acl_mint(client, {Scope::management()}).status, OpStatus::denied);
  auto op = Identity::of(d.cluster.node(kBoot));
  auto minted = d.cluster.acl_mint(op, {Scope::management()});
  EXPECT_EQ(minted.status, OpStatus::committed);
  ASSERT_TRUE(minted.token.has_value());
  EXPECT_TRUE(minted.token->has_management());
}

TEST(StoreTest, SetupMintsNodeScopedTokens) {
  Deployment d = baseline(SecurityConfig::acls_only());
  ASSERT_TRUE(d.management_token.has_value());
  for (NodeId id : d.cluster.node_ids()) {
    const auto& tok = d.cluster.node(id).secrets().acl_token;
    ASSERT_TRUE(tok.has_value()) << to_string(id);
    EXPECT_EQ(tok->has_management(), id == kBoot);
  }
}

}  // namespace
}  // namespace meshsim
