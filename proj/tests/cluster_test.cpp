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

namespace meshsim {
namespace {

using testing::baseline;
using testing::kBoot;
using testing::kClient;
using testing::kServer2;
using testing::spawn_adversary;

TEST(NodeTest, WrongLabelNodeSpawnsButCannotJoin) {
  Deployment d = baseline(SecurityConfig::label_only());
  SecretStore s;
  s.dc_label = "dc1";
  NodeId a = spawn_adversary(d.cluster, Role::server, s);
  EXPECT_TRUE(d.cluster.node(a).alive());
  auto decision = d.cluster.join(a, kBoot);
  EXPECT_FALSE(decision.accepted);
  EXPECT_EQ(decision.reason, JoinRejection::label);
}

TEST(NodeTest, EmptySecretsFailEveryCheck) {
  Deployment d = baseline(SecurityConfig::all());
  NodeId a = spawn_adversary(d.cluster, Role::client, SecretStore{});
  EXPECT_FALSE(d.cluster.join(a, kBoot).accepted);
  EXPECT_FALSE(d.cluster.node(a).members().is_member());
}

TEST(NodeTest, ClientDumpUnderGossipOnlyHoldsKey) {
  Deployment d = baseline(SecurityConfig::gossip_only());
  SecretDump dump = d.cluster.compromise(kClient);
  ASSERT_TRUE(dump.gossip_key.has_value());
  EXPECT_EQ(dump.gossip_key, d.cluster.node(kBoot).secrets().gossip_key);
}

TEST(NodeTest, LeaderDumpUnderTlsHoldsCaKey) {
  Deployment d = baseline(SecurityConfig::tls_only());
  SecretDump dump = d.cluster.compromise(testing::leader_of(d.cluster));
  EXPECT_TRUE(dump.ca_key.has_value());
}

TEST(NodeTest, ClientDumpUnderAllMechanisms) {
  Deployment d = baseline(SecurityConfig::all());
  SecretDump dump = d.cluster.compromise(kClient);
  EXPECT_TRUE(dump.gossip_key.has_value());
  ASSERT_TRUE(dump.cert.has_value());
  EXPECT_EQ(dump.cert->role, CertRole::client);
  ASSERT_TRUE(dump.acl_token.has_value());
  EXPECT_FALSE(dump.acl_token->has_management());
  EXPECT_FALSE(dump.ca_key.has_value());
}

TEST(NodeTest, CompromisedNodeKeepsRunning) {
  Deployment d = baseline(SecurityConfig::none());
  d.cluster.compromise(kClient);
  EXPECT_TRUE(d.cluster.node(kClient).alive());
  EXPECT_FALSE(d.cluster.node(kClient).benign());
  d.cluster.crash(kServer2);
  EXPECT_THROW(d.cluster.compromise(kServer2), ScenarioError);
}

TEST(ForceLeaveTest, DefaultConfigDismantlesCluster) {
  Deployment d = baseline(SecurityConfig::none());
  d.cluster.goals().arm(d.cluster.now());
  d.cluster.compromise(kClient);
  for (NodeId target : {NodeId{1}, NodeId{2}, NodeId{3}})
    EXPECT_TRUE(d.cluster.force_leave(kClient, target, std::nullopt).removed);
  d.cluster.run(12);
  EXPECT_TRUE(d.cluster.goals().report().disruption);
}

TEST(ForceLeaveTest, AclsRejectTokenlessIssuer) {
  Deployment d = baseline(SecurityConfig::acls_only());
  SecretStore s;
  s.dc_label = "dc1";
  NodeId a = spawn_adversary(d.cluster, Role::server, s);
  ASSERT_TRUE(d.cluster.join(a, kBoot).accepted);
  auto r = d.cluster.force_leave(a, kBoot, std::nullopt);
  EXPECT_FALSE(r.removed);
  EXPECT_EQ(r.reason, ForceLeaveRejection::acl);
}

TEST(ForceLeaveTest, TlsRejectsNonLeaderServer) {
  Deployment d = baseline(SecurityConfig::tls_only());
  const NodeId leader = testing::leader_of(d.cluster);
  const NodeId follower = leader == kServer2 ? testing::kServer3 : kServer2;
  d.cluster.compromise(follower);
  auto r = d.cluster.force_leave(follower, leader, std::nullopt);
  EXPECT_FALSE(r.removed);
  EXPECT_EQ(r.reason, ForceLeaveRejection::cert_authority);
}

TEST(ForceLeaveTest, TlsLeaderMayEvict) {
  Deployment d = baseline(SecurityConfig::tls_only());
  const NodeId leader = testing::leader_of(d.cluster);
  d.cluster.compromise(leader);
  EXPECT_TRUE(d.cluster.force_leave(leader, kClient, std::nullopt).removed);
}

TEST(BudgetTest, IdleInboxLeavesBudget) {
  Deployment d = baseline(SecurityConfig::none());
  d.cluster.step();
  const auto& r = d.cluster.node(kClient).last_budget_report();
  EXPECT_TRUE(r.timers_serviced);
  EXPECT_EQ(r.backlog, 0u);
  EXPECT_GT(r.remaining, 0);
}

TEST(BudgetTest, SealedJunkFloodNeverStarves) {
  Deployment d = baseline(SecurityConfig::all());
  d.cluster.goals().arm(d.cluster.now());
  AdversaryController a(d.cluster, AdversaryLevel::unprivileged);
  FloodOutcome f = a.flood(200, Role::server, SimConstants{}.flood_rate);
  EXPECT_EQ(f.joined, 0);
  EXPECT_FALSE(f.disruption);
  EXPECT_FALSE(f.first_unavailable.has_value());
}

TEST(BudgetTest, AclFloodStarvesServers) {
  Deployment d = baseline(SecurityConfig::acls_only());
  d.cluster.goals().arm(d.cluster.now());
  AdversaryController a(d.cluster, AdversaryLevel::unprivileged);
  a.place_tap(kServer2, kClient);
  ASSERT_TRUE(a.sniff_label());
  FloodOutcome f = a.flood(25, Role::server, SimConstants{}.flood_rate);
  EXPECT_TRUE(f.disruption);
  ASSERT_TRUE(f.first_unavailable.has_value());
  auto op = Identity::of(d.cluster.node(kBoot));
  auto t = d.cluster.submit(op, KvPut{{"app/1/x", "v", "node:1"}}, Verb::write,
                            Resource::kv("app/1/x"));
  EXPECT_NE(d.cluster.await_commit(t, 1).status, OpStatus::committed);
}

TEST(RegistryTest, OpenRegistryAcceptsRogueWrite) {
  Deployment d = baseline(SecurityConfig::all(), 1, true);
  d.cluster.goals().arm(d.cluster.now());
  ServiceRecord rogue{"payments", NodeId{}, 6666, {{"db_host", "rogue"}}, ""};
  EXPECT_EQ(d.cluster.registry_write(rogue, std::nullopt).status, OpStatus::committed);
  EXPECT_TRUE(d.cluster.goals().report().manipulation);
}

TEST(RegistryTest, OpenRegistryLeaksCredentials) {
  Deployment d = baseline(SecurityConfig::all(), 1, true);
  auto rec = d.cluster.registry_read("payments", std::nullopt);
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->config.at("db_password"), "pa55w0rd");
}

TEST(RegistryTest, MeshModeHasNoRegistry) {
  Deployment d = baseline(SecurityConfig::none());
  ServiceRecord rogue{"payments", NodeId{}, 6666, {}, ""};
  EXPECT_EQ(d.cluster.registry_write(rogue, std::nullopt).status, OpStatus::unavailable);
  EXPECT_FALSE(d.cluster.registry_read("db", std::nullopt).has_value());
}

TEST(GoalTest, NothingCountsBeforeArm) {
  Deployment d = baseline(SecurityConfig::none());
  d.cluster.compromise(kClient);
  auto id = Identity::of(d.cluster.node(kClient));
  ASSERT_EQ(d.cluster.kv_get(id, std::string(kSecretKey)).status, OpStatus::committed);
  EXPECT_FALSE(d.cluster.goals().report().manipulation);
  d.cluster.goals().arm(d.cluster.now());
  d.cluster.kv_get(id, std::string(kSecretKey));
  EXPECT_TRUE(d.cluster.goals().report().manipulation);
}

TEST(GoalTest, OwnKeysAreNotManipulation) {
  Deployment d = baseline(SecurityConfig::none());
  d.cluster.goals().arm(d.cluster.now());
  d.cluster.compromise(kClient);
  auto id = Identity::of(d.cluster.node(kClient));
  ASSERT_EQ(d.cluster.kv_put(id, "app/4/x", "v").status, OpStatus::committed);
  EXPECT_FALSE(d.cluster.goals().report().manipulation);
}

}  // namespace
}  // namespace meshsim
