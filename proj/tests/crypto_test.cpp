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
#include "meshsim/crypto.hpp"

namespace meshsim {
namespace {

using testing::baseline;

TEST(CryptoTest, DistributedGossipKeyIsShared) {
  Deployment d = baseline(SecurityConfig::gossip_only());
  const auto& key = d.cluster.node(testing::kBoot).secrets().gossip_key;
  ASSERT_TRUE(key.has_value());
  for (NodeId id : d.cluster.node_ids())
    EXPECT_EQ(d.cluster.node(id).secrets().gossip_key, key) << to_string(id);
}

TEST(CryptoTest, GenerationsAreDistinct) {
  KeyGenerator gen(7);
  EXPECT_NE(generate_gossip_key(gen), generate_gossip_key(gen));
}

TEST(CryptoTest, SameSeedSameKeys) {
  KeyGenerator a(7);
  KeyGenerator b(7);
  EXPECT_EQ(generate_gossip_key(a), generate_gossip_key(b));
}

TEST(CryptoTest, IssueRequiresCaKey) {
  EXPECT_FALSE(issue_cert(std::nullopt, NodeId{2}, CertRole::server, 0).has_value());
}

TEST(CryptoTest, CertificateVerifiesAgainstIssuingCa) {
  KeyGenerator gen(1);
  CaState ca = init_ca(gen, NodeId{1});
  auto cert = issue_cert(ca.key, NodeId{2}, CertRole::server, 10);
  ASSERT_TRUE(cert.has_value());
  EXPECT_TRUE(verify_cert(*cert, ca.key.public_id(), NodeId{2}, 11));
  EXPECT_FALSE(verify_cert(*cert, ca.key.public_id(), NodeId{3}, 11));
  CaState other = init_ca(gen, NodeId{1});
  EXPECT_FALSE(verify_cert(*cert, other.key.public_id(), NodeId{2}, 11));
}

TEST(CryptoTest, CertificateExpiresAfterOneYear) {
  KeyGenerator gen(1);
  CaState ca = init_ca(gen, NodeId{1});
  auto cert = issue_cert(ca.key, NodeId{2}, CertRole::client, 0);
  ASSERT_TRUE(cert.has_value());
  EXPECT_TRUE(verify_cert(*cert, ca.key.public_id(), NodeId{2}, kOneYearTicks - 1));
  EXPECT_FALSE(verify_cert(*cert, ca.key.public_id(), NodeId{2}, kOneYearTicks));
}

TEST(CryptoTest, TlsSetupAdmitsEveryBenignNode) {
  Deployment d = baseline(SecurityConfig::tls_only());
  for (NodeId id : d.cluster.node_ids()) {
    const Node& n = d.cluster.node(id);
    ASSERT_TRUE(n.secrets().cert.has_value());
    EXPECT_EQ(n.secrets().cert->role,
              n.config().role == Role::server ? CertRole::server : CertRole::client);
    EXPECT_TRUE(n.members().is_member());
  }
  EXPECT_TRUE(d.cluster.node(testing::kBoot).secrets().ca_key.has_value());
  EXPECT_FALSE(d.cluster.node(testing::kClient).secrets().ca_key.has_value());
}

TEST(CryptoTest, DistributionCountsManualSteps) {
  EXPECT_EQ(baseline(SecurityConfig::none()).cluster.manual_steps(), 0);
  EXPECT_EQ(baseline(SecurityConfig::gossip_only()).cluster.manual_steps(), 4);
  EXPECT_EQ(baseline(SecurityConfig::tls_only()).cluster.manual_steps(), 4);
}

}  // namespace
}  // namespace meshsim
