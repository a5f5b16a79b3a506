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
#include "meshsim/consensus.hpp"

namespace meshsim {
namespace {

using testing::baseline;

int leaders(const Cluster& c) {
  int n = 0;
  for (NodeId id : c.node_ids()) {
    const Node& node = c.node(id);
    n += node.alive() && node.has_raft() && node.raft().is_leader();
  }
  return n;
}

TEST(ConsensusTest, ColdStartElectsOneLeader) {
  Deployment d = baseline(SecurityConfig::none());
  EXPECT_EQ(leaders(d.cluster), 1);
  const std::uint64_t term = d.cluster.node(testing::leader_of(d.cluster)).raft().state().term;
  d.cluster.run(30);
  EXPECT_EQ(leaders(d.cluster), 1);
  EXPECT_EQ(d.cluster.node(testing::leader_of(d.cluster)).raft().state().term, term);
  EXPECT_TRUE(d.cluster.election_safety().holds());
}

TEST(ConsensusTest, LeaderCrashReelectsWithinTwiceMaxTimeout) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Deployment d = baseline(SecurityConfig::none(), seed);
    const NodeId old = testing::leader_of(d.cluster);
    d.cluster.crash(old);
    const Tick bound = 2 * SimConstants{}.election_timeout_max;
    EXPECT_TRUE(d.cluster.run_until(
        [old](const Cluster& c) {
          auto l = c.serving_leader();
          return l && *l != old;
        },
        bound))
        << "seed " << seed;
    EXPECT_TRUE(d.cluster.election_safety().holds());
  }
}

TEST(ConsensusTest, FollowerCrashKeepsLeader) {
  Deployment d = baseline(SecurityConfig::none());
  const NodeId leader = testing::leader_of(d.cluster);
  NodeId victim = leader == testing::kServer2 ? testing::kServer3 : testing::kServer2;
  d.cluster.crash(victim);
  d.cluster.run(20);
  EXPECT_EQ(d.cluster.serving_leader(), leader);
}

TEST(ConsensusTest, StaleTermVoteRejected) {
  TraceLog trace;
  RaftNode n(NodeId{2}, {}, 1);
  std::vector<NodeId> voters{NodeId{1}, NodeId{2}, NodeId{3}};
  Outbox out;
  n.on_vote_request({2, NodeId{1}, 0, 0}, 0, voters, out, trace);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(std::get<VoteReply>(out[0].payload).granted);
  out.clear();
  n.on_vote_request({1, NodeId{3}, 0, 0}, 0, voters, out, trace);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(std::get<VoteReply>(out[0].payload).granted);
}

TEST(ConsensusTest, OneVotePerTerm) {
  TraceLog trace;
  RaftNode n(NodeId{2}, {}, 1);
  std::vector<NodeId> voters{NodeId{1}, NodeId{2}, NodeId{3}};
  Outbox out;
  n.on_vote_request({1, NodeId{1}, 0, 0}, 0, voters, out, trace);
  n.on_vote_request({1, NodeId{3}, 0, 0}, 0, voters, out, trace);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(std::get<VoteReply>(out[0].payload).granted);
  EXPECT_FALSE(std::get<VoteReply>(out[1].payload).granted);
}

TEST(ConsensusTest, OutdatedLogLosesVote) {
  TraceLog trace;
  RaftNode n(NodeId{2}, {}, 1);
  n.append_local(Noop{});
  std::vector<NodeId> voters{NodeId{1}, NodeId{2}, NodeId{3}};
  Outbox out;
  n.on_vote_request({1, NodeId{1}, 0, 0}, 0, voters, out, trace);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(std::get<VoteReply>(out[0].payload).granted);
}

TEST(ConsensusTest, NonVoterCandidateIgnored) {
  TraceLog trace;
  RaftNode n(NodeId{2}, {}, 1);
  Outbox out;
  n.on_vote_request({5, NodeId{9}, 0, 0}, 0, {NodeId{1}, NodeId{2}}, out, trace);
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(n.state().term, 0u);
}

TEST(ConsensusTest, SybilServerMajorityTakesOver) {
  Deployment d = baseline(SecurityConfig::none());
  AdversaryController a(d.cluster, AdversaryLevel::unprivileged);
  d.cluster.goals().arm(d.cluster.now());
  a.place_tap(testing::kServer2, testing::kClient);
  ASSERT_TRUE(a.sniff_label());
  ASSERT_TRUE(a.join_as(Role::server).has_value());
  const NodeId leader = testing::leader_of(d.cluster);
  FloodOutcome f = a.flood(25, Role::server, SimConstants{}.flood_rate);
  EXPECT_EQ(f.joined, 25);
  // Once the benign leader is removed the sybil voters hold the majority.
  ASSERT_TRUE(a.force_leave(leader));
  d.cluster.run_until([](const Cluster& c) { return c.goals().report().takeover; }, 40);
  EXPECT_TRUE(d.cluster.goals().report().takeover);
  EXPECT_TRUE(d.cluster.election_safety().holds());
}

}  // namespace
}  // namespace meshsim
