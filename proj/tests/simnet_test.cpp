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

#include "meshsim/simnet.hpp"

namespace meshsim {
namespace {

constexpr NodeId kA{1};
constexpr NodeId kB{2};

Envelope heartbeat(NodeId src, NodeId dst, std::string label = "dc1") {
  Envelope e;
  e.src = src;
  e.dst = dst;
  e.channel = Channel::gossip;
  e.payload = Heartbeat{src, std::move(label), {}};
  return e;
}

Network two_nodes() {
  Network net;
  net.add_node(kA);
  net.add_node(kB);
  return net;
}

TEST(SimnetTest, UnitLatency) {
  Network net = two_nodes();
  for (int i = 0; i < 5; ++i) net.step();
  ASSERT_EQ(net.now(), 5u);
  net.send(heartbeat(kA, kB));
  auto out = net.step();
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].recipient, kB);
  EXPECT_EQ(out[0].envelope.deliver_at, 6u);
  EXPECT_EQ(net.now(), 6u);
}

TEST(SimnetTest, SelfLoopArrivesNextTick) {
  Network net = two_nodes();
  Envelope e;
  e.src = kA;
  e.dst = kA;
  e.channel = Channel::rpc;
  e.payload = VoteRequest{1, kA, 0, 0};
  net.send(e);
  auto out = net.step();
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].recipient, kA);
}

TEST(SimnetTest, EmptyStepAdvancesClock) {
  Network net = two_nodes();
  EXPECT_TRUE(net.step().empty());
  EXPECT_EQ(net.now(), 1u);
}

TEST(SimnetTest, SameTickDeliveriesOrderedBySender) {
  Network net;
  net.add_node(kA);
  net.add_node(kB);
  net.add_node(NodeId{3});
  net.send(heartbeat(kB, NodeId{3}));
  net.send(heartbeat(kA, NodeId{3}));
  auto out = net.step();
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].envelope.src, kA);
  EXPECT_EQ(out[1].envelope.src, kB);
}

TEST(SimnetTest, DropsTrafficToDownNode) {
  Network net = two_nodes();
  net.set_down(kB, true);
  net.send(heartbeat(kA, kB));
  EXPECT_TRUE(net.step().empty());
  EXPECT_EQ(net.dropped_count(), 1u);
}

TEST(SimnetTest, UnknownNodeIsAnError) {
  Network net = two_nodes();
  EXPECT_THROW(net.send(heartbeat(kA, NodeId{9})), ScenarioError);
}

TEST(SimnetTest, TapCapturesWithoutChangingDelivery) {
  Network tapped = two_nodes();
  Network plain = two_nodes();
  TapId tap = tapped.attach_tap(kA, kB);
  tapped.send(heartbeat(kA, kB));
  plain.send(heartbeat(kA, kB));
  auto a = tapped.step();
  auto b = plain.step();
  EXPECT_EQ(tapped.read_tap(tap).size(), 1u);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a[0].envelope, b[0].envelope);
}

TEST(SimnetTest, TapCapturesBothDirections) {
  Network net = two_nodes();
  TapId tap = net.attach_tap(kA, kB);
  net.send(heartbeat(kA, kB));
  net.send(heartbeat(kB, kA));
  net.step();
  EXPECT_EQ(net.read_tap(tap).size(), 2u);
}

TEST(SimnetTest, IdleTapIsEmpty) {
  Network net = two_nodes();
  TapId tap = net.attach_tap(kA, kB);
  net.step();
  EXPECT_TRUE(net.read_tap(tap).empty());
}

TEST(SimnetTest, PlaintextJoinExposesLabel) {
  Network net = two_nodes();
  TapId tap = net.attach_tap(kA, kB);
  Envelope e;
  e.src = kA;
  e.dst = kB;
  JoinRequest req;
  req.requester = kA;
  req.dc_label = "dc-secret";
  e.payload = req;
  net.send(e);
  net.step();
  ASSERT_EQ(net.read_tap(tap).size(), 1u);
  EXPECT_EQ(visible_dc_label(net.read_tap(tap)[0].payload), "dc-secret");
}

TEST(SimnetTest, SealedJoinIsOpaqueOnTheWire) {
  Network net = two_nodes();
  TapId tap = net.attach_tap(kA, kB);
  Envelope e;
  e.src = kA;
  e.dst = kB;
  JoinRequest req;
  req.requester = kA;
  req.dc_label = "dc-secret";
  e.payload = req;
  net.send(seal(e, GossipKey{"k1"}));
  auto out = net.step();
  const Envelope& seen = net.read_tap(tap).at(0);
  EXPECT_TRUE(seen.sealed);
  EXPECT_TRUE(std::holds_alternative<Opaque>(seen.payload));
  EXPECT_FALSE(visible_dc_label(seen.payload).has_value());
  // The recipient still gets the real payload.
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(open(out[0].envelope, GossipKey{"k1"}).has_value());
}

TEST(SimnetTest, SealRoundTripsOnlyWithSameKey) {
  Envelope e = heartbeat(kA, kB);
  Envelope s = seal(e, GossipKey{"k1"});
  auto opened = open(s, GossipKey{"k1"});
  ASSERT_TRUE(opened.has_value());
  EXPECT_EQ(*opened, e.payload);
  EXPECT_FALSE(open(s, GossipKey{"k2"}).has_value());
  EXPECT_FALSE(open(s, std::nullopt).has_value());
}

}  // namespace
}  // namespace meshsim
