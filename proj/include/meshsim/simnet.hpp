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

#pragma once

// Deterministic tick-driven network: unit latency, no loss, passive taps.

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "meshsim/crypto.hpp"
#include "meshsim/message.hpp"
#include "meshsim/types.hpp"

namespace meshsim {

class SimClock {
 public:
  Tick now() const { return tick_; }
  void advance() { ++tick_; }

 private:
  Tick tick_ = 0;
};

struct Envelope {
  NodeId src;
  NodeId dst;
  Channel channel = Channel::gossip;
  bool sealed = false;
  std::optional<GossipKey> sealed_with;
  std::optional<Certificate> cert;
  Message payload;
  Tick sent_at = 0;
  Tick deliver_at = 0;
  std::uint64_t seq = 0;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Seals a gossip-channel envelope under `key`.
Envelope seal(Envelope env, const GossipKey& key);

/// Returns the payload iff the envelope is unsealed or sealed under `key`.
std::optional<Message> open(const Envelope& env,
                            const std::optional<GossipKey>& key);

using TapId = std::size_t;

struct Tap {
  std::pair<NodeId, NodeId> link;
  std::vector<Envelope> captured;
};

struct Delivery {
  NodeId recipient;
  Envelope envelope;
};

class Network {
 public:
  void add_node(NodeId id);
  bool has_node(NodeId id) const { return nodes_.contains(id); }

  /// Crashed nodes still exist but drop whatever is delivered to them.
  void set_down(NodeId id, bool down);
  bool is_down(NodeId id) const { return down_.contains(id); }

  Tick now() const { return clock_.now(); }

  /// Enqueues for delivery at now()+1; throws ScenarioError on unknown nodes.
  void send(Envelope env);

  /// Advances the clock and returns everything due, sorted by
  /// (deliver_at, src, dst, seq). Deliveries to crashed nodes are dropped.
  std::vector<Delivery> step();

  TapId attach_tap(NodeId a, NodeId b);
  /// Captured copies in capture order; sealed payloads appear as Opaque.
  const std::vector<Envelope>& read_tap(TapId id) const;
  std::size_t tap_count() const { return taps_.size(); }

  std::uint64_t sent_count() const { return sent_; }
  std::uint64_t delivered_count() const { return delivered_; }
  std::uint64_t dropped_count() const { return dropped_; }
  std::size_t in_flight() const { return pending_.size(); }

 private:
  SimClock clock_;
  std::set<NodeId> nodes_;
  std::set<NodeId> down_;
  std::vector<Envelope> pending_;
  std::vector<Tap> taps_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
};

}  // namespace meshsim
