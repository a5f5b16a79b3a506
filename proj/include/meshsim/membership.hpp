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

// Gossip membership. Every member bumps its own heartbeat counter each round
// and pushes its whole view to `fanout` random peers; receivers keep the
// highest (incarnation, heartbeat) per member. A member whose counter has not
// advanced for `suspect_after` ticks is suspect, `fail_after` ticks failed.
// `left` is sticky until the member rejoins with a higher incarnation.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "meshsim/message.hpp"
#include "meshsim/trace.hpp"
#include "meshsim/types.hpp"

namespace meshsim {

struct Outgoing {
  NodeId dst;
  Channel channel = Channel::gossip;
  Message payload;
};

using Outbox = std::vector<Outgoing>;

struct MemberEntry {
  MemberDigest digest;
  Tick last_progress = 0;
  MemberStatus status = MemberStatus::alive;

  friend bool operator==(const MemberEntry&, const MemberEntry&) = default;
};

struct MembershipTiming {
  int fanout = 3;
  Tick suspect_after = 3;
  Tick fail_after = 5;

  friend bool operator==(const MembershipTiming&, const MembershipTiming&) = default;
};

class MemberRegistry {
 public:
  MemberRegistry() = default;
  MemberRegistry(NodeId self, Role role, MembershipTiming timing)
      : self_(self), role_(role), timing_(timing) {}

  NodeId self() const { return self_; }
  bool is_member() const { return member_; }
  std::uint64_t incarnation() const { return incarnation_; }

  /// First node of a cluster: a member of its own one-node view.
  void bootstrap(bool voter, Tick now, TraceLog& trace);

  /// Seed side of an accepted join.
  void admit(const JoinRequest& req, bool voter, Tick now, TraceLog& trace);

  /// Requester side: adopt the seed's view after acceptance.
  void adopt(const std::vector<MemberDigest>& view, Tick now, TraceLog& trace);

  /// Prepares a fresh incarnation for (re)joining.
  std::uint64_t next_incarnation() { return ++incarnation_; }

  void merge(const std::vector<MemberDigest>& digest, Tick now, TraceLog& trace);

  /// One gossip round. Emits nothing when no other live member is known.
  void gossip_round(Tick now, std::mt19937_64& rng, const std::string& dc_label,
                    Outbox& out, TraceLog& trace);

  /// Recomputes suspect/failed from heartbeat staleness.
  void detect_failures(Tick now, TraceLog& trace);

  void mark_left(NodeId target, Tick now, TraceLog& trace);

  /// This node was removed; it stops gossiping until it rejoins.
  void drop_self(Tick now, TraceLog& trace);

  std::optional<MemberStatus> status_of(NodeId id) const;
  std::optional<MemberEntry> entry(NodeId id) const;
  bool knows_live(NodeId id) const;
  bool is_voter(NodeId id) const;

  /// Non-left members in id order (including self).
  std::vector<NodeId> live_members() const;
  /// Non-left server members flagged as voters (including self if voter).
  std::vector<NodeId> voters() const;

  std::vector<MemberDigest> digest() const;
  const std::map<NodeId, MemberEntry>& entries() const { return entries_; }

  friend bool operator==(const MemberRegistry&, const MemberRegistry&) = default;

 private:
  void set_status(MemberEntry& e, MemberStatus s, Tick now, TraceLog& trace);

  NodeId self_;
  Role role_ = Role::client;
  MembershipTiming timing_;
  bool member_ = false;
  std::uint64_t incarnation_ = 0;
  std::map<NodeId, MemberEntry> entries_;
};

}  // namespace meshsim
