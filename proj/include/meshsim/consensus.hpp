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

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "meshsim/membership.hpp"
#include "meshsim/message.hpp"
#include "meshsim/trace.hpp"
#include "meshsim/types.hpp"

namespace meshsim {

enum class RaftRole : std::uint8_t { follower, candidate, leader };

std::string_view to_string(RaftRole role);

struct RaftState {
  std::uint64_t term = 0;
  RaftRole role = RaftRole::follower;
  std::optional<NodeId> voted_for;
  std::vector<LogEntry> log;  // log[i].index == i + 1
  std::uint64_t commit_index = 0;

  std::uint64_t last_index() const { return log.size(); }
  std::uint64_t last_term() const { return log.empty() ? 0 : log.back().term; }
  std::uint64_t term_at(std::uint64_t index) const {
    return index == 0 || index > log.size() ? 0 : log[index - 1].term;
  }

  friend bool operator==(const RaftState&, const RaftState&) = default;
};

/// Per-tick processing capacity and per-message costs.
struct ProcessingBudget {
  int capacity = 1000;
  int c_drop = 1;
  int c_verify = 25;
  int c_consensus = 10;

  static ProcessingBudget from(const SimConstants& k) {
    return {k.budget, k.cost_drop, k.cost_verify, k.cost_consensus};
  }
  static ProcessingBudget unlimited() {
    return {std::numeric_limits<int>::max(), 0, 0, 0};
  }

  friend bool operator==(const ProcessingBudget&, const ProcessingBudget&) = default;
};

struct BudgetReport {
  std::size_t processed = 0;
  int spent = 0;
  int remaining = 0;
  std::size_t backlog = 0;
  bool timers_serviced = true;
};

/// Adversary-only deviations from the protocol.
struct RaftMisbehaviour {
  /// Campaign every tick with an inflated term (dueling bootstrapper).
  bool campaign_every_tick = false;
  /// Claim an arbitrarily up-to-date log in vote requests.
  bool forge_log_claims = false;

  friend bool operator==(const RaftMisbehaviour&, const RaftMisbehaviour&) = default;
};

struct RaftTiming {
  Tick election_timeout_min = 3;
  Tick election_timeout_max = 6;
  Tick lease_ticks = 3;

  friend bool operator==(const RaftTiming&, const RaftTiming&) = default;
};

/// Leader election and log replication for one server. A server that has
/// heard from a live leader within `election_timeout_min` ticks (or is the
/// leader) rejects vote requests without adopting their term.
class RaftNode {
 public:
  RaftNode() = default;
  RaftNode(NodeId self, RaftTiming timing, std::uint64_t seed);

  const RaftState& state() const { return state_; }
  std::optional<NodeId> leader() const { return leader_; }
  bool is_leader() const { return state_.role == RaftRole::leader; }
  Tick last_leader_contact() const { return last_leader_contact_; }

  RaftMisbehaviour& misbehaviour() { return misbehaviour_; }

  void reset_timer(Tick now);

  /// Timer phase: election timeout or leader heartbeats.
  void tick(Tick now, const std::vector<NodeId>& voters, Outbox& out,
            TraceLog& trace);

  void on_vote_request(const VoteRequest& req, Tick now,
                       const std::vector<NodeId>& voters, Outbox& out,
                       TraceLog& trace);
  void on_vote_reply(const VoteReply& reply, Tick now,
                     const std::vector<NodeId>& voters, Outbox& out,
                     TraceLog& trace);
  void on_append_entries(const AppendEntries& req, Tick now, Outbox& out,
                         TraceLog& trace);
  void on_append_reply(const AppendReply& reply, Tick now,
                       const std::vector<NodeId>& voters, TraceLog& trace);

  /// The followed leader was removed from membership.
  void forget_leader(NodeId removed, TraceLog& trace, Tick now);
  /// This node itself left: it stops leading.
  void step_down(Tick now, TraceLog& trace);

  /// Leader only; returns the new entry's index.
  std::uint64_t append_local(Mutation m);

  /// Leader holds acks from a majority of `voters` within the lease.
  bool lease_valid(Tick now, const std::vector<NodeId>& voters) const;

  /// Entries committed since the last call, in order.
  std::vector<LogEntry> take_committed();

  friend bool operator==(const RaftNode&, const RaftNode&) = default;

 private:
  void become_follower(std::uint64_t term, Tick now, TraceLog& trace);
  void become_candidate(Tick now, const std::vector<NodeId>& voters,
                        Outbox& out, TraceLog& trace);
  void become_leader(Tick now, const std::vector<NodeId>& voters,
                     Outbox& out, TraceLog& trace);
  void set_leader(std::optional<NodeId> leader, Tick now, TraceLog& trace);
  void broadcast_append(Tick now, const std::vector<NodeId>& voters,
                        Outbox& out);
  void advance_commit(const std::vector<NodeId>& voters, Tick now,
                      TraceLog& trace);
  bool sticky(Tick now) const;
  Tick draw_timeout();

  NodeId self_;
  RaftTiming timing_;
  std::mt19937_64 rng_;
  RaftState state_;
  RaftMisbehaviour misbehaviour_;
  std::optional<NodeId> leader_;
  Tick last_leader_contact_ = 0;
  Tick election_deadline_ = 0;
  std::set<NodeId> votes_;
  std::map<NodeId, std::uint64_t> next_index_;
  std::map<NodeId, std::uint64_t> match_index_;
  std::map<NodeId, Tick> last_ack_;
  std::uint64_t applied_index_ = 0;
};

}  // namespace meshsim
