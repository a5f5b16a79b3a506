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

#include "meshsim/consensus.hpp"

#include <algorithm>

namespace meshsim {

namespace {

// Claimed by a forging candidate; larger than any honest log.
constexpr std::uint64_t kForgedLogIndex = std::uint64_t{1} << 40;
// Re-campaign period of a dueling candidate.
constexpr Tick kDuelPeriod = 2;

bool contains(const std::vector<NodeId>& ids, NodeId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

}  // namespace

std::string_view to_string(RaftRole role) {
  switch (role) {
    case RaftRole::follower: return "follower";
    case RaftRole::candidate: return "candidate";
    case RaftRole::leader: return "leader";
  }
  return "?";
}

RaftNode::RaftNode(NodeId self, RaftTiming timing, std::uint64_t seed)
    : self_(self), timing_(timing), rng_(seed) {}

Tick RaftNode::draw_timeout() {
  const Tick span = timing_.election_timeout_max - timing_.election_timeout_min + 1;
  return timing_.election_timeout_min + rng_() % span;
}

void RaftNode::reset_timer(Tick now) { election_deadline_ = now + draw_timeout(); }

bool RaftNode::sticky(Tick now) const {
  if (is_leader()) return true;
  return leader_.has_value() &&
         now - last_leader_contact_ < timing_.election_timeout_min;
}

void RaftNode::set_leader(std::optional<NodeId> leader, Tick now, TraceLog& trace) {
  if (leader_ == leader) return;
  leader_ = leader;
  trace.emit(now, self_, "raft_leader",
             (leader ? "follows " + to_string(*leader) : std::string("none")) +
                 " term=" + std::to_string(state_.term));
}

void RaftNode::become_follower(std::uint64_t term, Tick now, TraceLog& trace) {
  if (term > state_.term) {
    state_.term = term;
    state_.voted_for.reset();
    set_leader(std::nullopt, now, trace);
  }
  if (state_.role != RaftRole::follower) {
    if (state_.role == RaftRole::leader) set_leader(std::nullopt, now, trace);
    state_.role = RaftRole::follower;
    trace.emit(now, self_, "raft_role", "follower term=" + std::to_string(state_.term));
  }
}

void RaftNode::become_candidate(Tick now, const std::vector<NodeId>& voters,
                                Outbox& out, TraceLog& trace) {
  ++state_.term;
  state_.role = RaftRole::candidate;
  state_.voted_for = self_;
  votes_ = {self_};
  set_leader(std::nullopt, now, trace);
  if (misbehaviour_.campaign_every_tick)
    election_deadline_ = now + kDuelPeriod;
  else
    reset_timer(now);
  trace.emit(now, self_, "raft_role", "candidate term=" + std::to_string(state_.term));

  VoteRequest req{state_.term, self_, state_.last_index(), state_.last_term()};
  if (misbehaviour_.forge_log_claims) {
    req.last_log_index = kForgedLogIndex;
    req.last_log_term = state_.term - 1;
  }
  for (NodeId v : voters)
    if (v != self_) out.push_back({v, Channel::rpc, req});
  if (votes_.size() * 2 > voters.size()) become_leader(now, voters, out, trace);
}

void RaftNode::become_leader(Tick now, const std::vector<NodeId>& voters,
                             Outbox& out, TraceLog& trace) {
  state_.role = RaftRole::leader;
  set_leader(self_, now, trace);
  trace.emit(now, self_, "raft_role", "leader term=" + std::to_string(state_.term));
  next_index_.clear();
  match_index_.clear();
  last_ack_.clear();
  state_.log.push_back({state_.term, state_.last_index() + 1, Noop{}});
  for (NodeId v : voters) next_index_[v] = state_.last_index();
  broadcast_append(now, voters, out);
  advance_commit(voters, now, trace);
}

void RaftNode::tick(Tick now, const std::vector<NodeId>& voters, Outbox& out,
                    TraceLog& trace) {
  if (!contains(voters, self_)) {
    if (state_.role != RaftRole::follower) step_down(now, trace);
    return;
  }
  if (is_leader()) {
    broadcast_append(now, voters, out);
    advance_commit(voters, now, trace);
    return;
  }
  const bool duel_start =
      misbehaviour_.campaign_every_tick && state_.role == RaftRole::follower;
  if (duel_start || now >= election_deadline_) become_candidate(now, voters, out, trace);
}

void RaftNode::broadcast_append(Tick /*now*/, const std::vector<NodeId>& voters,
                                Outbox& out) {
  for (NodeId v : voters) {
    if (v == self_) continue;
    auto [it, inserted] = next_index_.try_emplace(v, 1);
    const std::uint64_t next = std::max<std::uint64_t>(it->second, 1);
    const std::uint64_t prev = std::min(next - 1, state_.last_index());
    AppendEntries ae{state_.term, self_, prev, state_.term_at(prev), {},
                     state_.commit_index};
    ae.entries.assign(state_.log.begin() + static_cast<std::ptrdiff_t>(prev),
                      state_.log.end());
    out.push_back({v, Channel::rpc, std::move(ae)});
  }
}

void RaftNode::on_vote_request(const VoteRequest& req, Tick now,
                               const std::vector<NodeId>& voters, Outbox& out,
                               TraceLog& trace) {
  auto reply = [&](bool granted) {
    out.push_back({req.candidate, Channel::rpc, VoteReply{state_.term, self_, granted}});
  };
  if (!contains(voters, req.candidate)) return;
  if (sticky(now) && leader_ != req.candidate) return reply(false);
  if (req.term < state_.term) return reply(false);
  if (req.term > state_.term) become_follower(req.term, now, trace);

  const bool up_to_date =
      req.last_log_term > state_.last_term() ||
      (req.last_log_term == state_.last_term() &&
       req.last_log_index >= state_.last_index());

  // Same-term candidates resolve deterministically: the higher id yields.
  if (state_.role == RaftRole::candidate && !misbehaviour_.campaign_every_tick &&
      req.candidate < self_ && up_to_date) {
    state_.role = RaftRole::follower;
    state_.voted_for.reset();
    votes_.clear();
    trace.emit(now, self_, "raft_role",
               "yield to " + to_string(req.candidate) + " term=" +
                   std::to_string(state_.term));
  }

  const bool free_vote = !state_.voted_for || *state_.voted_for == req.candidate;
  if (state_.role == RaftRole::follower && free_vote && up_to_date) {
    state_.voted_for = req.candidate;
    reset_timer(now);
    trace.emit(now, self_, "vote", "for " + to_string(req.candidate) + " term=" +
                                       std::to_string(state_.term));
    return reply(true);
  }
  reply(false);
}

void RaftNode::on_vote_reply(const VoteReply& reply, Tick now,
                             const std::vector<NodeId>& voters, Outbox& out,
                             TraceLog& trace) {
  if (reply.term > state_.term) {
    become_follower(reply.term, now, trace);
    reset_timer(now);
    return;
  }
  if (state_.role != RaftRole::candidate || reply.term != state_.term ||
      !reply.granted)
    return;
  votes_.insert(reply.voter);
  std::size_t tally = 0;
  for (NodeId v : voters)
    if (votes_.contains(v)) ++tally;
  if (tally * 2 > voters.size()) become_leader(now, voters, out, trace);
}

void RaftNode::on_append_entries(const AppendEntries& req, Tick now, Outbox& out,
                                 TraceLog& trace) {
  const bool dueling = misbehaviour_.campaign_every_tick && !is_leader();
  if (!dueling) {
    if (req.term < state_.term) {
      out.push_back({req.leader, Channel::rpc,
                     AppendReply{state_.term, self_, false, state_.last_index()}});
      return;
    }
    become_follower(req.term, now, trace);
    set_leader(req.leader, now, trace);
    last_leader_contact_ = now;
    reset_timer(now);
  }

  // A dueling candidate still copies the log so it can lead later, but never
  // acknowledges or yields.
  if (req.prev_index > state_.last_index() ||
      state_.term_at(req.prev_index) != req.prev_term) {
    if (!dueling)
      out.push_back({req.leader, Channel::rpc,
                     AppendReply{state_.term, self_, false, state_.last_index()}});
    return;
  }
  for (const auto& e : req.entries) {
    if (e.index <= state_.last_index()) {
      if (state_.term_at(e.index) == e.term) continue;
      state_.log.resize(e.index - 1);
    }
    state_.log.push_back(e);
  }
  const std::uint64_t last_new = req.prev_index + req.entries.size();
  if (req.leader_commit > state_.commit_index)
    state_.commit_index = std::min(req.leader_commit, last_new);
  if (!dueling)
    out.push_back({req.leader, Channel::rpc,
                   AppendReply{state_.term, self_, true, last_new}});
}

void RaftNode::on_append_reply(const AppendReply& reply, Tick now,
                               const std::vector<NodeId>& voters, TraceLog& trace) {
  if (reply.term > state_.term) {
    become_follower(reply.term, now, trace);
    reset_timer(now);
    return;
  }
  if (!is_leader() || reply.term != state_.term) return;
  last_ack_[reply.follower] = now;
  if (reply.success) {
    auto& m = match_index_[reply.follower];
    m = std::max(m, reply.match_index);
    next_index_[reply.follower] = m + 1;
    advance_commit(voters, now, trace);
  } else {
    auto& n = next_index_[reply.follower];
    n = std::max<std::uint64_t>(1, std::min(n - 1, reply.match_index + 1));
  }
}

void RaftNode::advance_commit(const std::vector<NodeId>& voters, Tick now,
                              TraceLog& trace) {
  if (!contains(voters, self_)) return;
  for (std::uint64_t n = state_.last_index(); n > state_.commit_index; --n) {
    if (state_.term_at(n) != state_.term) break;
    std::size_t count = 0;
    for (NodeId v : voters) {
      if (v == self_) {
        ++count;
        continue;
      }
      auto it = match_index_.find(v);
      if (it != match_index_.end() && it->second >= n) ++count;
    }
    if (count * 2 > voters.size()) {
      state_.commit_index = n;
      trace.emit(now, self_, "commit", "index=" + std::to_string(n));
      break;
    }
  }
}

void RaftNode::forget_leader(NodeId removed, TraceLog& trace, Tick now) {
  if (leader_ != removed) return;
  set_leader(std::nullopt, now, trace);
  last_leader_contact_ = 0;
}

void RaftNode::step_down(Tick now, TraceLog& trace) {
  if (state_.role == RaftRole::follower) return;
  state_.role = RaftRole::follower;
  set_leader(std::nullopt, now, trace);
  trace.emit(now, self_, "raft_role", "follower term=" + std::to_string(state_.term));
  reset_timer(now);
}

std::uint64_t RaftNode::append_local(Mutation m) {
  const std::uint64_t index = state_.last_index() + 1;
  state_.log.push_back({state_.term, index, std::move(m)});
  return index;
}

bool RaftNode::lease_valid(Tick now, const std::vector<NodeId>& voters) const {
  if (!is_leader() || !contains(voters, self_)) return false;
  std::size_t fresh = 0;
  for (NodeId v : voters) {
    if (v == self_) {
      ++fresh;
      continue;
    }
    auto it = last_ack_.find(v);
    if (it != last_ack_.end() && now - it->second <= timing_.lease_ticks) ++fresh;
  }
  return fresh * 2 > voters.size();
}

std::vector<LogEntry> RaftNode::take_committed() {
  std::vector<LogEntry> out;
  while (applied_index_ < state_.commit_index &&
         applied_index_ < state_.last_index()) {
    out.push_back(state_.log[applied_index_]);
    ++applied_index_;
  }
  return out;
}

}  // namespace meshsim
