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

#include "meshsim/membership.hpp"

#include <algorithm>

namespace meshsim {

void MemberRegistry::set_status(MemberEntry& e, MemberStatus s, Tick now,
                                TraceLog& trace) {
  if (e.status == s) return;
  e.status = s;
  trace.emit(now, self_, "member_status",
             to_string(e.digest.id) + "=" + std::string(to_string(s)));
}

void MemberRegistry::bootstrap(bool voter, Tick now, TraceLog& trace) {
  if (incarnation_ == 0) incarnation_ = 1;
  member_ = true;
  entries_[self_] = {{self_, role_, false, voter, incarnation_, 0}, now,
                     MemberStatus::alive};
  trace.emit(now, self_, "bootstrap", voter ? "voter" : "non-voter");
}

void MemberRegistry::admit(const JoinRequest& req, bool voter, Tick now,
                           TraceLog& trace) {
  MemberEntry& e = entries_[req.requester];
  e.digest = {req.requester, req.claimed_role, false, voter, req.incarnation, 0};
  e.last_progress = now;
  e.status = MemberStatus::alive;
  trace.emit(now, self_, "admit",
             to_string(req.requester) + " role=" +
                 std::string(to_string(req.claimed_role)) +
                 (voter ? " voter" : " non-voter"));
}

void MemberRegistry::adopt(const std::vector<MemberDigest>& view, Tick now,
                           TraceLog& trace) {
  member_ = true;
  for (const auto& d : view) {
    if (d.id == self_) {
      entries_[self_] = {d, now, MemberStatus::alive};
      entries_[self_].digest.incarnation = incarnation_;
      entries_[self_].digest.left = false;
    }
  }
  merge(view, now, trace);
  trace.emit(now, self_, "joined", std::to_string(view.size()) + " members");
}

void MemberRegistry::merge(const std::vector<MemberDigest>& digest, Tick now,
                           TraceLog& trace) {
  for (const auto& d : digest) {
    if (d.id == self_) {
      if (member_ && d.left && d.incarnation >= incarnation_) drop_self(now, trace);
      continue;
    }
    auto it = entries_.find(d.id);
    if (it == entries_.end()) {
      MemberEntry e{d, now, d.left ? MemberStatus::left : MemberStatus::alive};
      entries_.emplace(d.id, e);
      continue;
    }
    MemberEntry& e = it->second;
    if (d.incarnation > e.digest.incarnation) {
      e.digest = d;
      e.last_progress = now;
      set_status(e, d.left ? MemberStatus::left : MemberStatus::alive, now, trace);
    } else if (d.incarnation == e.digest.incarnation) {
      if (d.heartbeat > e.digest.heartbeat) {
        e.digest.heartbeat = d.heartbeat;
        e.last_progress = now;
      }
      e.digest.voter = e.digest.voter || d.voter;
      if (d.left && !e.digest.left) {
        e.digest.left = true;
        set_status(e, MemberStatus::left, now, trace);
      }
    }
  }
}

void MemberRegistry::gossip_round(Tick now, std::mt19937_64& rng,
                                  const std::string& dc_label, Outbox& out,
                                  TraceLog& /*trace*/) {
  if (!member_) return;
  MemberEntry& me = entries_[self_];
  ++me.digest.heartbeat;
  me.last_progress = now;

  std::vector<NodeId> peers;
  for (const auto& [id, e] : entries_)
    if (id != self_ && !e.digest.left) peers.push_back(id);
  if (peers.empty()) return;

  const std::size_t n = std::min<std::size_t>(peers.size(), timing_.fanout);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (peers.size() - i));
    std::swap(peers[i], peers[j]);
  }
  const auto view = digest();
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({peers[i], Channel::gossip, Heartbeat{self_, dc_label, view}});
}

void MemberRegistry::detect_failures(Tick now, TraceLog& trace) {
  if (!member_) return;
  for (auto& [id, e] : entries_) {
    if (id == self_ || e.digest.left) continue;
    const Tick stale = now - e.last_progress;
    MemberStatus s = MemberStatus::alive;
    if (stale >= timing_.fail_after)
      s = MemberStatus::failed;
    else if (stale >= timing_.suspect_after)
      s = MemberStatus::suspect;
    set_status(e, s, now, trace);
  }
}

void MemberRegistry::mark_left(NodeId target, Tick now, TraceLog& trace) {
  if (target == self_) {
    drop_self(now, trace);
    return;
  }
  auto it = entries_.find(target);
  if (it == entries_.end()) return;
  it->second.digest.left = true;
  set_status(it->second, MemberStatus::left, now, trace);
}

void MemberRegistry::drop_self(Tick now, TraceLog& trace) {
  if (!member_) return;
  member_ = false;
  auto& me = entries_[self_];
  me.digest.left = true;
  me.status = MemberStatus::left;
  trace.emit(now, self_, "left", "removed from cluster");
}

std::optional<MemberStatus> MemberRegistry::status_of(NodeId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.status;
}

std::optional<MemberEntry> MemberRegistry::entry(NodeId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool MemberRegistry::knows_live(NodeId id) const {
  auto it = entries_.find(id);
  return it != entries_.end() && !it->second.digest.left;
}

bool MemberRegistry::is_voter(NodeId id) const {
  auto it = entries_.find(id);
  return it != entries_.end() && !it->second.digest.left &&
         it->second.digest.role == Role::server && it->second.digest.voter;
}

std::vector<NodeId> MemberRegistry::live_members() const {
  std::vector<NodeId> ids;
  for (const auto& [id, e] : entries_)
    if (!e.digest.left) ids.push_back(id);
  return ids;
}

std::vector<NodeId> MemberRegistry::voters() const {
  std::vector<NodeId> ids;
  for (const auto& [id, e] : entries_)
    if (is_voter(id)) ids.push_back(id);
  return ids;
}

std::vector<MemberDigest> MemberRegistry::digest() const {
  std::vector<MemberDigest> out;
  out.reserve(entries_.size());
  for (const auto& [id, e] : entries_) out.push_back(e.digest);
  return out;
}

}  // namespace meshsim
