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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "meshsim/crypto.hpp"
#include "meshsim/statestore.hpp"
#include "meshsim/types.hpp"

namespace meshsim {

enum class MemberStatus : std::uint8_t { alive, suspect, failed, left };

std::string_view to_string(MemberStatus status);

struct JoinRequest {
  NodeId requester;
  Role claimed_role = Role::client;
  std::string dc_label;
  std::optional<Certificate> presented_cert;
  std::optional<std::string> token_id;
  bool bootstrapper = false;
  std::uint64_t incarnation = 0;

  friend bool operator==(const JoinRequest&, const JoinRequest&) = default;
};

/// One row of a gossiped membership view.
struct MemberDigest {
  NodeId id;
  Role role = Role::client;
  bool left = false;
  bool voter = false;
  std::uint64_t incarnation = 0;
  std::uint64_t heartbeat = 0;

  friend bool operator==(const MemberDigest&, const MemberDigest&) = default;
};

struct JoinReply {
  bool accepted = false;
  std::string reason;
  std::vector<MemberDigest> view;

  friend bool operator==(const JoinReply&, const JoinReply&) = default;
};

/// Serf-style heartbeat. Carries the sender's datacenter tag in its payload.
struct Heartbeat {
  NodeId sender;
  std::string dc_label;
  std::vector<MemberDigest> digest;

  friend bool operator==(const Heartbeat&, const Heartbeat&) = default;
};

struct ForceLeave {
  NodeId issuer;
  NodeId target;
  std::optional<std::string> token_id;

  friend bool operator==(const ForceLeave&, const ForceLeave&) = default;
};

struct LogEntry {
  std::uint64_t term = 0;
  std::uint64_t index = 0;
  Mutation mutation;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct VoteRequest {
  std::uint64_t term = 0;
  NodeId candidate;
  std::uint64_t last_log_index = 0;
  std::uint64_t last_log_term = 0;

  friend bool operator==(const VoteRequest&, const VoteRequest&) = default;
};

struct VoteReply {
  std::uint64_t term = 0;
  NodeId voter;
  bool granted = false;

  friend bool operator==(const VoteReply&, const VoteReply&) = default;
};

struct AppendEntries {
  std::uint64_t term = 0;
  NodeId leader;
  std::uint64_t prev_index = 0;
  std::uint64_t prev_term = 0;
  std::vector<LogEntry> entries;
  std::uint64_t leader_commit = 0;

  friend bool operator==(const AppendEntries&, const AppendEntries&) = default;
};

struct AppendReply {
  std::uint64_t term = 0;
  NodeId follower;
  bool success = false;
  std::uint64_t match_index = 0;

  friend bool operator==(const AppendReply&, const AppendReply&) = default;
};

/// What a passive observer sees in place of a sealed payload.
struct Opaque {
  friend bool operator==(const Opaque&, const Opaque&) = default;
};

using Message =
    std::variant<Opaque, JoinRequest, JoinReply, Heartbeat, ForceLeave,
                 VoteRequest, VoteReply, AppendEntries, AppendReply>;

std::string_view message_kind(const Message& m);

bool is_consensus(const Message& m);

/// Plaintext datacenter label carried by a message, if any.
std::optional<std::string> visible_dc_label(const Message& m);

}  // namespace meshsim
