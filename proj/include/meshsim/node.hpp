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
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "meshsim/consensus.hpp"
#include "meshsim/crypto.hpp"
#include "meshsim/membership.hpp"
#include "meshsim/simnet.hpp"
#include "meshsim/statestore.hpp"

namespace meshsim {

struct NodeConfig {
  Role role = Role::client;
  std::string dc_label{kDefaultDcLabel};
  bool bootstrapper = false;
  bool verify_server_hostname = true;
  Allegiance allegiance = Allegiance::benign;
};

/// Everything a node keeps on disk, in plaintext.
struct SecretStore {
  std::string dc_label;
  std::optional<GossipKey> gossip_key;
  std::optional<AclToken> acl_token;
  std::optional<Certificate> cert;
  std::optional<CaKey> ca_key;
  /// Public id of the CA this node trusts. Not secret.
  std::string trusted_ca;

  friend bool operator==(const SecretStore&, const SecretStore&) = default;
};

/// A compromise hands over the store verbatim.
using SecretDump = SecretStore;

enum class NodeState : std::uint8_t { alive, crashed, left };

std::string_view to_string(NodeState state);

/// Sybil flood behaviour: `rate` consensus-shaped messages per tick to each target.
struct FloodPlan {
  int rate = 0;
  std::vector<NodeId> targets;
};

class Node {
 public:
  Node(NodeId id, NodeConfig config, SecretStore secrets,
       MembershipTiming membership_timing, RaftTiming raft_timing,
       ProcessingBudget budget, std::uint64_t seed);

  NodeId id() const { return id_; }
  const NodeConfig& config() const { return config_; }
  NodeConfig& config() { return config_; }
  const SecretStore& secrets() const { return secrets_; }
  SecretStore& secrets() { return secrets_; }

  NodeState state() const { return state_; }
  void set_state(NodeState s) { state_ = s; }
  bool alive() const { return state_ == NodeState::alive; }
  bool benign() const { return config_.allegiance == Allegiance::benign; }

  MemberRegistry& members() { return members_; }
  const MemberRegistry& members() const { return members_; }

  bool has_raft() const { return raft_.has_value(); }
  RaftNode& raft() { return *raft_; }
  const RaftNode& raft() const { return *raft_; }

  StateMachine& replica() { return replica_; }
  const StateMachine& replica() const { return replica_; }

  std::deque<Envelope>& inbox() { return inbox_; }
  const std::deque<Envelope>& inbox() const { return inbox_; }

  const ProcessingBudget& budget() const { return budget_; }
  void set_budget(ProcessingBudget b) { budget_ = b; }

  FloodPlan& flood() { return flood_; }
  const FloodPlan& flood() const { return flood_; }

  std::mt19937_64& rng() { return rng_; }

  const BudgetReport& last_budget_report() const { return last_report_; }
  void set_budget_report(BudgetReport r) { last_report_ = r; }

 private:
  NodeId id_;
  NodeConfig config_;
  SecretStore secrets_;
  NodeState state_ = NodeState::alive;
  MemberRegistry members_;
  std::optional<RaftNode> raft_;
  StateMachine replica_;
  std::deque<Envelope> inbox_;
  ProcessingBudget budget_;
  FloodPlan flood_;
  std::mt19937_64 rng_;
  BudgetReport last_report_;
};

}  // namespace meshsim
