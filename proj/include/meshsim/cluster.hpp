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

// The simulated mesh: nodes, network, security configuration, and the
// operations the harness and adversary drive. A Cluster is a value; copying
// it forks the whole simulation.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meshsim/crypto.hpp"
#include "meshsim/goals.hpp"
#include "meshsim/node.hpp"
#include "meshsim/security.hpp"
#include "meshsim/simnet.hpp"
#include "meshsim/statestore.hpp"
#include "meshsim/trace.hpp"

namespace meshsim {

/// Who is asking: a node, plus whatever token and certificate it presents.
/// Without TLS the node id is merely claimed.
struct Identity {
  NodeId node;
  std::optional<std::string> token_id;
  std::optional<Certificate> cert;

  static Identity of(const Node& n);
};

enum class OpStatus : std::uint8_t { committed, denied, unavailable };

std::string_view to_string(OpStatus status);

struct OpResult {
  OpStatus status = OpStatus::unavailable;
  std::uint64_t index = 0;
  std::string reason;
};

struct KvReadResult {
  OpStatus status = OpStatus::unavailable;  // committed means "served"
  std::optional<std::string> value;
  std::string reason;
};

struct MintResult {
  OpStatus status = OpStatus::unavailable;
  std::optional<AclToken> token;
};

struct SubmitTicket {
  OpStatus status = OpStatus::unavailable;
  NodeId leader;
  std::uint64_t index = 0;
  std::uint64_t term = 0;
  std::string reason;
};

struct ForceLeaveResult {
  bool removed = false;
  std::optional<ForceLeaveRejection> reason;
};

/// Per-term record of which leaders benign servers followed.
struct ElectionSafetyMonitor {
  std::map<std::uint64_t, std::set<NodeId>> leaders_by_term;

  bool holds() const;
};

class Cluster {
 public:
  Cluster(SecurityConfig security, SimConstants constants, std::uint64_t seed,
          bool open_registry = false);

  // Node lifecycle.

  NodeId spawn_node(NodeConfig config, SecretStore secrets,
                    std::optional<NodeId> id = std::nullopt);
  SecretDump compromise(NodeId n);
  void crash(NodeId n);
  /// Restarts a crashed node and rejoins it through a live member.
  void restart(NodeId n);

  // Membership.

  /// Makes `n` the first member of a fresh cluster.
  void bootstrap(NodeId n);
  /// Request built from the node's own configuration and secret store.
  JoinRequest join_request_for(NodeId n) const;
  /// Sends the request to `seed` and runs until the seed has decided.
  JoinDecision join(NodeId n, NodeId seed, JoinRequest req);
  JoinDecision join(NodeId n, NodeId seed);
  /// Sends the node's own join request without waiting for the outcome.
  void join_async(NodeId n, NodeId seed);
  /// Seed-side decision for `n`'s latest join, once one was reached.
  std::optional<JoinDecision> join_decision(NodeId n) const;

  /// Broadcasts a force-leave for `target` from `issuer`, then runs one tick.
  /// The result is the decision benign members reach.
  ForceLeaveResult force_leave(NodeId issuer, NodeId target,
                               std::optional<std::string> token_id);

  // Network.

  TapId attach_tap(NodeId a, NodeId b);
  const std::vector<Envelope>& read_tap(TapId id) const;

  // Simulation loop.

  void step();
  void run(Tick ticks);
  /// Steps until `done` or `max_ticks` elapse; returns whether `done` held.
  bool run_until(const std::function<bool(const Cluster&)>& done, Tick max_ticks);
  Tick now() const { return net_.now(); }

  // Consensus.

  /// Leader currently able to commit: alive, a member, holding a lease.
  std::optional<NodeId> serving_leader() const;
  bool available() const { return serving_leader().has_value(); }

  SubmitTicket submit(const Identity& caller, Mutation m, Verb verb,
                      const Resource& res);
  OpResult await_commit(const SubmitTicket& ticket, Tick max_ticks = 20);

  // State store.

  KvReadResult kv_get(const Identity& caller, const std::string& key);
  OpResult kv_put(const Identity& caller, const std::string& key,
                  const std::string& value);
  OpResult register_service(const Identity& caller, ServiceRecord rec);
  std::optional<ServiceRecord> resolve_service(const std::string& name) const;
  /// One-time creation of the initial management token, handed to `n`.
  std::optional<AclToken> acl_bootstrap(NodeId n);
  MintResult acl_mint(const Identity& caller, std::vector<Scope> scopes,
                      Tick lifetime = kInfiniteLifetime);
  /// Out-of-band delivery (the operator's secure channel) into a node's store.
  void distribute_token(NodeId n, const AclToken& token);
  void distribute_cert(NodeId n, const Certificate& cert);
  void distribute_gossip_key(NodeId n, const GossipKey& key);
  int manual_steps() const { return manual_steps_; }

  // Unauthenticated registry API (open-registry deployments only).

  OpResult registry_write(ServiceRecord rec, std::optional<NodeId> actor);
  std::optional<ServiceRecord> registry_read(const std::string& name,
                                             std::optional<NodeId> actor);
  bool open_registry() const { return open_registry_; }

  // Introspection.

  const SecurityConfig& security() const { return security_; }
  const SimConstants& constants() const { return constants_; }
  KeyGenerator& keys() { return keys_; }
  const TraceLog& trace() const { return trace_; }
  TraceLog& trace() { return trace_; }
  GoalTracker& goals() { return goals_; }
  const GoalTracker& goals() const { return goals_; }
  const ElectionSafetyMonitor& election_safety() const { return safety_; }
  const std::vector<TickObservation>& timeline() const { return timeline_; }
  const Network& network() const { return net_; }

  bool has_node(NodeId id) const { return nodes_.contains(id); }
  Node& node(NodeId id);
  const Node& node(NodeId id) const;
  std::vector<NodeId> node_ids() const;
  NodeId next_free_id() const;

  /// Gate inputs derived from a node's own secrets.
  GateContext gate_context(const Node& n) const;

 private:
  BudgetReport process_inbox(Node& n);
  int classify_cost(const Node& n, const Envelope& env, bool& handle) const;
  void handle(Node& n, const Envelope& env);
  void run_timers(Node& n);
  void flush(NodeId src, Outbox& out);
  void send_one(NodeId src, const Outgoing& msg);
  void apply_committed(Node& n);
  void observe();
  void after_membership_change(Node& n);
  bool identity_authentic(const Identity& caller) const;
  void note_manipulation(const Identity& caller, const std::string& owner_scope,
                         const std::string& what);
  std::vector<NodeId> voters_of(const Node& n) const;

  SecurityConfig security_;
  SimConstants constants_;
  std::uint64_t seed_ = 0;
  bool open_registry_ = false;
  KeyGenerator keys_;
  Network net_;
  std::map<NodeId, Node> nodes_;
  TraceLog trace_;
  GoalTracker goals_;
  ElectionSafetyMonitor safety_;
  std::vector<TickObservation> timeline_;
  std::map<NodeId, JoinDecision> join_decisions_;
  // Benign recipients' verdicts on the force-leave currently in flight.
  std::vector<ForceLeaveDecision> force_leave_verdicts_;
  bool acl_bootstrapped_ = false;
  std::optional<bool> last_available_;
  int manual_steps_ = 0;
};

}  // namespace meshsim
