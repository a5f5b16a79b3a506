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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meshsim/cluster.hpp"
#include "meshsim/deployment.hpp"
#include "meshsim/goals.hpp"

namespace meshsim {

enum class AdversaryLevel : std::uint8_t {
  unprivileged,
  client_compromise,
  server_compromise,
  leader_compromise,
};

inline constexpr AdversaryLevel kAllLevels[] = {
    AdversaryLevel::unprivileged, AdversaryLevel::client_compromise,
    AdversaryLevel::server_compromise, AdversaryLevel::leader_compromise};

std::string_view to_string(AdversaryLevel level);
AdversaryLevel parse_level(std::string_view text);

enum class StepKind : std::uint8_t {
  sniff_label,
  join_as,
  replicate_key,
  flood,
  force_leave,
  kv_read,
  kv_write,
  register_service,
  mint_cert,
  bootstrap_conflict,
  open_registry_write,
};

std::string_view to_string(StepKind kind);
StepKind parse_step_kind(std::string_view text);

struct AttackStep {
  StepKind kind = StepKind::sniff_label;
  Role role = Role::server;
  int count = 0;  // flood size or certificates to mint
  int rate = 0;
  std::optional<NodeId> target;
  std::string key;
  std::string value;
  std::optional<ServiceRecord> record;
};

struct StepOutcome {
  StepKind kind = StepKind::sniff_label;
  bool success = false;
  std::string detail;
};

/// Material the adversary holds, from sniffing, dumps, and minting.
struct Credentials {
  std::optional<std::string> dc_label;
  std::optional<GossipKey> gossip_key;
  std::optional<AclToken> token;
  std::optional<Certificate> stolen_cert;
  std::optional<CaKey> ca_key;
  std::string trusted_ca;
  std::map<NodeId, Certificate> minted;
};

struct FloodOutcome {
  int joined = 0;
  int rejected = 0;
  std::optional<Tick> first_unavailable;
  bool disruption = false;
};

struct TakeoverOutcome {
  bool joined = false;
  bool force_leave_removed = false;
  bool takeover = false;
};

/// Executes attack steps strictly with the credentials held so far.
class AdversaryController {
 public:
  AdversaryController(Cluster& cluster, AdversaryLevel level);

  const Credentials& credentials() const { return creds_; }
  const std::vector<StepOutcome>& outcomes() const { return outcomes_; }
  const std::vector<NodeId>& footholds() const { return footholds_; }
  std::optional<NodeId> compromised() const { return compromised_; }

  /// Compromises `target` (no-op for the unprivileged level) and absorbs the dump.
  void acquire_position(NodeId target);
  /// One passive tap on the given link.
  void place_tap(NodeId a, NodeId b);

  bool sniff_label();
  bool replicate_key();
  int mint_cert(Role role, int count);
  std::optional<NodeId> join_as(Role role, bool bootstrapper = false);
  bool kv_read(const std::string& key);
  bool kv_write(const std::string& key, const std::string& value);
  bool register_service(ServiceRecord rec);
  bool force_leave(NodeId target);
  FloodOutcome flood(int k, Role role, int rate);
  TakeoverOutcome takeover_sequence();
  bool open_registry_write(ServiceRecord rec);

  bool run_step(const AttackStep& step);

  /// Best member identity the adversary controls, preferring the compromised node.
  std::optional<Identity> acting_identity() const;

 private:
  NodeId spawn(Role role, bool bootstrapper);
  std::optional<NodeId> seed_node() const;
  /// Cluster servers the adversary did not spawn (compromised ones included).
  std::vector<NodeId> target_servers() const;
  void record(StepKind kind, bool success, std::string detail);

  Cluster& c_;
  AdversaryLevel level_;
  Credentials creds_;
  std::optional<NodeId> compromised_;
  std::optional<TapId> tap_;
  std::vector<NodeId> footholds_;
  std::set<NodeId> spawned_;
  std::vector<StepOutcome> outcomes_;
};

struct PlaybookResult {
  GoalReport report;
  std::vector<StepOutcome> steps;
  std::string trace;
  Tick attack_ticks = 0;
  /// Simulation clock at the end of the run, deployment included.
  Tick final_tick = 0;
  bool deployed = false;
  std::optional<FloodOutcome> flood;
};

/// Fixed-priority planner: acquire credentials, get a foothold, probe for
/// manipulation, attempt takeover, then dismantle via force-leave and fall
/// back to flooding. Returns the goals actually reached.
PlaybookResult run_playbook(AdversaryLevel level, const SecurityConfig& config,
                            const SimConstants& constants, std::uint64_t seed);
PlaybookResult run_playbook(AdversaryLevel level, const SecurityConfig& config,
                            const SimConstants& constants, std::uint64_t seed,
                            const Topology& topology, bool open_registry);

/// Runs `steps` verbatim against a fresh deployment instead of the planner.
PlaybookResult run_steps(AdversaryLevel level, const SecurityConfig& config,
                         const SimConstants& constants, std::uint64_t seed,
                         const Topology& topology, bool open_registry,
                         const std::vector<AttackStep>& steps);

/// Isolated flood experiment: `k` sybils against a converged deployment.
FloodOutcome run_flood(const SecurityConfig& config, const SimConstants& constants,
                       std::uint64_t seed, int k);

}  // namespace meshsim
