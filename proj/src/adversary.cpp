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

#include "meshsim/adversary.hpp"

#include <algorithm>

namespace meshsim {

namespace {

// Ticks the dueling bootstrapper campaigns before the leader is evicted.
constexpr Tick kConflictTicks = 3;
// Upper bound on waiting for the new leader to be recognized.
constexpr Tick kTakeoverWait = 20;
// Ticks for a force-leave verdict to spread through gossip.
constexpr Tick kDismantleSettle = 12;
// Ticks for sybil joins to resolve before the flood starts.
constexpr Tick kSybilJoinTicks = 4;

const char* const kLevelNames[] = {"unprivileged", "client", "server", "leader"};

const char* const kStepNames[] = {
    "sniff_label", "join_as",  "replicate_key",     "flood",
    "force_leave", "kv_read",  "kv_write",          "register_service",
    "mint_cert",   "bootstrap_conflict", "open_registry_write"};

}  // namespace

std::string_view to_string(AdversaryLevel level) {
  return kLevelNames[static_cast<int>(level)];
}

AdversaryLevel parse_level(std::string_view text) {
  for (auto l : kAllLevels)
    if (to_string(l) == text) return l;
  throw ScenarioError("unknown adversary level '" + std::string(text) + "'");
}

std::string_view to_string(StepKind kind) { return kStepNames[static_cast<int>(kind)]; }

StepKind parse_step_kind(std::string_view text) {
  for (int i = 0; i < static_cast<int>(std::size(kStepNames)); ++i)
    if (text == kStepNames[i]) return static_cast<StepKind>(i);
  throw ScenarioError("unknown attack step '" + std::string(text) + "'");
}

AdversaryController::AdversaryController(Cluster& cluster, AdversaryLevel level)
    : c_(cluster), level_(level) {}

void AdversaryController::record(StepKind kind, bool success, std::string detail) {
  c_.trace().emit(c_.now(), std::nullopt, "attack_" + std::string(to_string(kind)),
                  (success ? "ok " : "failed ") + detail);
  outcomes_.push_back({kind, success, std::move(detail)});
}

void AdversaryController::acquire_position(NodeId target) {
  if (level_ == AdversaryLevel::unprivileged) return;
  const SecretDump dump = c_.compromise(target);
  compromised_ = target;
  creds_.dc_label = dump.dc_label;
  if (dump.gossip_key) creds_.gossip_key = dump.gossip_key;
  if (dump.acl_token) creds_.token = dump.acl_token;
  if (dump.cert) creds_.stolen_cert = dump.cert;
  if (dump.ca_key) creds_.ca_key = dump.ca_key;
  if (!dump.trusted_ca.empty()) creds_.trusted_ca = dump.trusted_ca;
}

void AdversaryController::place_tap(NodeId a, NodeId b) { tap_ = c_.attach_tap(a, b); }

bool AdversaryController::sniff_label() {
  if (!creds_.dc_label && tap_) {
    c_.run(c_.constants().sniff_ticks);
    for (const auto& env : c_.read_tap(*tap_)) {
      if (auto label = visible_dc_label(env.payload)) {
        creds_.dc_label = *label;
        break;
      }
    }
  }
  const bool ok = creds_.dc_label.has_value();
  record(StepKind::sniff_label, ok, ok ? "label=" + *creds_.dc_label : "nothing readable");
  return ok;
}

bool AdversaryController::replicate_key() {
  const bool ok = creds_.gossip_key.has_value();
  record(StepKind::replicate_key, ok, ok ? "gossip key copied" : "no key held");
  return ok;
}

int AdversaryController::mint_cert(Role role, int count) {
  if (!creds_.ca_key) {
    record(StepKind::mint_cert, false, "no CA key");
    return 0;
  }
  NodeId next = c_.next_free_id();
  for (int i = 0; i < count; ++i) {
    const NodeId id{next.value + static_cast<std::uint32_t>(i)};
    const CertRole r = role == Role::server ? CertRole::server : CertRole::client;
    creds_.minted[id] = *issue_cert(creds_.ca_key, id, r, c_.now());
  }
  record(StepKind::mint_cert, true, std::to_string(count) + " certificates");
  return count;
}

NodeId AdversaryController::spawn(Role role, bool bootstrapper) {
  const NodeId id = c_.next_free_id();
  NodeConfig cfg;
  cfg.role = role;
  cfg.dc_label = creds_.dc_label.value_or(std::string(kDefaultDcLabel));
  cfg.bootstrapper = bootstrapper;
  cfg.allegiance = Allegiance::adversary;
  SecretStore s;
  s.dc_label = cfg.dc_label;
  s.gossip_key = creds_.gossip_key;
  s.acl_token = creds_.token;
  s.trusted_ca = creds_.trusted_ca;
  const CertRole want = role == Role::server ? CertRole::server : CertRole::client;
  if (auto it = creds_.minted.find(id); it != creds_.minted.end() && it->second.role == want)
    s.cert = it->second;
  else if (creds_.ca_key)
    s.cert = issue_cert(creds_.ca_key, id, want, c_.now());
  else
    s.cert = creds_.stolen_cert;
  spawned_.insert(id);
  return c_.spawn_node(cfg, s, id);
}

std::optional<NodeId> AdversaryController::seed_node() const {
  if (auto l = c_.serving_leader(); l && c_.node(*l).benign()) return l;
  for (NodeId id : c_.node_ids()) {
    const Node& n = c_.node(id);
    if (n.benign() && n.alive() && n.members().is_member() &&
        n.config().role == Role::server)
      return id;
  }
  return std::nullopt;
}

std::vector<NodeId> AdversaryController::target_servers() const {
  std::vector<NodeId> out;
  for (NodeId id : c_.node_ids())
    if (!spawned_.contains(id) && c_.node(id).config().role == Role::server)
      out.push_back(id);
  return out;
}

std::optional<NodeId> AdversaryController::join_as(Role role, bool bootstrapper) {
  auto seed = seed_node();
  const NodeId id = spawn(role, bootstrapper);
  if (!seed) {
    record(StepKind::join_as, false, "no seed");
    return std::nullopt;
  }
  const JoinDecision d = c_.join(id, *seed);
  if (!d.accepted) {
    record(StepKind::join_as, false,
           to_string(id) + " rejected gate=" + std::string(to_string(*d.reason)));
    return std::nullopt;
  }
  footholds_.push_back(id);
  const bool voter = c_.node(*seed).members().is_voter(id);
  record(StepKind::join_as, true,
         to_string(id) + " role=" + std::string(to_string(role)) +
             (voter ? " voter" : " non-voter"));
  return id;
}

namespace {

bool usable(const Cluster& c, NodeId id) {
  return c.has_node(id) && c.node(id).alive() && c.node(id).members().is_member();
}

}  // namespace

std::optional<Identity> AdversaryController::acting_identity() const {
  if (compromised_ && usable(c_, *compromised_)) return Identity::of(c_.node(*compromised_));
  for (NodeId f : footholds_)
    if (usable(c_, f)) return Identity::of(c_.node(f));
  return std::nullopt;
}

namespace {

std::vector<Identity> identities(const Cluster& c, std::optional<NodeId> compromised,
                                 const std::vector<NodeId>& footholds) {
  std::vector<Identity> out;
  if (compromised && usable(c, *compromised)) out.push_back(Identity::of(c.node(*compromised)));
  for (NodeId f : footholds)
    if (usable(c, f)) out.push_back(Identity::of(c.node(f)));
  return out;
}

}  // namespace

bool AdversaryController::kv_read(const std::string& key) {
  std::string last = "no identity";
  for (const auto& id : identities(c_, compromised_, footholds_)) {
    auto r = c_.kv_get(id, key);
    if (r.status == OpStatus::committed && r.value) {
      record(StepKind::kv_read, true, key + " via " + to_string(id.node));
      return true;
    }
    last = r.reason.empty() ? std::string(to_string(r.status)) : r.reason;
  }
  record(StepKind::kv_read, false, key + " " + last);
  return false;
}

bool AdversaryController::kv_write(const std::string& key, const std::string& value) {
  std::string last = "no identity";
  for (const auto& id : identities(c_, compromised_, footholds_)) {
    auto r = c_.kv_put(id, key, value);
    if (r.status == OpStatus::committed) {
      record(StepKind::kv_write, true, key + " via " + to_string(id.node));
      return true;
    }
    last = r.reason;
  }
  record(StepKind::kv_write, false, key + " " + last);
  return false;
}

bool AdversaryController::register_service(ServiceRecord rec) {
  std::string last = "no identity";
  for (const auto& id : identities(c_, compromised_, footholds_)) {
    rec.endpoint_node = id.node;
    auto r = c_.register_service(id, rec);
    if (r.status == OpStatus::committed) {
      record(StepKind::register_service, true, rec.name + " via " + to_string(id.node));
      return true;
    }
    last = r.reason;
  }
  record(StepKind::register_service, false, rec.name + " " + last);
  return false;
}

bool AdversaryController::force_leave(NodeId target) {
  std::optional<std::string> token;
  if (creds_.token) token = creds_.token->token_id;
  std::vector<NodeId> issuers;
  if (compromised_ && usable(c_, *compromised_)) issuers.push_back(*compromised_);
  for (NodeId f : footholds_)
    if (usable(c_, f)) issuers.push_back(f);
  std::string last = "no issuer";
  for (NodeId issuer : issuers) {
    if (issuer == target) continue;
    auto r = c_.force_leave(issuer, target, token);
    if (r.removed) {
      record(StepKind::force_leave, true, to_string(target) + " by " + to_string(issuer));
      return true;
    }
    last = std::string(to_string(*r.reason));
  }
  record(StepKind::force_leave, false, to_string(target) + " " + last);
  return false;
}

FloodOutcome AdversaryController::flood(int k, Role role, int rate) {
  FloodOutcome out;
  auto seed = seed_node();
  const auto targets = target_servers();
  std::vector<NodeId> sybils;
  for (int i = 0; i < k; ++i) {
    const NodeId id = spawn(role, false);
    sybils.push_back(id);
    if (seed) c_.join_async(id, *seed);
  }
  c_.run(kSybilJoinTicks);
  for (NodeId s : sybils) {
    if (c_.node(s).members().is_member())
      ++out.joined;
    else
      ++out.rejected;
    c_.node(s).flood() = FloodPlan{rate, targets};
  }
  const Tick start = c_.now();
  for (Tick t = 0; t < c_.constants().flood_ticks; ++t) {
    c_.step();
    if (!out.first_unavailable && !c_.available()) out.first_unavailable = c_.now() - start;
    if (c_.goals().report().disruption) break;
  }
  for (NodeId s : sybils) c_.node(s).flood() = FloodPlan{};
  out.disruption = c_.goals().report().disruption;
  record(StepKind::flood, out.disruption,
         "k=" + std::to_string(k) + " joined=" + std::to_string(out.joined) +
             " rate=" + std::to_string(rate));
  return out;
}

TakeoverOutcome AdversaryController::takeover_sequence() {
  TakeoverOutcome out;
  const Tick window = c_.constants().takeover_window;
  if (auto l = c_.serving_leader(); l && !c_.node(*l).benign()) {
    c_.run(window + 1);
    out.takeover = c_.goals().report().takeover;
    record(StepKind::bootstrap_conflict, out.takeover, "already leading");
    return out;
  }
  auto conflict = join_as(Role::server, true);
  out.joined = conflict.has_value();
  const auto leader = c_.serving_leader();
  if (!conflict || !leader || !c_.node(*leader).members().is_voter(*conflict)) {
    record(StepKind::bootstrap_conflict, false, conflict ? "not a voter" : "join failed");
    return out;
  }
  Node& x = c_.node(*conflict);
  x.raft().misbehaviour() = RaftMisbehaviour{true, true};
  x.raft().reset_timer(c_.now());
  c_.run(kConflictTicks);
  out.force_leave_removed = force_leave(*leader);
  if (out.force_leave_removed) {
    c_.run_until([](const Cluster& c) { return c.goals().report().takeover; },
                 kTakeoverWait);
  }
  out.takeover = c_.goals().report().takeover;
  record(StepKind::bootstrap_conflict, out.takeover,
         "conflict node " + to_string(*conflict));
  return out;
}

bool AdversaryController::open_registry_write(ServiceRecord rec) {
  std::optional<NodeId> actor = compromised_;
  auto w = c_.registry_write(rec, actor);
  auto leaked = c_.registry_read(std::string(kRegistryConfigService), actor);
  const bool ok = w.status == OpStatus::committed;
  record(StepKind::open_registry_write, ok,
         rec.name + " " + std::string(to_string(w.status)) +
             (leaked && !leaked->config.empty() ? " config leaked" : ""));
  return ok;
}

bool AdversaryController::run_step(const AttackStep& step) {
  switch (step.kind) {
    case StepKind::sniff_label: return sniff_label();
    case StepKind::join_as: return join_as(step.role).has_value();
    case StepKind::replicate_key: return replicate_key();
    case StepKind::flood:
      return flood(step.count > 0 ? step.count : c_.constants().flood_size, step.role,
                   step.rate > 0 ? step.rate : c_.constants().flood_rate)
          .disruption;
    case StepKind::force_leave: {
      if (step.target) return force_leave(*step.target);
      bool all = true;
      for (NodeId id : c_.node_ids())
        if (c_.node(id).benign() && !force_leave(id)) all = false;
      c_.run(kDismantleSettle);
      return all;
    }
    case StepKind::kv_read: return kv_read(step.key);
    case StepKind::kv_write: return kv_write(step.key, step.value);
    case StepKind::register_service: {
      ServiceRecord rec = step.record.value_or(
          ServiceRecord{std::string(kProtectedService), {}, 6666, {}, ""});
      return register_service(rec);
    }
    case StepKind::mint_cert: return mint_cert(step.role, std::max(step.count, 1)) > 0;
    case StepKind::bootstrap_conflict: return takeover_sequence().takeover;
    case StepKind::open_registry_write: {
      ServiceRecord rec = step.record.value_or(ServiceRecord{
          std::string(kRegistryConfigService), {}, 6666, {{"db_host", "rogue"}}, ""});
      return open_registry_write(rec);
    }
  }
  return false;
}

namespace {

NodeId position_for(AdversaryLevel level, const Deployment& d) {
  const auto clients = d.topology.clients();
  switch (level) {
    case AdversaryLevel::client_compromise:
      if (!clients.empty()) return clients.front();
      break;
    case AdversaryLevel::server_compromise:
      for (NodeId s : d.topology.servers())
        if (s != d.cluster.serving_leader().value_or(d.bootstrapper)) return s;
      break;
    case AdversaryLevel::leader_compromise:
      return d.cluster.serving_leader().value_or(d.bootstrapper);
    case AdversaryLevel::unprivileged:
      break;
  }
  return d.bootstrapper;
}

// Tap on a server-client link; unprivileged only.
void open_position(AdversaryController& a, AdversaryLevel level, const Deployment& d) {
  if (level == AdversaryLevel::unprivileged) {
    const auto servers = d.topology.servers();
    const auto clients = d.topology.clients();
    NodeId s = servers.back();
    for (NodeId id : servers)
      if (id != d.bootstrapper) {
        s = id;
        break;
      }
    a.place_tap(s, clients.empty() ? d.bootstrapper : clients.front());
    return;
  }
  a.acquire_position(position_for(level, d));
}

PlaybookResult finish(const Deployment& d, Tick armed_at, std::vector<StepOutcome> steps,
                      std::optional<FloodOutcome> flood) {
  PlaybookResult r;
  r.report = d.cluster.goals().report();
  r.steps = std::move(steps);
  r.trace = d.cluster.trace().render();
  r.attack_ticks = d.cluster.now() - armed_at;
  r.final_tick = d.cluster.now();
  r.deployed = true;
  r.flood = flood;
  return r;
}

}  // namespace

PlaybookResult run_playbook(AdversaryLevel level, const SecurityConfig& config,
                            const SimConstants& constants, std::uint64_t seed) {
  return run_playbook(level, config, constants, seed, Topology::standard(), false);
}

PlaybookResult run_playbook(AdversaryLevel level, const SecurityConfig& config,
                            const SimConstants& constants, std::uint64_t seed,
                            const Topology& topology, bool open_registry) {
  Deployment d = deploy(config, constants, seed, topology, open_registry);
  if (!d.converged) {
    PlaybookResult r;
    r.trace = d.cluster.trace().render();
    r.final_tick = d.cluster.now();
    return r;
  }
  Cluster& c = d.cluster;
  const Tick armed_at = c.now();
  c.goals().arm(armed_at);
  AdversaryController a(c, level);

  open_position(a, level, d);
  a.sniff_label();
  a.replicate_key();
  if (a.credentials().ca_key) a.mint_cert(Role::server, 2);

  a.join_as(Role::server);

  a.kv_read(std::string(kSecretKey));
  a.kv_write(std::string(kSecretKey), "attacker-controlled");
  a.register_service(ServiceRecord{std::string(kProtectedService), {}, 6666, {}, ""});
  if (c.open_registry())
    a.open_registry_write(ServiceRecord{std::string(kRegistryConfigService), {}, 6666,
                                        {{"db_host", "rogue"}}, ""});

  a.takeover_sequence();

  for (NodeId id : c.node_ids())
    if (c.node(id).benign() && c.node(id).members().is_member()) a.force_leave(id);
  c.run(kDismantleSettle);

  std::optional<FloodOutcome> flood;
  if (!c.goals().report().disruption)
    flood = a.flood(constants.flood_size, Role::server, constants.flood_rate);

  return finish(d, armed_at, a.outcomes(), flood);
}

PlaybookResult run_steps(AdversaryLevel level, const SecurityConfig& config,
                         const SimConstants& constants, std::uint64_t seed,
                         const Topology& topology, bool open_registry,
                         const std::vector<AttackStep>& steps) {
  Deployment d = deploy(config, constants, seed, topology, open_registry);
  if (!d.converged) {
    PlaybookResult r;
    r.trace = d.cluster.trace().render();
    r.final_tick = d.cluster.now();
    return r;
  }
  Cluster& c = d.cluster;
  const Tick armed_at = c.now();
  c.goals().arm(armed_at);
  AdversaryController a(c, level);
  open_position(a, level, d);
  for (const auto& s : steps) a.run_step(s);
  c.run(constants.takeover_window + 1);
  return finish(d, armed_at, a.outcomes(), std::nullopt);
}

FloodOutcome run_flood(const SecurityConfig& config, const SimConstants& constants,
                       std::uint64_t seed, int k) {
  Deployment d = deploy(config, constants, seed, Topology::standard(), false);
  if (!d.converged) return {};
  d.cluster.goals().arm(d.cluster.now());
  AdversaryController a(d.cluster, AdversaryLevel::unprivileged);
  return a.flood(k, Role::server, constants.flood_rate);
}

}  // namespace meshsim
