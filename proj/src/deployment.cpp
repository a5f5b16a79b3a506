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

#include "meshsim/deployment.hpp"

#include <set>

namespace meshsim {

namespace {

constexpr Tick kElectionBudget = 40;
constexpr Tick kConvergeBudget = 80;

bool seed_record(Cluster& c, const Identity& op, ServiceRecord rec) {
  const std::string name = rec.name;
  auto t = c.submit(op, ServiceRegister{std::move(rec)}, Verb::write,
                    Resource::service(name));
  return c.await_commit(t).status == OpStatus::committed;
}

}  // namespace

Topology Topology::standard(int servers, int clients) {
  Topology t;
  std::uint32_t id = 1;
  for (int i = 0; i < servers; ++i, ++id)
    t.nodes.push_back({NodeId{id}, Role::server, i == 0});
  for (int i = 0; i < clients; ++i, ++id)
    t.nodes.push_back({NodeId{id}, Role::client, false});
  return t;
}

std::vector<NodeId> Topology::servers() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes)
    if (n.role == Role::server) out.push_back(n.id);
  return out;
}

std::vector<NodeId> Topology::clients() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes)
    if (n.role == Role::client) out.push_back(n.id);
  return out;
}

std::optional<NodeId> Topology::bootstrapper() const {
  for (const auto& n : nodes)
    if (n.bootstrapper) return n.id;
  return std::nullopt;
}

void validate(const Topology& topo) {
  std::set<NodeId> ids;
  int bootstrappers = 0;
  for (const auto& n : topo.nodes) {
    if (n.id.value == 0) throw ScenarioError("node id 0 is reserved");
    if (!ids.insert(n.id).second)
      throw ScenarioError("duplicate node id " + to_string(n.id));
    if (n.bootstrapper) {
      ++bootstrappers;
      if (n.role != Role::server)
        throw ScenarioError("bootstrapper " + to_string(n.id) + " must be a server");
    }
  }
  if (bootstrappers != 1)
    throw ScenarioError("expected exactly one bootstrapper, found " +
                        std::to_string(bootstrappers));
}

bool converged(const Cluster& c) {
  auto leader = c.serving_leader();
  if (!leader) return false;
  for (NodeId id : c.node_ids()) {
    const Node& n = c.node(id);
    if (!n.benign() || !n.alive()) continue;
    if (!n.members().is_member()) return false;
    for (NodeId other : c.node_ids()) {
      const Node& o = c.node(other);
      if (!o.benign() || !o.alive() || !o.members().is_member()) continue;
      if (n.members().status_of(other) != MemberStatus::alive) return false;
    }
    if (n.has_raft() && n.raft().leader() != leader) return false;
  }
  return true;
}

Deployment deploy(const SecurityConfig& security, const SimConstants& constants,
                  std::uint64_t seed, const Topology& topology, bool open_registry) {
  validate(topology);
  const NodeId boot = *topology.bootstrapper();
  Deployment d{Cluster(security, constants, seed, open_registry), topology, boot,
               std::nullopt, false};
  Cluster& c = d.cluster;
  KeyGenerator& keys = c.keys();

  const std::string label = security.label_secret ? keys.fresh_symbol("dc")
                                                  : std::string(kDefaultDcLabel);
  std::optional<GossipKey> gossip_key;
  if (security.gossip_encryption) gossip_key = generate_gossip_key(keys);
  std::optional<CaState> ca;
  if (security.tls) ca = init_ca(keys, boot);

  for (const auto& spec : topology.nodes) {
    NodeConfig cfg;
    cfg.role = spec.role;
    cfg.dc_label = label;
    cfg.bootstrapper = spec.bootstrapper;
    SecretStore secrets;
    secrets.dc_label = label;
    if (ca) {
      secrets.trusted_ca = ca->key.public_id();
      if (spec.id == boot) secrets.ca_key = ca->key;
    }
    c.spawn_node(cfg, secrets, spec.id);
    if (gossip_key) c.distribute_gossip_key(spec.id, *gossip_key);
    if (ca) {
      const CertRole role =
          spec.role == Role::server ? CertRole::server : CertRole::client;
      c.distribute_cert(spec.id, *issue_cert(ca->key, spec.id, role, c.now()));
    }
  }

  c.bootstrap(boot);
  if (!c.run_until([](const Cluster& cl) { return cl.available(); }, kElectionBudget))
    return d;

  if (security.acls) {
    d.management_token = c.acl_bootstrap(boot);
    if (!d.management_token) return d;
    const Identity op = Identity::of(c.node(boot));
    for (const auto& spec : topology.nodes) {
      if (spec.id == boot) continue;
      std::vector<Scope> scopes{Scope::node_scope(spec.id, spec.role)};
      if (spec.role == Role::client) {
        scopes.push_back(Scope::kv_prefix("app/" + to_string(spec.id) + "/"));
        scopes.push_back(Scope::service(std::string(kClientService)));
      }
      auto minted = c.acl_mint(op, scopes);
      if (!minted.token) return d;
      c.distribute_token(spec.id, *minted.token);
    }
  }

  for (const auto& spec : topology.nodes) {
    if (spec.id == boot) continue;
    if (!c.join(spec.id, boot).accepted) return d;
  }

  const Identity op = Identity::of(c.node(boot));
  if (c.kv_put(op, std::string(kSecretKey), std::string(kSecretValue)).status !=
      OpStatus::committed)
    return d;
  ServiceRecord db{std::string(kProtectedService), boot, 5432, {}, "operator"};
  if (!seed_record(c, op, db)) return d;
  const auto clients = topology.clients();
  const NodeId web_host = clients.empty() ? boot : clients.front();
  ServiceRecord web{std::string(kClientService), web_host, 8080, {},
                    node_owner_scope(web_host)};
  if (!seed_record(c, op, web)) return d;
  if (open_registry) {
    ServiceRecord payments{std::string(kRegistryConfigService), boot, 9000,
                           {{"db_user", "payments"}, {"db_password", "pa55w0rd"}},
                           "operator"};
    if (!seed_record(c, op, payments)) return d;
  }

  d.converged = c.run_until([](const Cluster& cl) { return converged(cl); },
                            kConvergeBudget);
  return d;
}

}  // namespace meshsim
