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

// Client-facing operations. Every request is forwarded to the serving leader
// and authorized against the leader's replica; reads are served from it too.

#include "meshsim/cluster.hpp"

namespace meshsim {

bool Cluster::identity_authentic(const Identity& caller) const {
  if (!has_node(caller.node)) return false;
  const Node& n = node(caller.node);
  if (!n.alive() || !n.members().is_member()) return false;
  if (!security_.tls) return true;
  auto leader = serving_leader();
  if (!leader || !caller.cert) return false;
  return verify_cert(*caller.cert, node(*leader).secrets().trusted_ca,
                     caller.node, now());
}

void Cluster::note_manipulation(const Identity& caller,
                                const std::string& owner_scope,
                                const std::string& what) {
  if (!has_node(caller.node) || node(caller.node).benign()) return;
  if (owner_scope == node_owner_scope(caller.node)) return;
  goals_.record_manipulation(now(), caller.node, what + " owner=" + owner_scope,
                             trace_);
}

SubmitTicket Cluster::submit(const Identity& caller, Mutation m, Verb verb,
                             const Resource& res) {
  SubmitTicket t;
  const std::string what = describe(m);
  auto deny = [&](OpStatus s, std::string reason) {
    t.status = s;
    t.reason = std::move(reason);
    trace_.emit(now(), caller.node, "op_" + std::string(to_string(s)),
                what + " reason=" + t.reason);
    return t;
  };
  if (!has_node(caller.node) || !node(caller.node).alive() ||
      !node(caller.node).members().is_member())
    return deny(OpStatus::denied, "not a member");
  auto leader = serving_leader();
  if (!leader) return deny(OpStatus::unavailable, "no serving leader");
  if (!identity_authentic(caller)) return deny(OpStatus::denied, "authentication");
  Node& l = node(*leader);
  if (security_.acls && !l.replica().authorize(caller.token_id, verb, res, now()))
    return deny(OpStatus::denied, "acl");
  t.status = OpStatus::committed;
  t.leader = *leader;
  t.term = l.raft().state().term;
  t.index = l.raft().append_local(std::move(m));
  trace_.emit(now(), caller.node, "op_submit",
              what + " leader=" + to_string(*leader) +
                  " index=" + std::to_string(t.index));
  return t;
}

OpResult Cluster::await_commit(const SubmitTicket& ticket, Tick max_ticks) {
  if (ticket.status != OpStatus::committed)
    return {ticket.status, 0, ticket.reason};
  auto committed = [&ticket](const Cluster& c) {
    const Node& l = c.node(ticket.leader);
    const RaftState& s = l.raft().state();
    return s.commit_index >= ticket.index && s.term_at(ticket.index) == ticket.term;
  };
  if (run_until(committed, max_ticks)) return {OpStatus::committed, ticket.index, ""};
  return {OpStatus::unavailable, ticket.index, "not committed"};
}

KvReadResult Cluster::kv_get(const Identity& caller, const std::string& key) {
  KvReadResult r;
  if (!has_node(caller.node) || !node(caller.node).alive() ||
      !node(caller.node).members().is_member()) {
    r.status = OpStatus::denied;
    r.reason = "not a member";
    return r;
  }
  auto leader = serving_leader();
  if (!leader) {
    r.reason = "no serving leader";
    return r;
  }
  if (!identity_authentic(caller)) {
    r.status = OpStatus::denied;
    r.reason = "authentication";
    return r;
  }
  const Node& l = node(*leader);
  if (security_.acls &&
      !l.replica().authorize(caller.token_id, Verb::read, Resource::kv(key), now())) {
    r.status = OpStatus::denied;
    r.reason = "acl";
    trace_.emit(now(), caller.node, "op_denied", "kv_get " + key + " reason=acl");
    return r;
  }
  r.status = OpStatus::committed;
  if (auto e = l.replica().kv(key)) {
    r.value = e->value;
    trace_.emit(now(), caller.node, "op_read", "kv_get " + key);
    note_manipulation(caller, e->owner_scope, "kv_read " + key);
  }
  return r;
}

OpResult Cluster::kv_put(const Identity& caller, const std::string& key,
                         const std::string& value) {
  const std::string owner = owner_scope_for_key(key);
  auto ticket = submit(caller, KvPut{{key, value, owner}}, Verb::write,
                       Resource::kv(key));
  OpResult r = await_commit(ticket);
  if (r.status == OpStatus::committed)
    note_manipulation(caller, owner, "kv_write " + key);
  return r;
}

OpResult Cluster::register_service(const Identity& caller, ServiceRecord rec) {
  std::string owner = node_owner_scope(caller.node);
  if (auto leader = serving_leader())
    if (auto existing = node(*leader).replica().service(rec.name))
      owner = existing->owner_scope;
  rec.owner_scope = owner;
  const std::string name = rec.name;
  auto ticket = submit(caller, ServiceRegister{std::move(rec)}, Verb::write,
                       Resource::service(name));
  OpResult r = await_commit(ticket);
  if (r.status == OpStatus::committed)
    note_manipulation(caller, owner, "register " + name);
  return r;
}

std::optional<ServiceRecord> Cluster::resolve_service(const std::string& name) const {
  auto leader = serving_leader();
  if (!leader) return std::nullopt;
  return node(*leader).replica().service(name);
}

std::optional<AclToken> Cluster::acl_bootstrap(NodeId id) {
  if (!security_.acls || acl_bootstrapped_) return std::nullopt;
  auto leader = serving_leader();
  if (!leader) return std::nullopt;
  AclToken tok;
  tok.token_id = keys_.fresh_symbol("token");
  tok.scopes = {Scope::management()};
  tok.policy = AclPolicy::from_scopes(tok.scopes);
  tok.issued_at = now();
  Node& l = node(*leader);
  SubmitTicket t{OpStatus::committed, *leader, 0, l.raft().state().term, ""};
  t.index = l.raft().append_local(AclMint{tok});
  if (await_commit(t).status != OpStatus::committed) return std::nullopt;
  acl_bootstrapped_ = true;
  trace_.emit(now(), id, "acl_bootstrap", tok.token_id);
  distribute_token(id, tok);
  return tok;
}

MintResult Cluster::acl_mint(const Identity& caller, std::vector<Scope> scopes,
                             Tick lifetime) {
  if (!security_.acls) return {OpStatus::denied, std::nullopt};
  AclToken tok;
  tok.token_id = keys_.fresh_symbol("token");
  tok.scopes = std::move(scopes);
  tok.policy = AclPolicy::from_scopes(tok.scopes);
  tok.issued_at = now();
  tok.lifetime = lifetime;
  auto ticket = submit(caller, AclMint{tok}, Verb::admin, Resource::acl());
  OpResult r = await_commit(ticket);
  if (r.status != OpStatus::committed) return {r.status, std::nullopt};
  return {OpStatus::committed, tok};
}

void Cluster::distribute_token(NodeId id, const AclToken& token) {
  node(id).secrets().acl_token = token;
  ++manual_steps_;
  trace_.emit(now(), id, "distribute", "acl token");
}

void Cluster::distribute_cert(NodeId id, const Certificate& cert) {
  node(id).secrets().cert = cert;
  ++manual_steps_;
  trace_.emit(now(), id, "distribute",
              "certificate role=" + std::string(to_string(cert.role)));
}

void Cluster::distribute_gossip_key(NodeId id, const GossipKey& key) {
  node(id).secrets().gossip_key = key;
  ++manual_steps_;
  trace_.emit(now(), id, "distribute", "gossip key");
}

OpResult Cluster::registry_write(ServiceRecord rec, std::optional<NodeId> actor) {
  if (!open_registry_) return {OpStatus::unavailable, 0, "registry closed"};
  auto leader = serving_leader();
  if (!leader) return {OpStatus::unavailable, 0, "no serving leader"};
  Node& l = node(*leader);
  std::string owner = actor ? node_owner_scope(*actor) : "external";
  if (auto existing = l.replica().service(rec.name)) owner = existing->owner_scope;
  rec.owner_scope = owner;
  const std::string name = rec.name;
  SubmitTicket t{OpStatus::committed, *leader, 0, l.raft().state().term, ""};
  t.index = l.raft().append_local(ServiceRegister{std::move(rec)});
  trace_.emit(now(), actor, "registry_write", name);
  OpResult r = await_commit(t);
  const bool hostile = !actor || !has_node(*actor) || !node(*actor).benign();
  const bool foreign = !actor || owner != node_owner_scope(*actor);
  if (r.status == OpStatus::committed && hostile && foreign)
    goals_.record_manipulation(now(), actor, "registry_write " + name + " owner=" + owner,
                               trace_);
  return r;
}

std::optional<ServiceRecord> Cluster::registry_read(const std::string& name,
                                                    std::optional<NodeId> actor) {
  if (!open_registry_) return std::nullopt;
  auto rec = resolve_service(name);
  if (!rec) return std::nullopt;
  trace_.emit(now(), actor, "registry_read", name);
  const bool hostile = !actor || !has_node(*actor) || !node(*actor).benign();
  const bool foreign = !actor || rec->owner_scope != node_owner_scope(*actor);
  if (hostile && foreign && !rec->config.empty())
    goals_.record_manipulation(now(), actor,
                               "registry_read " + name + " owner=" + rec->owner_scope,
                               trace_);
  return rec;
}

}  // namespace meshsim
