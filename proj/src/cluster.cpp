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

// Node lifecycle, the tick loop, and per-message handling.

#include "meshsim/cluster.hpp"

#include <algorithm>

namespace meshsim {

namespace {

// Ticks a joiner waits for the seed's verdict before giving up.
constexpr Tick kJoinTimeout = 6;

std::uint64_t node_seed(std::uint64_t base, NodeId id) {
  return base ^ (0xbf58476d1ce4e5b9ULL * (id.value + 1));
}

}  // namespace

Identity Identity::of(const Node& n) {
  Identity id{n.id(), std::nullopt, n.secrets().cert};
  if (n.secrets().acl_token) id.token_id = n.secrets().acl_token->token_id;
  return id;
}

std::string_view to_string(OpStatus status) {
  switch (status) {
    case OpStatus::committed: return "committed";
    case OpStatus::denied: return "denied";
    case OpStatus::unavailable: return "unavailable";
  }
  return "?";
}

bool ElectionSafetyMonitor::holds() const {
  return std::all_of(leaders_by_term.begin(), leaders_by_term.end(),
                     [](const auto& kv) { return kv.second.size() <= 1; });
}

Cluster::Cluster(SecurityConfig security, SimConstants constants,
                 std::uint64_t seed, bool open_registry)
    : security_(security),
      constants_(constants),
      seed_(seed),
      open_registry_(open_registry),
      keys_(seed),
      goals_(constants.disruption_window, constants.takeover_window) {}

Node& Cluster::node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ScenarioError("unknown node " + to_string(id));
  return it->second;
}

const Node& Cluster::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ScenarioError("unknown node " + to_string(id));
  return it->second;
}

std::vector<NodeId> Cluster::node_ids() const {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : nodes_) ids.push_back(id);
  return ids;
}

NodeId Cluster::next_free_id() const {
  return nodes_.empty() ? NodeId{1} : NodeId{nodes_.rbegin()->first.value + 1};
}

GateContext Cluster::gate_context(const Node& n) const {
  return {n.secrets().dc_label, n.secrets().gossip_key, n.secrets().trusted_ca,
          n.config().verify_server_hostname, now()};
}

std::vector<NodeId> Cluster::voters_of(const Node& n) const {
  return n.members().voters();
}

NodeId Cluster::spawn_node(NodeConfig config, SecretStore secrets,
                           std::optional<NodeId> id) {
  const NodeId nid = id.value_or(next_free_id());
  if (has_node(nid)) throw ScenarioError("duplicate node " + to_string(nid));
  const ProcessingBudget budget = config.allegiance == Allegiance::adversary
                                      ? ProcessingBudget::unlimited()
                                      : ProcessingBudget::from(constants_);
  const RaftTiming rt{constants_.election_timeout_min,
                      constants_.election_timeout_max, constants_.lease_ticks};
  const MembershipTiming mt{constants_.gossip_fanout, constants_.suspect_after,
                            constants_.fail_after};
  const std::string role(to_string(config.role));
  const bool adversary = config.allegiance == Allegiance::adversary;
  net_.add_node(nid);
  auto [it, ok] = nodes_.emplace(
      nid, Node(nid, std::move(config), std::move(secrets), mt, rt, budget,
                node_seed(seed_, nid)));
  if (it->second.has_raft()) it->second.raft().reset_timer(now());
  trace_.emit(now(), nid, "spawn", role + (adversary ? " adversary" : ""));
  return nid;
}

SecretDump Cluster::compromise(NodeId id) {
  Node& n = node(id);
  if (!n.alive()) throw ScenarioError("compromise of non-running node " + to_string(id));
  n.config().allegiance = Allegiance::adversary;
  trace_.emit(now(), id, "compromise", "secret store dumped");
  return n.secrets();
}

void Cluster::crash(NodeId id) {
  Node& n = node(id);
  if (n.state() != NodeState::alive)
    throw ScenarioError("crash of non-running node " + to_string(id));
  n.set_state(NodeState::crashed);
  n.inbox().clear();
  net_.set_down(id, true);
  trace_.emit(now(), id, "crash", "");
}

void Cluster::restart(NodeId id) {
  Node& n = node(id);
  if (n.state() != NodeState::crashed)
    throw ScenarioError("restart of non-crashed node " + to_string(id));
  n.set_state(NodeState::alive);
  net_.set_down(id, false);
  if (n.has_raft()) {
    n.raft().step_down(now(), trace_);
    n.raft().reset_timer(now());
  }
  trace_.emit(now(), id, "restart", "");
  NodeId seed{};
  if (auto leader = serving_leader(); leader && *leader != id) {
    seed = *leader;
  } else {
    for (const auto& [nid, other] : nodes_)
      if (nid != id && other.alive() && other.benign() &&
          other.members().is_member() && other.config().role == Role::server) {
        seed = nid;
        break;
      }
  }
  if (seed.value != 0) join(id, seed);
}

void Cluster::bootstrap(NodeId id) {
  Node& n = node(id);
  n.members().bootstrap(n.config().role == Role::server, now(), trace_);
  if (n.has_raft()) n.raft().reset_timer(now());
}

JoinRequest Cluster::join_request_for(NodeId id) const {
  const Node& n = node(id);
  JoinRequest req;
  req.requester = id;
  req.claimed_role = n.config().role;
  req.dc_label = n.secrets().dc_label;
  req.presented_cert = n.secrets().cert;
  if (n.secrets().acl_token) req.token_id = n.secrets().acl_token->token_id;
  req.bootstrapper = n.config().bootstrapper;
  req.incarnation = n.members().incarnation() + 1;
  return req;
}

void Cluster::join_async(NodeId id, NodeId seed) {
  JoinRequest req = join_request_for(id);
  Node& n = node(id);
  req.incarnation = n.members().next_incarnation();
  join_decisions_.erase(id);
  trace_.emit(now(), id, "join_request", "via " + to_string(seed));
  send_one(id, {seed, Channel::gossip, req});
}

std::optional<JoinDecision> Cluster::join_decision(NodeId id) const {
  auto it = join_decisions_.find(id);
  if (it == join_decisions_.end()) return std::nullopt;
  return it->second;
}

JoinDecision Cluster::join(NodeId id, NodeId seed, JoinRequest req) {
  Node& n = node(id);
  req.incarnation = n.members().next_incarnation();
  join_decisions_.erase(id);
  trace_.emit(now(), id, "join_request", "via " + to_string(seed));
  send_one(id, {seed, Channel::gossip, req});
  // Decision lands one tick after sending; the reply one tick later.
  const bool decided = run_until(
      [id](const Cluster& c) {
        auto d = c.join_decision(id);
        if (!d) return false;
        if (!d->accepted) return true;
        const auto& m = c.node(id).members();
        auto self = m.entry(id);
        return m.is_member() && self && self->digest.incarnation == m.incarnation();
      },
      kJoinTimeout);
  if (!decided) {
    trace_.emit(now(), id, "join_timeout", "");
    return {false, JoinRejection::timeout};
  }
  return *join_decision(id);
}

JoinDecision Cluster::join(NodeId id, NodeId seed) {
  return join(id, seed, join_request_for(id));
}

ForceLeaveResult Cluster::force_leave(NodeId issuer, NodeId target,
                                      std::optional<std::string> token_id) {
  Node& n = node(issuer);
  if (!has_node(target)) return {false, ForceLeaveRejection::unknown_target};
  force_leave_verdicts_.clear();
  trace_.emit(now(), issuer, "force_leave_issue", "target=" + to_string(target));
  std::vector<NodeId> recipients = n.members().live_members();
  if (recipients.empty()) recipients = node_ids();
  for (NodeId r : recipients)
    if (r != issuer) send_one(issuer, {r, Channel::rpc, ForceLeave{issuer, target, token_id}});
  step();
  ForceLeaveResult result;
  for (const auto& v : force_leave_verdicts_) {
    if (v.allowed) {
      result.removed = true;
      result.reason.reset();
      break;
    }
    if (!result.reason) result.reason = v.reason;
  }
  if (!result.removed && !result.reason) result.reason = ForceLeaveRejection::acl;
  force_leave_verdicts_.clear();
  return result;
}

TapId Cluster::attach_tap(NodeId a, NodeId b) {
  trace_.emit(now(), std::nullopt, "tap", to_string(a) + "<->" + to_string(b));
  return net_.attach_tap(a, b);
}

const std::vector<Envelope>& Cluster::read_tap(TapId id) const {
  return net_.read_tap(id);
}

void Cluster::send_one(NodeId src, const Outgoing& msg) {
  const Node& n = node(src);
  Envelope env;
  env.src = src;
  env.dst = msg.dst;
  env.channel = msg.channel;
  env.payload = msg.payload;
  if (msg.channel == Channel::rpc) env.cert = n.secrets().cert;
  if (msg.channel == Channel::gossip && security_.gossip_encryption &&
      n.secrets().gossip_key)
    env = seal(std::move(env), *n.secrets().gossip_key);
  net_.send(std::move(env));
}

void Cluster::flush(NodeId src, Outbox& out) {
  for (const auto& m : out) send_one(src, m);
  out.clear();
}

void Cluster::step() {
  for (auto& d : net_.step()) {
    auto it = nodes_.find(d.recipient);
    if (it != nodes_.end() && it->second.alive())
      it->second.inbox().push_back(std::move(d.envelope));
  }
  for (auto& [id, n] : nodes_) {
    if (!n.alive()) continue;
    BudgetReport report = process_inbox(n);
    n.set_budget_report(report);
    if (report.timers_serviced) run_timers(n);
  }
  for (auto& [id, n] : nodes_) {
    if (!n.alive() || n.flood().rate <= 0) continue;
    const VoteRequest junk{0, id, 0, 0};
    for (NodeId t : n.flood().targets) {
      if (!has_node(t)) continue;
      for (int i = 0; i < n.flood().rate; ++i) send_one(id, {t, Channel::rpc, junk});
    }
  }
  for (auto& [id, n] : nodes_) apply_committed(n);
  observe();
}

void Cluster::run(Tick ticks) {
  for (Tick i = 0; i < ticks; ++i) step();
}

bool Cluster::run_until(const std::function<bool(const Cluster&)>& done,
                        Tick max_ticks) {
  for (Tick i = 0; i < max_ticks; ++i) {
    if (done(*this)) return true;
    step();
  }
  return done(*this);
}

int Cluster::classify_cost(const Node& n, const Envelope& env, bool& handle) const {
  const ProcessingBudget& b = n.budget();
  handle = false;
  if (std::holds_alternative<JoinReply>(env.payload)) {
    handle = static_cast<bool>(open(env, n.secrets().gossip_key));
    return b.c_drop;
  }
  if (!n.members().is_member()) return b.c_drop;
  if (std::holds_alternative<JoinRequest>(env.payload)) {
    // Still handled so the rejection is recorded; the failed unseal is cheap.
    handle = true;
    if (security_.gossip_encryption && (!env.sealed || !open(env, n.secrets().gossip_key)))
      return b.c_drop;
    return b.c_verify;
  }
  const GateContext ctx = gate_context(n);
  if (!envelope_authentic(security_, ctx, env)) return b.c_drop;
  const int unauthorized = security_.acls ? b.c_verify : b.c_drop;
  if (std::holds_alternative<ForceLeave>(env.payload)) {
    handle = true;
    return security_.acls ? b.c_verify : b.c_consensus;
  }
  if (!n.members().knows_live(env.src)) return unauthorized;
  if (is_consensus(env.payload) && !n.members().is_voter(env.src)) return unauthorized;
  handle = true;
  return b.c_consensus;
}

BudgetReport Cluster::process_inbox(Node& n) {
  BudgetReport report;
  const int capacity = n.budget().capacity;
  auto& inbox = n.inbox();
  while (!inbox.empty()) {
    bool should_handle = false;
    const int cost = classify_cost(n, inbox.front(), should_handle);
    if (cost > capacity - report.spent) {
      report.timers_serviced = false;
      break;
    }
    report.spent += cost;
    ++report.processed;
    Envelope env = std::move(inbox.front());
    inbox.pop_front();
    if (should_handle) handle(n, env);
  }
  report.remaining = capacity - report.spent;
  report.backlog = inbox.size();
  if (!report.timers_serviced)
    trace_.emit(now(), n.id(), "budget_exhausted",
                "backlog=" + std::to_string(report.backlog));
  return report;
}

void Cluster::run_timers(Node& n) {
  if (!n.members().is_member()) return;
  Outbox out;
  n.members().gossip_round(now(), n.rng(), n.secrets().dc_label, out, trace_);
  n.members().detect_failures(now(), trace_);
  if (n.has_raft()) n.raft().tick(now(), voters_of(n), out, trace_);
  flush(n.id(), out);
}

void Cluster::after_membership_change(Node& n) {
  if (!n.has_raft()) return;
  if (!n.members().is_member()) {
    n.raft().step_down(now(), trace_);
    return;
  }
  if (auto l = n.raft().leader(); l && *l != n.id() && !n.members().knows_live(*l))
    n.raft().forget_leader(*l, trace_, now());
}

void Cluster::handle(Node& n, const Envelope& env) {
  Outbox out;
  const Tick t = now();
  if (const auto* req = std::get_if<JoinRequest>(&env.payload)) {
    JoinDecision d = evaluate_join_gates(security_, gate_context(n), env, *req);
    join_decisions_[req->requester] = d;
    if (!d.accepted) {
      trace_.emit(t, n.id(), "join_reject",
                  to_string(req->requester) + " gate=" +
                      std::string(to_string(*d.reason)));
      out.push_back({req->requester, Channel::gossip,
                     JoinReply{false, std::string(to_string(*d.reason)), {}}});
    } else {
      const bool voter = admit_as_voter(security_, n.replica(), *req, t);
      n.members().admit(*req, voter, t, trace_);
      out.push_back({req->requester, Channel::gossip,
                     JoinReply{true, "", n.members().digest()}});
    }
  } else if (const auto* rep = std::get_if<JoinReply>(&env.payload)) {
    if (rep->accepted) {
      n.members().adopt(rep->view, t, trace_);
      if (n.has_raft()) n.raft().reset_timer(t);
    }
  } else if (const auto* hb = std::get_if<Heartbeat>(&env.payload)) {
    n.members().merge(hb->digest, t, trace_);
    after_membership_change(n);
  } else if (const auto* fl = std::get_if<ForceLeave>(&env.payload)) {
    std::optional<NodeId> leader;
    if (n.has_raft()) leader = n.raft().leader();
    ForceLeaveDecision d = authorize_force_leave(security_, gate_context(n),
                                                 n.replica(), env, *fl, leader);
    if (d.allowed && !n.members().entry(fl->target) && fl->target != n.id())
      d = {false, ForceLeaveRejection::unknown_target};
    if (n.benign()) force_leave_verdicts_.push_back(d);
    if (d.allowed) {
      trace_.emit(t, n.id(), "force_leave_accept", "target=" + to_string(fl->target));
      n.members().mark_left(fl->target, t, trace_);
      after_membership_change(n);
    } else {
      trace_.emit(t, n.id(), "force_leave_reject",
                  "target=" + to_string(fl->target) +
                      " reason=" + std::string(to_string(*d.reason)));
    }
  } else if (n.has_raft()) {
    const auto voters = voters_of(n);
    RaftNode& r = n.raft();
    if (const auto* vr = std::get_if<VoteRequest>(&env.payload))
      r.on_vote_request(*vr, t, voters, out, trace_);
    else if (const auto* vp = std::get_if<VoteReply>(&env.payload))
      r.on_vote_reply(*vp, t, voters, out, trace_);
    else if (const auto* ae = std::get_if<AppendEntries>(&env.payload))
      r.on_append_entries(*ae, t, out, trace_);
    else if (const auto* ar = std::get_if<AppendReply>(&env.payload))
      r.on_append_reply(*ar, t, voters, trace_);
  }
  flush(n.id(), out);
}

void Cluster::apply_committed(Node& n) {
  if (!n.has_raft()) return;
  for (const auto& e : n.raft().take_committed()) n.replica().apply(e.mutation);
}

void Cluster::observe() {
  TickObservation obs;
  obs.tick = now();
  const auto serving = serving_leader();
  obs.available = serving.has_value();

  std::map<NodeId, int> followers;
  for (const auto& [id, n] : nodes_) {
    if (n.has_raft() && n.alive() && n.raft().is_leader())
      safety_.leaders_by_term[n.raft().state().term].insert(id);
    if (!n.benign()) continue;
    ++obs.benign_total;
    if (!n.members().is_member() && n.members().incarnation() > 0) ++obs.benign_left;
    if (n.config().role != Role::server || !n.members().is_member()) continue;
    ++obs.benign_servers;
    if (!n.alive()) continue;
    if (auto l = n.raft().leader(); l && has_node(*l) && !node(*l).benign())
      ++followers[*l];
  }
  for (const auto& [leader, count] : followers) {
    if (count > obs.adversary_recognizers) {
      obs.adversary_recognizers = count;
      obs.adversary_leader = leader;
    }
  }
  if (last_available_ != obs.available) {
    trace_.emit(obs.tick, serving, "availability",
                obs.available ? "up" : "down");
    last_available_ = obs.available;
  }
  goals_.observe(obs, trace_);
  timeline_.push_back(obs);
}

std::optional<NodeId> Cluster::serving_leader() const {
  std::optional<NodeId> best;
  std::uint64_t best_term = 0;
  for (const auto& [id, n] : nodes_) {
    if (!n.alive() || !n.has_raft() || !n.members().is_member()) continue;
    const RaftNode& r = n.raft();
    if (!r.is_leader() || !r.lease_valid(now(), voters_of(n))) continue;
    if (!best || r.state().term > best_term) {
      best = id;
      best_term = r.state().term;
    }
  }
  return best;
}

}  // namespace meshsim
