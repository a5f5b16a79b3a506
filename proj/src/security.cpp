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

#include "meshsim/security.hpp"

#include <algorithm>

namespace meshsim {

SecurityConfig config_for(DefenseColumn column) {
  switch (column) {
    case DefenseColumn::label: return SecurityConfig::label_only();
    case DefenseColumn::gossip: return SecurityConfig::gossip_only();
    case DefenseColumn::acls: return SecurityConfig::acls_only();
    case DefenseColumn::tls: return SecurityConfig::tls_only();
    case DefenseColumn::all: return SecurityConfig::all();
  }
  return {};
}

std::string_view to_string(DefenseColumn column) {
  switch (column) {
    case DefenseColumn::label: return "label";
    case DefenseColumn::gossip: return "gossip";
    case DefenseColumn::acls: return "acls";
    case DefenseColumn::tls: return "tls";
    case DefenseColumn::all: return "all";
  }
  return "?";
}

DefenseColumn parse_column(std::string_view text) {
  for (auto c : kAllColumns)
    if (to_string(c) == text) return c;
  throw ScenarioError("unknown defense column '" + std::string(text) + "'");
}

std::string_view to_string(JoinRejection reason) {
  switch (reason) {
    case JoinRejection::label: return "label";
    case JoinRejection::key: return "key";
    case JoinRejection::cert: return "cert";
    case JoinRejection::timeout: return "timeout";
    case JoinRejection::not_member: return "not_member";
  }
  return "?";
}

std::string_view to_string(ForceLeaveRejection reason) {
  switch (reason) {
    case ForceLeaveRejection::acl: return "acl";
    case ForceLeaveRejection::cert_authority: return "cert_authority";
    case ForceLeaveRejection::unknown_target: return "unknown_target";
  }
  return "?";
}

JoinDecision evaluate_join_gates(const SecurityConfig& cfg,
                                 const GateContext& ctx, const Envelope& env,
                                 const JoinRequest& req) {
  if (req.dc_label != ctx.dc_label) return {false, JoinRejection::label};
  if (cfg.gossip_encryption && !open(env, ctx.gossip_key))
    return {false, JoinRejection::key};
  if (cfg.gossip_encryption && !env.sealed) return {false, JoinRejection::key};
  if (cfg.tls) {
    if (!req.presented_cert ||
        !verify_cert(*req.presented_cert, ctx.trusted_ca, req.requester, ctx.now))
      return {false, JoinRejection::cert};
    if (req.claimed_role == Role::server && ctx.verify_server_hostname &&
        req.presented_cert->role != CertRole::server)
      return {false, JoinRejection::cert};
  }
  return {true, std::nullopt};
}

bool admit_as_voter(const SecurityConfig& cfg, const StateMachine& acl_replica,
                    const JoinRequest& req, Tick now) {
  if (req.claimed_role != Role::server) return false;
  if (!cfg.acls) return true;
  if (!req.token_id) return false;
  auto tok = acl_replica.token(*req.token_id);
  if (!tok || tok->expired_at(now)) return false;
  if (tok->has_management()) return true;
  return std::any_of(tok->scopes.begin(), tok->scopes.end(), [&](const Scope& s) {
    return s.kind == Scope::Kind::node && s.node == req.requester &&
           s.node_role == Role::server;
  });
}

bool envelope_authentic(const SecurityConfig& cfg, const GateContext& ctx,
                        const Envelope& env) {
  if (env.channel == Channel::gossip) {
    if (cfg.gossip_encryption && (!env.sealed || !open(env, ctx.gossip_key)))
      return false;
    if (auto label = visible_dc_label(env.payload); label && *label != ctx.dc_label)
      return false;
    return true;
  }
  if (cfg.tls) {
    return env.cert && verify_cert(*env.cert, ctx.trusted_ca, env.src, ctx.now);
  }
  return true;
}

ForceLeaveDecision authorize_force_leave(const SecurityConfig& cfg,
                                         const GateContext& ctx,
                                         const StateMachine& acl_replica,
                                         const Envelope& env,
                                         const ForceLeave& req,
                                         std::optional<NodeId> recipient_leader) {
  if (cfg.acls) {
    if (!req.token_id) return {false, ForceLeaveRejection::acl};
    auto tok = acl_replica.token(*req.token_id);
    if (!tok || tok->expired_at(ctx.now) || !tok->has_management())
      return {false, ForceLeaveRejection::acl};
  }
  if (cfg.tls) {
    if (!env.cert || !recipient_leader ||
        !verify_cert(*env.cert, ctx.trusted_ca, env.src, ctx.now) ||
        env.cert->subject != *recipient_leader)
      return {false, ForceLeaveRejection::cert_authority};
  }
  return {true, std::nullopt};
}

namespace {

template <class T>
MechanismInfo describe_mechanism(std::string name) {
  // Every mechanism ships in the product and none is switched on out of the
  // box. Revocation means the credential carries an expiry the issuer can
  // enforce; redistribution means it has a built-in rotation hook.
  return MechanismInfo{std::move(name), true, false, default_lifetime_label<T>(),
                       Expirable<T>, Redistributable<T>};
}

}  // namespace

std::vector<MechanismInfo> mechanism_registry() {
  return {
      describe_mechanism<GossipKey>("cluster message encryption"),
      describe_mechanism<Certificate>("service message encryption"),
      describe_mechanism<AclToken>("cluster access control"),
      describe_mechanism<AclToken>("service access control"),
  };
}

}  // namespace meshsim
