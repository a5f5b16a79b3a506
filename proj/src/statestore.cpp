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

#include "meshsim/statestore.hpp"

#include <algorithm>

namespace meshsim {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

// write implies read; admin implies everything.
bool verb_covers(Verb granted, Verb wanted) {
  return static_cast<int>(granted) >= static_cast<int>(wanted);
}

// Specificity of a rule that matches, or -1. Higher wins.
int match_strength(const AclRule& rule, Verb verb, const Resource& res) {
  const Scope& s = rule.scope;
  switch (s.kind) {
    case Scope::Kind::management:
      return verb_covers(rule.verb, verb) ? 0 : -1;
    case Scope::Kind::node:
      if (res.kind == Resource::Kind::node && res.node == s.node &&
          verb != Verb::admin)
        return 1;
      // Node identities may discover services.
      if (res.kind == Resource::Kind::service && verb == Verb::read) return 1;
      return -1;
    case Scope::Kind::service:
      if (res.kind == Resource::Kind::service && res.name == s.name &&
          verb_covers(rule.verb, verb) && verb != Verb::admin)
        return 2 + static_cast<int>(s.name.size());
      return -1;
    case Scope::Kind::kv_prefix:
      if (res.kind == Resource::Kind::kv && res.name.starts_with(s.name) &&
          verb_covers(rule.verb, verb) && verb != Verb::admin)
        return 2 + static_cast<int>(s.name.size());
      return -1;
  }
  return -1;
}

}  // namespace

std::string to_string(const Scope& scope) {
  switch (scope.kind) {
    case Scope::Kind::management: return "management";
    case Scope::Kind::node:
      return "node(" + to_string(scope.node) + "," +
             std::string(to_string(scope.node_role)) + ")";
    case Scope::Kind::service: return "service(" + scope.name + ")";
    case Scope::Kind::kv_prefix: return "kv_prefix(" + scope.name + ")";
  }
  return "?";
}

std::string_view to_string(Verb verb) {
  switch (verb) {
    case Verb::read: return "read";
    case Verb::write: return "write";
    case Verb::admin: return "admin";
  }
  return "?";
}

AclPolicy AclPolicy::from_scopes(const std::vector<Scope>& scopes) {
  AclPolicy p;
  for (const auto& s : scopes) {
    Verb v = s.kind == Scope::Kind::management ? Verb::admin : Verb::write;
    p.rules.push_back({s, v, Effect::allow});
  }
  return p;
}

bool AclToken::has_management() const {
  return std::any_of(scopes.begin(), scopes.end(), [](const Scope& s) {
    return s.kind == Scope::Kind::management;
  });
}

bool policy_allows(const AclPolicy& policy, Verb verb, const Resource& res) {
  int best = -1;
  bool allowed = false;
  for (const auto& rule : policy.rules) {
    int strength = match_strength(rule, verb, res);
    if (strength < 0) continue;
    if (strength > best) {
      best = strength;
      allowed = rule.effect == Effect::allow;
    } else if (strength == best && rule.effect == Effect::deny) {
      allowed = false;
    }
  }
  return allowed;
}

std::string owner_scope_for_key(const std::string& key) {
  constexpr std::string_view kApp = "app/";
  if (key.starts_with(kApp)) {
    auto slash = key.find('/', kApp.size());
    if (slash != std::string::npos && slash > kApp.size()) {
      const std::string num = key.substr(kApp.size(), slash - kApp.size());
      if (std::all_of(num.begin(), num.end(),
                      [](char c) { return c >= '0' && c <= '9'; }))
        return "node:" + num;
    }
  }
  return "operator";
}

std::string node_owner_scope(NodeId id) { return "node:" + to_string(id); }

std::string describe(const Mutation& m) {
  return std::visit(
      overloaded{
          [](const Noop&) { return std::string("noop"); },
          [](const KvPut& p) { return "kv_put " + p.entry.key; },
          [](const KvDelete& d) { return "kv_delete " + d.key; },
          [](const ServiceRegister& r) { return "register " + r.record.name; },
          [](const ServiceDeregister& d) { return "deregister " + d.name; },
          [](const AclMint& a) { return "acl_mint " + a.token.token_id; },
      },
      m);
}

void StateMachine::apply(const Mutation& m) {
  std::visit(overloaded{
                 [](const Noop&) {},
                 [this](const KvPut& p) { kv_[p.entry.key] = p.entry; },
                 [this](const KvDelete& d) { kv_.erase(d.key); },
                 [this](const ServiceRegister& r) {
                   services_[r.record.name] = r.record;
                 },
                 [this](const ServiceDeregister& d) { services_.erase(d.name); },
                 [this](const AclMint& a) { tokens_[a.token.token_id] = a.token; },
             },
             m);
  ++applied_;
}

std::optional<KvEntry> StateMachine::kv(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return std::nullopt;
  return it->second;
}

std::optional<ServiceRecord> StateMachine::service(const std::string& name) const {
  auto it = services_.find(name);
  if (it == services_.end()) return std::nullopt;
  return it->second;
}

std::optional<AclToken> StateMachine::token(const std::string& token_id) const {
  auto it = tokens_.find(token_id);
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

bool StateMachine::authorize(const std::optional<std::string>& token_id,
                             Verb verb, const Resource& res, Tick now) const {
  if (!token_id) return false;
  auto tok = token(*token_id);
  if (!tok || tok->expired_at(now)) return false;
  return policy_allows(tok->policy, verb, res);
}

}  // namespace meshsim
