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

// Replicated application state (KV, service registry, ACL tokens) and the
// access-control engine that guards it.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "meshsim/types.hpp"

namespace meshsim {

struct Scope {
  enum class Kind : std::uint8_t { management, node, service, kv_prefix };

  Kind kind = Kind::management;
  NodeId node;                      // node
  Role node_role = Role::client;    // node
  std::string name;                 // service name or kv prefix

  static Scope management() { return {}; }
  static Scope node_scope(NodeId id, Role role) {
    return {Kind::node, id, role, {}};
  }
  static Scope service(std::string name) {
    return {Kind::service, {}, Role::client, std::move(name)};
  }
  static Scope kv_prefix(std::string prefix) {
    return {Kind::kv_prefix, {}, Role::client, std::move(prefix)};
  }

  friend auto operator<=>(const Scope&, const Scope&) = default;
  friend bool operator==(const Scope&, const Scope&) = default;
};

std::string to_string(const Scope& scope);

enum class Verb : std::uint8_t { read, write, admin };
enum class Effect : std::uint8_t { allow, deny };

std::string_view to_string(Verb verb);

struct AclRule {
  Scope scope;
  Verb verb = Verb::read;
  Effect effect = Effect::allow;

  friend bool operator==(const AclRule&, const AclRule&) = default;
};

/// Rule list with an implicit default of deny.
struct AclPolicy {
  std::vector<AclRule> rules;

  static AclPolicy from_scopes(const std::vector<Scope>& scopes);

  friend bool operator==(const AclPolicy&, const AclPolicy&) = default;
};

struct AclToken {
  std::string token_id;
  std::vector<Scope> scopes;
  AclPolicy policy;
  Tick issued_at = 0;
  Tick lifetime = kInfiniteLifetime;

  bool has_management() const;
  bool expired_at(Tick now) const {
    return lifetime != kInfiniteLifetime && now - issued_at >= lifetime;
  }

  friend bool operator==(const AclToken&, const AclToken&) = default;
};

/// What an operation touches.
struct Resource {
  enum class Kind : std::uint8_t { kv, service, node, acl, operator_api };

  Kind kind = Kind::kv;
  std::string name;
  NodeId node;

  static Resource kv(std::string key) { return {Kind::kv, std::move(key), {}}; }
  static Resource service(std::string n) {
    return {Kind::service, std::move(n), {}};
  }
  static Resource node_registration(NodeId id) { return {Kind::node, {}, id}; }
  static Resource acl() { return {Kind::acl, {}, {}}; }
  static Resource operator_api() { return {Kind::operator_api, {}, {}}; }
};

/// Longest-prefix evaluation of `policy` for one (verb, resource); default deny.
bool policy_allows(const AclPolicy& policy, Verb verb, const Resource& res);

struct KvEntry {
  std::string key;
  std::string value;
  std::string owner_scope;

  friend bool operator==(const KvEntry&, const KvEntry&) = default;
};

struct ServiceRecord {
  std::string name;
  NodeId endpoint_node;
  int port = 0;
  std::map<std::string, std::string> config;
  std::string owner_scope;

  friend bool operator==(const ServiceRecord&, const ServiceRecord&) = default;
};

/// Scope that legitimately owns `key`: `app/<n>/...` belongs to node n,
/// everything else to the operator.
std::string owner_scope_for_key(const std::string& key);
std::string node_owner_scope(NodeId id);

struct KvPut {
  KvEntry entry;
  friend bool operator==(const KvPut&, const KvPut&) = default;
};
struct KvDelete {
  std::string key;
  friend bool operator==(const KvDelete&, const KvDelete&) = default;
};
struct ServiceRegister {
  ServiceRecord record;
  friend bool operator==(const ServiceRegister&, const ServiceRegister&) = default;
};
struct ServiceDeregister {
  std::string name;
  friend bool operator==(const ServiceDeregister&, const ServiceDeregister&) = default;
};
struct AclMint {
  AclToken token;
  friend bool operator==(const AclMint&, const AclMint&) = default;
};
struct Noop {
  friend bool operator==(const Noop&, const Noop&) = default;
};

using Mutation =
    std::variant<Noop, KvPut, KvDelete, ServiceRegister, ServiceDeregister, AclMint>;

std::string describe(const Mutation& m);

/// The replicated state machine. Mutated only by applying committed entries.
class StateMachine {
 public:
  void apply(const Mutation& m);

  std::optional<KvEntry> kv(const std::string& key) const;
  std::optional<ServiceRecord> service(const std::string& name) const;
  std::optional<AclToken> token(const std::string& token_id) const;

  const std::map<std::string, KvEntry>& kv_entries() const { return kv_; }
  const std::map<std::string, ServiceRecord>& services() const { return services_; }
  const std::map<std::string, AclToken>& tokens() const { return tokens_; }
  std::uint64_t applied_count() const { return applied_; }

  /// ACL check against this replica's token table.
  bool authorize(const std::optional<std::string>& token_id, Verb verb,
                 const Resource& res, Tick now) const;

  friend bool operator==(const StateMachine&, const StateMachine&) = default;

 private:
  std::map<std::string, KvEntry> kv_;
  std::map<std::string, ServiceRecord> services_;
  std::map<std::string, AclToken> tokens_;
  std::uint64_t applied_ = 0;
};

}  // namespace meshsim
