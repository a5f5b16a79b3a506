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

// The four toggleable defense layers and the pure decision functions each
// node applies: join gates, force-leave authorization, voter admission.

#include <concepts>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/crypto.hpp"
#include "meshsim/message.hpp"
#include "meshsim/simnet.hpp"
#include "meshsim/statestore.hpp"

namespace meshsim {

struct SecurityConfig {
  bool label_secret = false;
  bool gossip_encryption = false;
  bool acls = false;
  bool tls = false;

  static SecurityConfig none() { return {}; }
  static SecurityConfig label_only() { return {true, false, false, false}; }
  static SecurityConfig gossip_only() { return {false, true, false, false}; }
  static SecurityConfig acls_only() { return {false, false, true, false}; }
  static SecurityConfig tls_only() { return {false, false, false, true}; }
  static SecurityConfig all() { return {true, true, true, true}; }

  friend bool operator==(const SecurityConfig&, const SecurityConfig&) = default;
};

/// Column order of the goal matrix.
enum class DefenseColumn : std::uint8_t { label, gossip, acls, tls, all };

inline constexpr DefenseColumn kAllColumns[] = {
    DefenseColumn::label, DefenseColumn::gossip, DefenseColumn::acls,
    DefenseColumn::tls, DefenseColumn::all};

SecurityConfig config_for(DefenseColumn column);
std::string_view to_string(DefenseColumn column);
DefenseColumn parse_column(std::string_view text);

/// What a receiving node checks incoming traffic against: its own secrets.
struct GateContext {
  std::string dc_label;
  std::optional<GossipKey> gossip_key;
  std::string trusted_ca;
  bool verify_server_hostname = true;
  Tick now = 0;
};

enum class JoinRejection : std::uint8_t { label, key, cert, timeout, not_member };

std::string_view to_string(JoinRejection reason);

struct JoinDecision {
  bool accepted = false;
  std::optional<JoinRejection> reason;
};

/// G1 label, G2 gossip key, G3 certificate, evaluated in that order.
JoinDecision evaluate_join_gates(const SecurityConfig& cfg,
                                 const GateContext& ctx, const Envelope& env,
                                 const JoinRequest& req);

/// A joining server votes only if ACLs are off or it presents a token scoped
/// to its own node as a server (or a management token).
bool admit_as_voter(const SecurityConfig& cfg, const StateMachine& acl_replica,
                    const JoinRequest& req, Tick now);

/// Envelope-layer acceptance: gossip key on the gossip channel, certificate
/// on the rpc channel. Failing this is the cheap discard path.
bool envelope_authentic(const SecurityConfig& cfg, const GateContext& ctx,
                        const Envelope& env);

enum class ForceLeaveRejection : std::uint8_t { acl, cert_authority, unknown_target };

std::string_view to_string(ForceLeaveRejection reason);

struct ForceLeaveDecision {
  bool allowed = false;
  std::optional<ForceLeaveRejection> reason;
};

/// A1: with ACLs, a management token is required. A2: with TLS, the request
/// must carry the certificate of the leader the recipient currently follows.
/// A3: otherwise allowed.
ForceLeaveDecision authorize_force_leave(const SecurityConfig& cfg,
                                         const GateContext& ctx,
                                         const StateMachine& acl_replica,
                                         const Envelope& env,
                                         const ForceLeave& req,
                                         std::optional<NodeId> recipient_leader);

// Capability introspection for the defaults report.

template <class T>
concept Expirable = requires(const T& t, Tick now) {
  { t.expired_at(now) } -> std::same_as<bool>;
};

template <class T>
concept Redistributable = requires(T& t) { t.redistribute(); };

template <class T>
std::string default_lifetime_label() {
  if constexpr (requires { T{}.lifetime; }) {
    const Tick lifetime = T{}.lifetime;
    if (lifetime == kInfiniteLifetime) return "inf";
    if (lifetime == kOneYearTicks) return "1 year";
    return std::to_string(lifetime) + " ticks";
  } else {
    return "inf";
  }
}

struct MechanismInfo {
  std::string name;
  bool available = false;
  bool enabled_by_default = false;
  std::string default_lifetime;
  bool revocation = false;
  bool redistribution = false;

  friend bool operator==(const MechanismInfo&, const MechanismInfo&) = default;
};

/// Rows in the fixed order: cluster message encryption, service message
/// encryption, cluster access control, service access control.
std::vector<MechanismInfo> mechanism_registry();

}  // namespace meshsim
