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

// Bring-up of a benign cluster the way a careful operator would do it for
// the chosen mechanisms: label, gossip key, CA and certificates, ACL tokens.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meshsim/cluster.hpp"

namespace meshsim {

struct NodeSpec {
  NodeId id;
  Role role = Role::server;
  bool bootstrapper = false;
};

struct Topology {
  std::vector<NodeSpec> nodes;

  /// `servers` servers (the first one bootstraps) followed by `clients` clients.
  static Topology standard(int servers = 3, int clients = 1);

  std::vector<NodeId> servers() const;
  std::vector<NodeId> clients() const;
  std::optional<NodeId> bootstrapper() const;
};

/// Throws ScenarioError unless exactly one node bootstraps and ids are unique.
void validate(const Topology& topo);

/// Well-known data every deployment stores.
inline constexpr std::string_view kSecretKey = "secrets/db-password";
inline constexpr std::string_view kSecretValue = "s3cr3t-db-password";
inline constexpr std::string_view kProtectedService = "db";
inline constexpr std::string_view kClientService = "web";
inline constexpr std::string_view kRegistryConfigService = "payments";

struct Deployment {
  Cluster cluster;
  Topology topology;
  NodeId bootstrapper;
  std::optional<AclToken> management_token;
  bool converged = false;
};

/// Spawns, secures, joins, and converges the cluster, then seeds KV, the
/// service registry, and (for open registries) a config entry with
/// credentials. Returns with `converged` false if bring-up stalls.
Deployment deploy(const SecurityConfig& security, const SimConstants& constants,
                  std::uint64_t seed, const Topology& topology,
                  bool open_registry = false);

/// Every benign member sees every live benign member alive, all benign
/// servers follow one leader, and that leader serves.
bool converged(const Cluster& c);

}  // namespace meshsim
