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

#include <gtest/gtest.h>

#include "meshsim/adversary.hpp"
#include "meshsim/deployment.hpp"

namespace meshsim::testing {

// Baseline: servers 1..3 (1 bootstraps), client 4.
inline constexpr NodeId kBoot{1};
inline constexpr NodeId kServer2{2};
inline constexpr NodeId kServer3{3};
inline constexpr NodeId kClient{4};

inline Deployment baseline(const SecurityConfig& cfg, std::uint64_t seed = 1,
                           bool open_registry = false) {
  Deployment d = deploy(cfg, SimConstants{}, seed, Topology::standard(), open_registry);
  EXPECT_TRUE(d.converged) << "deployment did not converge";
  return d;
}

inline NodeId leader_of(const Cluster& c) {
  auto l = c.serving_leader();
  EXPECT_TRUE(l.has_value());
  return l.value_or(NodeId{});
}

// Spawns an adversary node outside the cluster with the given secrets.
inline NodeId spawn_adversary(Cluster& c, Role role, SecretStore secrets,
                              std::string label = std::string(kDefaultDcLabel)) {
  NodeConfig cfg;
  cfg.role = role;
  cfg.dc_label = std::move(label);
  cfg.allegiance = Allegiance::adversary;
  return c.spawn_node(cfg, std::move(secrets));
}

}  // namespace meshsim::testing
