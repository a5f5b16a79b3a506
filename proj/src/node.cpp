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

#include "meshsim/node.hpp"

namespace meshsim {

std::string_view to_string(NodeState state) {
  switch (state) {
    case NodeState::alive: return "alive";
    case NodeState::crashed: return "crashed";
    case NodeState::left: return "left";
  }
  return "?";
}

Node::Node(NodeId id, NodeConfig config, SecretStore secrets,
           MembershipTiming membership_timing, RaftTiming raft_timing,
           ProcessingBudget budget, std::uint64_t seed)
    : id_(id),
      config_(std::move(config)),
      secrets_(std::move(secrets)),
      members_(id, config_.role, membership_timing),
      budget_(budget),
      rng_(seed) {
  if (config_.role == Role::server)
    raft_.emplace(id, raft_timing, seed ^ 0x9e3779b97f4a7c15ULL);
}

}  // namespace meshsim
