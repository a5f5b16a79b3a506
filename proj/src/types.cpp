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

#include "meshsim/types.hpp"

#include <string>

namespace meshsim {

std::string_view to_string(Role role) {
  return role == Role::server ? "server" : "client";
}

std::string_view to_string(Channel channel) {
  return channel == Channel::gossip ? "gossip" : "rpc";
}

Role parse_role(std::string_view text) {
  if (text == "server") return Role::server;
  if (text == "client") return Role::client;
  throw ScenarioError("unknown role '" + std::string(text) + "'");
}

}  // namespace meshsim
