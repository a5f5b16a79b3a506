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

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace meshsim {

/// One tick is one heartbeat interval.
using Tick = std::uint64_t;

/// Label every cluster gets unless the label is treated as a secret.
inline constexpr std::string_view kDefaultDcLabel = "dc1";

inline constexpr Tick kInfiniteLifetime = std::numeric_limits<Tick>::max();

struct NodeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline std::string to_string(NodeId id) { return std::to_string(id.value); }

enum class Role : std::uint8_t { server, client };
enum class Allegiance : std::uint8_t { benign, adversary };
enum class Channel : std::uint8_t { gossip, rpc };

std::string_view to_string(Role role);
std::string_view to_string(Channel channel);
Role parse_role(std::string_view text);

/// Thrown for malformed scenarios: unknown nodes, invalid state transitions,
/// duplicate ids, bad scenario files.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model tunables. Defaults are the calibrated
/// values documented in docs/calibration.md.
struct SimConstants {
  // Per-tick processing budget and per-message costs, in abstract units.
  int budget = 1000;
  int cost_drop = 1;
  int cost_verify = 25;
  int cost_consensus = 10;

  // Sybil flood shape: messages per sybil per target server per tick.
  int flood_rate = 2;
  int flood_size = 25;
  Tick flood_ticks = 60;

  Tick election_timeout_min = 3;
  Tick election_timeout_max = 6;

  int gossip_fanout = 3;
  Tick suspect_after = 3;
  Tick fail_after = 5;

  /// Disruption fires after this many consecutive unavailable ticks.
  Tick disruption_window = 10;
  /// Takeover fires after this many consecutive ticks of adversary leadership.
  Tick takeover_window = 3;

  /// Leader counts as serving while a majority acked within this many ticks.
  Tick lease_ticks = 3;

  /// Ticks the unprivileged adversary listens on its tap.
  Tick sniff_ticks = 5;

  friend bool operator==(const SimConstants&, const SimConstants&) = default;
};

}  // namespace meshsim
