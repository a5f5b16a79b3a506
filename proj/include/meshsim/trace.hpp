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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meshsim/types.hpp"

namespace meshsim {

struct TraceEvent {
  Tick tick = 0;
  std::optional<NodeId> node;  // nullopt for cluster-level events
  std::string kind;
  std::string detail;

  /// `tick=<n> node=<id> kind=<event> detail=<...>`; node is `-` when absent.
  std::string to_line() const;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Append-only event log. Index into events() is the evidence reference.
class TraceLog {
 public:
  std::size_t emit(Tick tick, std::optional<NodeId> node, std::string kind,
                   std::string detail);

  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  /// Newline-terminated lines, one per event.
  std::string render() const;

  std::vector<std::size_t> find(std::string_view kind) const;

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace meshsim
