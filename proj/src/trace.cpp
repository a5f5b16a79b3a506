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

#include "meshsim/trace.hpp"

namespace meshsim {

std::string TraceEvent::to_line() const {
  std::string line = "tick=" + std::to_string(tick) + " node=";
  line += node ? to_string(*node) : std::string("-");
  line += " kind=" + kind + " detail=" + detail;
  return line;
}

std::size_t TraceLog::emit(Tick tick, std::optional<NodeId> node,
                           std::string kind, std::string detail) {
  events_.push_back({tick, node, std::move(kind), std::move(detail)});
  return events_.size() - 1;
}

std::string TraceLog::render() const {
  std::string out;
  for (const auto& e : events_) {
    out += e.to_line();
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> TraceLog::find(std::string_view kind) const {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].kind == kind) hits.push_back(i);
  }
  return hits;
}

}  // namespace meshsim
