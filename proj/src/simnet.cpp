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

#include "meshsim/simnet.hpp"

#include <algorithm>
#include <tuple>

namespace meshsim {

Envelope seal(Envelope env, const GossipKey& key) {
  env.sealed = true;
  env.sealed_with = key;
  return env;
}

std::optional<Message> open(const Envelope& env,
                            const std::optional<GossipKey>& key) {
  if (!env.sealed) return env.payload;
  if (key && env.sealed_with && *key == *env.sealed_with) return env.payload;
  return std::nullopt;
}

void Network::add_node(NodeId id) {
  if (!nodes_.insert(id).second)
    throw ScenarioError("duplicate node " + to_string(id));
}

void Network::set_down(NodeId id, bool down) {
  if (!has_node(id)) throw ScenarioError("unknown node " + to_string(id));
  if (down)
    down_.insert(id);
  else
    down_.erase(id);
}

void Network::send(Envelope env) {
  if (!has_node(env.src)) throw ScenarioError("unknown sender " + to_string(env.src));
  if (!has_node(env.dst))
    throw ScenarioError("unknown recipient " + to_string(env.dst));
  env.sent_at = clock_.now();
  env.deliver_at = clock_.now() + 1;
  env.seq = next_seq_++;
  ++sent_;
  for (auto& tap : taps_) {
    auto [a, b] = tap.link;
    if ((env.src == a && env.dst == b) || (env.src == b && env.dst == a)) {
      Envelope copy = env;
      if (copy.sealed) copy.payload = Opaque{};
      tap.captured.push_back(std::move(copy));
    }
  }
  pending_.push_back(std::move(env));
}

std::vector<Delivery> Network::step() {
  clock_.advance();
  const Tick now = clock_.now();
  auto due_end = std::partition(pending_.begin(), pending_.end(),
                                [now](const Envelope& e) { return e.deliver_at <= now; });
  std::vector<Envelope> due(std::make_move_iterator(pending_.begin()),
                            std::make_move_iterator(due_end));
  pending_.erase(pending_.begin(), due_end);
  std::sort(due.begin(), due.end(), [](const Envelope& x, const Envelope& y) {
    return std::tie(x.deliver_at, x.src, x.dst, x.seq) <
           std::tie(y.deliver_at, y.src, y.dst, y.seq);
  });
  std::vector<Delivery> out;
  out.reserve(due.size());
  for (auto& env : due) {
    if (is_down(env.dst)) {
      ++dropped_;
      continue;
    }
    ++delivered_;
    NodeId dst = env.dst;
    out.push_back({dst, std::move(env)});
  }
  return out;
}

TapId Network::attach_tap(NodeId a, NodeId b) {
  if (!has_node(a) || !has_node(b)) throw ScenarioError("tap on unknown link");
  taps_.push_back({{a, b}, {}});
  return taps_.size() - 1;
}

const std::vector<Envelope>& Network::read_tap(TapId id) const {
  if (id >= taps_.size()) throw ScenarioError("unknown tap");
  return taps_[id].captured;
}

}  // namespace meshsim
