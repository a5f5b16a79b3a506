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

#include "meshsim/message.hpp"

namespace meshsim {

std::string_view to_string(MemberStatus status) {
  switch (status) {
    case MemberStatus::alive: return "alive";
    case MemberStatus::suspect: return "suspect";
    case MemberStatus::failed: return "failed";
    case MemberStatus::left: return "left";
  }
  return "?";
}

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

}  // namespace

std::string_view message_kind(const Message& m) {
  return std::visit(
      overloaded{
          [](const Opaque&) { return std::string_view("opaque"); },
          [](const JoinRequest&) { return std::string_view("join_request"); },
          [](const JoinReply&) { return std::string_view("join_reply"); },
          [](const Heartbeat&) { return std::string_view("heartbeat"); },
          [](const ForceLeave&) { return std::string_view("force_leave"); },
          [](const VoteRequest&) { return std::string_view("vote_request"); },
          [](const VoteReply&) { return std::string_view("vote_reply"); },
          [](const AppendEntries&) { return std::string_view("append_entries"); },
          [](const AppendReply&) { return std::string_view("append_reply"); },
      },
      m);
}

bool is_consensus(const Message& m) {
  return std::holds_alternative<VoteRequest>(m) ||
         std::holds_alternative<VoteReply>(m) ||
         std::holds_alternative<AppendEntries>(m) ||
         std::holds_alternative<AppendReply>(m);
}

std::optional<std::string> visible_dc_label(const Message& m) {
  if (const auto* j = std::get_if<JoinRequest>(&m)) return j->dc_label;
  if (const auto* h = std::get_if<Heartbeat>(&m)) return h->dc_label;
  return std::nullopt;
}

}  // namespace meshsim
