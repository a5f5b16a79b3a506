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

#include "meshsim/goals.hpp"

namespace meshsim {

std::string GoalReport::letters() const {
  std::string s;
  if (disruption) s += 'D';
  if (manipulation) s += 'M';
  if (takeover) s += 'T';
  return s.empty() ? "-" : s;
}

void GoalTracker::observe(const TickObservation& obs, TraceLog& trace) {
  if (!armed_at_ || obs.tick <= *armed_at_) return;

  if (obs.available) {
    unavailable_run_ = 0;
  } else {
    if (unavailable_run_ == 0) {
      if (!disruption_streak_start_) disruption_streak_start_ = obs.tick;
    }
    ++unavailable_run_;
  }
  const bool mass_left =
      obs.benign_total > 0 && obs.benign_left * 2 >= obs.benign_total;
  if (!report_.disruption &&
      (unavailable_run_ >= disruption_window_ || mass_left)) {
    report_.disruption = true;
    disruption_tick_ = obs.tick;
    std::string why = mass_left && unavailable_run_ < disruption_window_
                          ? std::to_string(obs.benign_left) + "/" +
                                std::to_string(obs.benign_total) + " benign left"
                          : "unavailable for " + std::to_string(unavailable_run_) +
                                " ticks";
    report_.disruption_evidence.push_back(
        trace.emit(obs.tick, std::nullopt, "goal_disruption", why));
  }

  const bool majority = obs.adversary_leader && obs.benign_servers > 0 &&
                        obs.adversary_recognizers * 2 > obs.benign_servers;
  takeover_run_ = majority ? takeover_run_ + 1 : 0;
  if (!report_.takeover && takeover_run_ >= takeover_window_) {
    report_.takeover = true;
    takeover_tick_ = obs.tick;
    report_.takeover_evidence.push_back(trace.emit(
        obs.tick, obs.adversary_leader, "goal_takeover",
        std::to_string(obs.adversary_recognizers) + "/" +
            std::to_string(obs.benign_servers) + " benign servers follow"));
  }
}

void GoalTracker::record_manipulation(Tick now, std::optional<NodeId> actor,
                                      const std::string& what, TraceLog& trace) {
  if (!armed_at_) return;
  const std::size_t idx = trace.emit(now, actor, "goal_manipulation", what);
  report_.manipulation_evidence.push_back(idx);
  report_.manipulation = true;
}

}  // namespace meshsim
