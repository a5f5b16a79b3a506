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
#include <vector>

#include "meshsim/trace.hpp"
#include "meshsim/types.hpp"

namespace meshsim {

struct GoalReport {
  bool disruption = false;
  bool manipulation = false;
  bool takeover = false;
  /// Trace indices of the events that satisfied each predicate.
  std::vector<std::size_t> disruption_evidence;
  std::vector<std::size_t> manipulation_evidence;
  std::vector<std::size_t> takeover_evidence;

  /// Achieved goals as letters in D, M, T order, or "-" when none.
  std::string letters() const;

  friend bool operator==(const GoalReport& a, const GoalReport& b) {
    return a.disruption == b.disruption && a.manipulation == b.manipulation &&
           a.takeover == b.takeover;
  }
};

/// What the cluster looks like at the end of one tick.
struct TickObservation {
  Tick tick = 0;
  bool available = false;
  int benign_total = 0;
  int benign_left = 0;
  /// Benign servers still in the cluster (evicted ones no longer count).
  int benign_servers = 0;
  /// Benign live servers following an adversary-controlled leader.
  int adversary_recognizers = 0;
  std::optional<NodeId> adversary_leader;
};

/// Live evaluation of the three goal predicates:
///   D: unavailable for `disruption_window` consecutive ticks, or at least
///      half of the benign members marked left;
///   M: an adversary identity read or wrote data outside its own scope;
///   T: a majority of benign servers followed an adversary leader for
///      `takeover_window` consecutive ticks.
/// Nothing counts before `arm()` is called.
class GoalTracker {
 public:
  GoalTracker() = default;
  GoalTracker(Tick disruption_window, Tick takeover_window)
      : disruption_window_(disruption_window),
        takeover_window_(takeover_window) {}

  void arm(Tick now) { armed_at_ = now; }
  bool armed() const { return armed_at_.has_value(); }
  std::optional<Tick> armed_at() const { return armed_at_; }

  void observe(const TickObservation& obs, TraceLog& trace);
  void record_manipulation(Tick now, std::optional<NodeId> actor,
                           const std::string& what, TraceLog& trace);

  const GoalReport& report() const { return report_; }

  std::optional<Tick> first_unavailable_streak_start() const {
    return disruption_streak_start_;
  }
  std::optional<Tick> disruption_tick() const { return disruption_tick_; }
  std::optional<Tick> takeover_tick() const { return takeover_tick_; }

 private:
  Tick disruption_window_ = 10;
  Tick takeover_window_ = 3;
  std::optional<Tick> armed_at_;
  Tick unavailable_run_ = 0;
  Tick takeover_run_ = 0;
  std::optional<Tick> disruption_streak_start_;
  std::optional<Tick> disruption_tick_;
  std::optional<Tick> takeover_tick_;
  GoalReport report_;
};

}  // namespace meshsim
