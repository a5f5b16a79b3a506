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

// Scenario files, the goal matrix, the defaults report, and the flood
// calibration sweep.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "meshsim/adversary.hpp"
#include "meshsim/deployment.hpp"
#include "meshsim/security.hpp"

namespace meshsim {

inline constexpr std::string_view kScenarioSchema = "meshsim.scenario/1";
inline constexpr std::string_view kMatrixSchema = "meshsim.matrix/1";

struct GoalExpectation {
  bool disruption = false;
  bool manipulation = false;
  bool takeover = false;

  static GoalExpectation parse(std::string_view letters);
  std::string letters() const;
  bool matches(const GoalReport& r) const {
    return r.disruption == disruption && r.manipulation == manipulation &&
           r.takeover == takeover;
  }

  friend bool operator==(const GoalExpectation&, const GoalExpectation&) = default;
};

struct ScenarioSpec {
  std::string schema{kScenarioSchema};
  std::uint64_t seed = 0;
  Tick max_ticks = 400;
  Topology topology;
  SecurityConfig security;
  bool open_registry = false;
  AdversaryLevel level = AdversaryLevel::unprivileged;
  std::optional<std::vector<AttackStep>> steps;
  SimConstants constants;
  std::optional<GoalExpectation> expect;
};

/// Parse or validation failure; `line` is 1-based when known.
class ScenarioParseError : public ScenarioError {
 public:
  ScenarioParseError(const std::string& what, std::optional<std::size_t> line);
  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Overlays the fields present in `j` onto `base`.
SimConstants constants_from_json(const nlohmann::json& j, SimConstants base = {});
nlohmann::json constants_to_json(const SimConstants& k);
SimConstants load_constants(const std::filesystem::path& path);

struct ScenarioResult {
  GoalReport report;
  std::string trace;
  bool timed_out = false;
  std::optional<bool> matched;
  std::vector<StepOutcome> steps;
};

ScenarioResult run_scenario(const ScenarioSpec& spec,
                            std::optional<std::uint64_t> seed_override = std::nullopt);

/// Rows: unprivileged, client, server, leader. Columns: label, gossip, ACLs, TLS, all.
using GoalGrid = std::array<std::array<GoalExpectation, 5>, 4>;

struct MatrixReport {
  std::array<std::array<GoalReport, 5>, 4> cells;
  std::optional<GoalGrid> expected;
  std::vector<std::string> mismatches;

  GoalGrid observed() const;
  bool matches() const { return expected.has_value() && mismatches.empty(); }
};

GoalGrid parse_goal_grid(const nlohmann::json& j);
GoalGrid load_expected_matrix(const std::filesystem::path& path);
/// Path of the shipped expectation file (configured at build time).
std::filesystem::path default_expected_matrix_path();

MatrixReport run_matrix(const SimConstants& constants, std::uint64_t seed,
                        std::optional<GoalGrid> expected, bool parallel = true);

std::string render_matrix(const MatrixReport& report);
nlohmann::json matrix_to_json(const MatrixReport& report);

struct DefaultsReport {
  std::vector<MechanismInfo> mechanisms;
};

DefaultsReport defaults_report();
std::string render_defaults(const DefaultsReport& report);
nlohmann::json defaults_to_json(const DefaultsReport& report);

struct CalibrationPoint {
  int attackers = 0;
  bool disruption = false;
  std::optional<Tick> first_unavailable;
};

struct CalibrationCurve {
  std::vector<CalibrationPoint> points;
  /// Smallest attacker count that disrupts, if any.
  std::optional<int> threshold;
  /// Disruption never switches back off as the attacker count grows.
  bool monotone = true;
};

/// ACLs-only flood sweep over attacker counts [1, max_attackers].
CalibrationCurve calibrate(const SimConstants& constants, std::uint64_t seed,
                           int max_attackers = 40);
std::string render_calibration(const CalibrationCurve& curve);

}  // namespace meshsim
