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

// meshsim command line. Exit codes: 0 ran and matched (or nothing to match),
// 1 mismatch, 2 invalid input.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "meshsim/harness.hpp"

namespace fs = std::filesystem;
using namespace meshsim;

namespace {

constexpr int kMatched = 0;
constexpr int kMismatch = 1;
constexpr int kInvalid = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  bool trace = false;
  std::string constants;
};

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ScenarioError("cannot write " + path.string());
  f << body;
}

SimConstants constants_of(const Common& o) {
  return o.constants.empty() ? SimConstants{} : load_constants(o.constants);
}

int cmd_run(const Common& o, const std::string& path) {
  ScenarioSpec spec = load_scenario(path);
  if (!o.constants.empty()) spec.constants = load_constants(o.constants);
  ScenarioResult r = run_scenario(spec, o.seed);
  const std::uint64_t seed = o.seed.value_or(spec.seed);

  if (o.trace) std::cout << r.trace;
  for (const auto& s : r.steps)
    std::cout << "step " << to_string(s.kind) << ' ' << (s.success ? "ok" : "failed")
              << (s.detail.empty() ? "" : " (" + s.detail + ")") << '\n';
  std::cout << "goals " << r.report.letters();
  if (spec.expect) std::cout << " expected " << spec.expect->letters();
  if (r.timed_out) std::cout << " (exceeded max_ticks)";
  std::cout << '\n';

  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "trace.log", r.trace);
    nlohmann::json j{{"seed", seed},
                     {"goals", r.report.letters()},
                     {"timed_out", r.timed_out},
                     {"evidence",
                      {{"D", r.report.disruption_evidence},
                       {"M", r.report.manipulation_evidence},
                       {"T", r.report.takeover_evidence}}}};
    if (spec.expect) {
      j["expected"] = spec.expect->letters();
      j["matched"] = *r.matched;
    }
    write_file(fs::path(o.out) / "result.json", j.dump(2) + "\n");
  }
  if (r.matched) return *r.matched ? kMatched : kMismatch;
  return r.timed_out ? kMismatch : kMatched;
}

int cmd_matrix(const Common& o, const std::string& expected_path) {
  const SimConstants k = constants_of(o);
  const GoalGrid expected = load_expected_matrix(
      expected_path.empty() ? default_expected_matrix_path() : fs::path(expected_path));
  MatrixReport m = run_matrix(k, o.seed.value_or(1), expected);
  std::cout << render_matrix(m);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "matrix.json", matrix_to_json(m).dump(2) + "\n");
  }
  return m.matches() ? kMatched : kMismatch;
}

int cmd_defaults(const Common& o) {
  DefaultsReport d = defaults_report();
  std::cout << render_defaults(d);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "defaults.json", defaults_to_json(d).dump(2) + "\n");
  }
  return kMatched;
}

int cmd_calibrate(const Common& o, int max_attackers) {
  CalibrationCurve c = calibrate(constants_of(o), o.seed.value_or(1), max_attackers);
  std::cout << render_calibration(c);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points)
      pts.push_back({{"attackers", p.attackers},
                     {"disruption", p.disruption},
                     {"first_unavailable", p.first_unavailable
                                               ? nlohmann::json(*p.first_unavailable)
                                               : nlohmann::json(nullptr)}});
    nlohmann::json j{{"points", pts},
                     {"threshold", c.threshold ? nlohmann::json(*c.threshold)
                                               : nlohmann::json(nullptr)},
                     {"monotone", c.monotone}};
    write_file(fs::path(o.out) / "calibration.json", j.dump(2) + "\n");
  }
  return c.threshold && c.monotone ? kMatched : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meshsim: service mesh security simulator"};
  app.require_subcommand(1);
  Common o;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--out", o.out, "Directory for machine-readable results");
    sub->add_option("--constants", o.constants, "JSON file overlaying simulation constants")
        ->check(CLI::ExistingFile);
  };

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_flag("--trace", o.trace, "Print the event trace");
  add_common(run);

  std::string expected_path;
  auto* matrix = app.add_subcommand("matrix", "Run all 20 level/defense cells");
  matrix->add_option("--expected", expected_path, "Expected goal grid")
      ->check(CLI::ExistingFile);
  add_common(matrix);

  auto* defaults = app.add_subcommand("defaults", "Print the mechanism defaults report");
  add_common(defaults);

  int max_attackers = 40;
  auto* cal = app.add_subcommand("calibrate", "Sweep flood size against the ACL defense");
  cal->add_option("--max", max_attackers, "Largest attacker count")
      ->check(CLI::Range(1, 400));
  add_common(cal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInvalid;
  }
  for (auto* sub : app.get_subcommands())
    if (sub->count("--seed") > 0) o.seed = seed;

  try {
    if (*run) return cmd_run(o, scenario_path);
    if (*matrix) return cmd_matrix(o, expected_path);
    if (*defaults) return cmd_defaults(o);
    return cmd_calibrate(o, max_attackers);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}
