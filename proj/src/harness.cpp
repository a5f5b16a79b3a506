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

#include "meshsim/harness.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#ifndef MESHSIM_DATA_DIR
#define MESHSIM_DATA_DIR "data"
#endif

namespace meshsim {

using nlohmann::json;

namespace {

constexpr const char* kRowNames[] = {"unprivileged", "client", "server", "leader"};

std::size_t line_at(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first occurrence of `"key"`, if any.
std::optional<std::size_t> line_of_key(std::string_view text, std::string_view key) {
  const std::string needle = "\"" + std::string(key) + "\"";
  auto pos = text.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  return line_at(text, pos);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioParseError("cannot open " + path.string(), std::nullopt);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(e.what(), line_at(text, e.byte > 0 ? e.byte - 1 : 0));
  }
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view where, std::string_view text) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ScenarioParseError("unknown field '" + k + "' in " + std::string(where),
                               line_of_key(text, k));
  }
}

template <class T>
T get_as(const json& obj, std::string_view key, std::string_view text) {
  try {
    return obj.at(std::string(key)).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioParseError("field '" + std::string(key) + "': " + e.what(),
                             line_of_key(text, key));
  }
}

AttackStep parse_step(const json& j, std::string_view text) {
  if (!j.is_object()) throw ScenarioParseError("attack step must be an object", std::nullopt);
  check_keys(j, {"kind", "role", "count", "rate", "target", "key", "value", "record"},
             "attack step", text);
  AttackStep s;
  try {
    s.kind = parse_step_kind(get_as<std::string>(j, "kind", text));
    if (j.contains("role")) s.role = parse_role(get_as<std::string>(j, "role", text));
  } catch (const ScenarioParseError&) {
    throw;
  } catch (const ScenarioError& e) {
    throw ScenarioParseError(e.what(), line_of_key(text, "kind"));
  }
  if (j.contains("count")) s.count = get_as<int>(j, "count", text);
  if (j.contains("rate")) s.rate = get_as<int>(j, "rate", text);
  if (j.contains("target")) s.target = NodeId{get_as<std::uint32_t>(j, "target", text)};
  if (j.contains("key")) s.key = get_as<std::string>(j, "key", text);
  if (j.contains("value")) s.value = get_as<std::string>(j, "value", text);
  if (j.contains("record")) {
    const json& r = j.at("record");
    ServiceRecord rec;
    rec.name = get_as<std::string>(r, "name", text);
    if (r.contains("port")) rec.port = get_as<int>(r, "port", text);
    if (r.contains("config"))
      rec.config = get_as<std::map<std::string, std::string>>(r, "config", text);
    s.record = rec;
  }
  return s;
}

Topology parse_topology(const json& root, std::string_view text) {
  if (root.contains("nodes")) {
    Topology t;
    const json& nodes = root.at("nodes");
    if (!nodes.is_array())
      throw ScenarioParseError("'nodes' must be an array", line_of_key(text, "nodes"));
    for (const auto& n : nodes) {
      check_keys(n, {"id", "role", "bootstrapper"}, "node", text);
      NodeSpec spec;
      spec.id = NodeId{get_as<std::uint32_t>(n, "id", text)};
      try {
        spec.role = parse_role(get_as<std::string>(n, "role", text));
      } catch (const ScenarioParseError&) {
        throw;
      } catch (const ScenarioError& e) {
        throw ScenarioParseError(e.what(), line_of_key(text, "role"));
      }
      if (n.contains("bootstrapper")) spec.bootstrapper = get_as<bool>(n, "bootstrapper", text);
      t.nodes.push_back(spec);
    }
    return t;
  }
  if (root.contains("topology")) {
    const json& t = root.at("topology");
    check_keys(t, {"servers", "clients"}, "topology", text);
    const int servers = t.contains("servers") ? get_as<int>(t, "servers", text) : 3;
    const int clients = t.contains("clients") ? get_as<int>(t, "clients", text) : 1;
    if (servers < 1 || clients < 0)
      throw ScenarioParseError("topology needs at least one server",
                               line_of_key(text, "topology"));
    return Topology::standard(servers, clients);
  }
  return Topology::standard();
}

}  // namespace

GoalExpectation GoalExpectation::parse(std::string_view letters) {
  GoalExpectation g;
  if (letters == "-" || letters == "\u2014" || letters.empty()) return g;
  for (char ch : letters) {
    switch (ch) {
      case 'D': g.disruption = true; break;
      case 'M': g.manipulation = true; break;
      case 'T': g.takeover = true; break;
      case ' ': break;
      default:
        throw ScenarioError("bad goal letters '" + std::string(letters) + "'");
    }
  }
  return g;
}

std::string GoalExpectation::letters() const {
  std::string s;
  if (disruption) s += 'D';
  if (manipulation) s += 'M';
  if (takeover) s += 'T';
  return s.empty() ? "-" : s;
}

ScenarioParseError::ScenarioParseError(const std::string& what,
                                       std::optional<std::size_t> line)
    : ScenarioError(line ? "line " + std::to_string(*line) + ": " + what : what),
      line_(line) {}

SimConstants constants_from_json(const json& j, SimConstants k) {
  if (!j.is_object()) throw ScenarioError("constants must be an object");
  auto take_int = [&](const char* name, int& field) {
    if (j.contains(name)) field = j.at(name).get<int>();
  };
  auto take_tick = [&](const char* name, Tick& field) {
    if (j.contains(name)) field = j.at(name).get<Tick>();
  };
  static const std::set<std::string> known = {
      "budget", "cost_drop", "cost_verify", "cost_consensus", "flood_rate",
      "flood_size", "flood_ticks", "election_timeout_min", "election_timeout_max",
      "gossip_fanout", "suspect_after", "fail_after", "disruption_window",
      "takeover_window", "lease_ticks", "sniff_ticks"};
  for (const auto& [key, v] : j.items())
    if (!known.contains(key)) throw ScenarioError("unknown constant '" + key + "'");
  try {
    take_int("budget", k.budget);
    take_int("cost_drop", k.cost_drop);
    take_int("cost_verify", k.cost_verify);
    take_int("cost_consensus", k.cost_consensus);
    take_int("flood_rate", k.flood_rate);
    take_int("flood_size", k.flood_size);
    take_tick("flood_ticks", k.flood_ticks);
    take_tick("election_timeout_min", k.election_timeout_min);
    take_tick("election_timeout_max", k.election_timeout_max);
    take_int("gossip_fanout", k.gossip_fanout);
    take_tick("suspect_after", k.suspect_after);
    take_tick("fail_after", k.fail_after);
    take_tick("disruption_window", k.disruption_window);
    take_tick("takeover_window", k.takeover_window);
    take_tick("lease_ticks", k.lease_ticks);
    take_tick("sniff_ticks", k.sniff_ticks);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("bad constant: ") + e.what());
  }
  if (k.election_timeout_min == 0 || k.election_timeout_min > k.election_timeout_max)
    throw ScenarioError("election timeouts must satisfy 0 < min <= max");
  if (k.budget <= 0) throw ScenarioError("budget must be positive");
  return k;
}

json constants_to_json(const SimConstants& k) {
  return json{{"budget", k.budget},
              {"cost_drop", k.cost_drop},
              {"cost_verify", k.cost_verify},
              {"cost_consensus", k.cost_consensus},
              {"flood_rate", k.flood_rate},
              {"flood_size", k.flood_size},
              {"flood_ticks", k.flood_ticks},
              {"election_timeout_min", k.election_timeout_min},
              {"election_timeout_max", k.election_timeout_max},
              {"gossip_fanout", k.gossip_fanout},
              {"suspect_after", k.suspect_after},
              {"fail_after", k.fail_after},
              {"disruption_window", k.disruption_window},
              {"takeover_window", k.takeover_window},
              {"lease_ticks", k.lease_ticks},
              {"sniff_ticks", k.sniff_ticks}};
}

SimConstants load_constants(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j = parse_json(text);
  try {
    return constants_from_json(j);
  } catch (const ScenarioParseError&) {
    throw;
  } catch (const ScenarioError& e) {
    throw ScenarioParseError(e.what(), std::nullopt);
  }
}

ScenarioSpec parse_scenario(std::string_view text) {
  const json root = parse_json(text);
  if (!root.is_object()) throw ScenarioParseError("scenario must be an object", 1);
  check_keys(root,
             {"schema", "seed", "max_ticks", "nodes", "topology", "security",
              "open_registry", "adversary", "constants", "expect", "description"},
             "scenario", text);

  ScenarioSpec spec;
  if (!root.contains("schema"))
    throw ScenarioParseError("missing 'schema'", std::nullopt);
  spec.schema = get_as<std::string>(root, "schema", text);
  if (spec.schema != kScenarioSchema)
    throw ScenarioParseError("unsupported schema '" + spec.schema + "'",
                             line_of_key(text, "schema"));
  if (!root.contains("seed"))
    throw ScenarioParseError("missing 'seed' (runs must be reproducible)", std::nullopt);
  spec.seed = get_as<std::uint64_t>(root, "seed", text);
  if (root.contains("max_ticks")) spec.max_ticks = get_as<Tick>(root, "max_ticks", text);

  spec.topology = parse_topology(root, text);
  try {
    validate(spec.topology);
  } catch (const ScenarioError& e) {
    throw ScenarioParseError(e.what(), line_of_key(text, "nodes"));
  }

  if (root.contains("security")) {
    const json& s = root.at("security");
    check_keys(s, {"label_secret", "gossip_encryption", "acls", "tls"}, "security", text);
    if (s.contains("label_secret")) spec.security.label_secret = get_as<bool>(s, "label_secret", text);
    if (s.contains("gossip_encryption"))
      spec.security.gossip_encryption = get_as<bool>(s, "gossip_encryption", text);
    if (s.contains("acls")) spec.security.acls = get_as<bool>(s, "acls", text);
    if (s.contains("tls")) spec.security.tls = get_as<bool>(s, "tls", text);
  }
  if (root.contains("open_registry"))
    spec.open_registry = get_as<bool>(root, "open_registry", text);

  if (root.contains("adversary")) {
    const json& a = root.at("adversary");
    check_keys(a, {"level", "steps"}, "adversary", text);
    try {
      if (a.contains("level")) spec.level = parse_level(get_as<std::string>(a, "level", text));
    } catch (const ScenarioParseError&) {
      throw;
    } catch (const ScenarioError& e) {
      throw ScenarioParseError(e.what(), line_of_key(text, "level"));
    }
    if (a.contains("steps")) {
      std::vector<AttackStep> steps;
      for (const auto& st : a.at("steps")) steps.push_back(parse_step(st, text));
      spec.steps = std::move(steps);
    }
  }
  if (spec.level == AdversaryLevel::client_compromise && spec.topology.clients().empty())
    throw ScenarioParseError("client compromise needs a client node", line_of_key(text, "level"));

  if (root.contains("constants")) {
    try {
      spec.constants = constants_from_json(root.at("constants"));
    } catch (const ScenarioError& e) {
      throw ScenarioParseError(e.what(), line_of_key(text, "constants"));
    }
  }
  if (root.contains("expect")) {
    try {
      spec.expect = GoalExpectation::parse(get_as<std::string>(root, "expect", text));
    } catch (const ScenarioParseError&) {
      throw;
    } catch (const ScenarioError& e) {
      throw ScenarioParseError(e.what(), line_of_key(text, "expect"));
    }
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path));
}

ScenarioResult run_scenario(const ScenarioSpec& spec,
                            std::optional<std::uint64_t> seed_override) {
  const std::uint64_t seed = seed_override.value_or(spec.seed);
  PlaybookResult pr =
      spec.steps ? run_steps(spec.level, spec.security, spec.constants, seed,
                             spec.topology, spec.open_registry, *spec.steps)
                 : run_playbook(spec.level, spec.security, spec.constants, seed,
                                spec.topology, spec.open_registry);
  ScenarioResult r;
  r.report = pr.report;
  r.trace = std::move(pr.trace);
  r.steps = std::move(pr.steps);
  r.timed_out = !pr.deployed || pr.final_tick > spec.max_ticks;
  if (spec.expect) r.matched = !r.timed_out && spec.expect->matches(r.report);
  return r;
}

GoalGrid MatrixReport::observed() const {
  GoalGrid g;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 5; ++c)
      g[r][c] = {cells[r][c].disruption, cells[r][c].manipulation, cells[r][c].takeover};
  return g;
}

GoalGrid parse_goal_grid(const json& j) {
  if (!j.is_object() || j.value("schema", "") != kMatrixSchema)
    throw ScenarioError("expected matrix file with schema " + std::string(kMatrixSchema));
  const auto rows = j.at("rows").get<std::vector<std::string>>();
  const auto cols = j.at("columns").get<std::vector<std::string>>();
  if (rows.size() != 4 || cols.size() != 5)
    throw ScenarioError("matrix must be 4 rows by 5 columns");
  for (std::size_t r = 0; r < 4; ++r)
    if (parse_level(rows[r]) != kAllLevels[r])
      throw ScenarioError("row " + std::to_string(r) + " out of order: " + rows[r]);
  for (std::size_t c = 0; c < 5; ++c)
    if (parse_column(cols[c]) != kAllColumns[c])
      throw ScenarioError("column " + std::to_string(c) + " out of order: " + cols[c]);
  const auto cells = j.at("cells").get<std::vector<std::vector<std::string>>>();
  if (cells.size() != 4) throw ScenarioError("matrix needs 4 rows of cells");
  GoalGrid g;
  for (std::size_t r = 0; r < 4; ++r) {
    if (cells[r].size() != 5) throw ScenarioError("matrix rows need 5 cells");
    for (std::size_t c = 0; c < 5; ++c) g[r][c] = GoalExpectation::parse(cells[r][c]);
  }
  return g;
}

GoalGrid load_expected_matrix(const std::filesystem::path& path) {
  return parse_goal_grid(parse_json(read_file(path)));
}

std::filesystem::path default_expected_matrix_path() {
  return std::filesystem::path(MESHSIM_DATA_DIR) / "goal_matrix_expected.json";
}

MatrixReport run_matrix(const SimConstants& constants, std::uint64_t seed,
                        std::optional<GoalGrid> expected, bool parallel) {
  MatrixReport report;
  report.expected = expected;
  auto cell = [&constants, seed](std::size_t r, std::size_t c) {
    return run_playbook(kAllLevels[r], config_for(kAllColumns[c]), constants, seed).report;
  };
  if (parallel) {
    std::vector<std::future<GoalReport>> futures;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 5; ++c)
        futures.push_back(std::async(std::launch::async, cell, r, c));
    for (std::size_t i = 0; i < futures.size(); ++i)
      report.cells[i / 5][i % 5] = futures[i].get();
  } else {
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 5; ++c) report.cells[r][c] = cell(r, c);
  }
  if (expected) {
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 5; ++c) {
        const auto& want = (*expected)[r][c];
        if (!want.matches(report.cells[r][c]))
          report.mismatches.push_back(std::string(kRowNames[r]) + "/" +
                                      std::string(to_string(kAllColumns[c])) +
                                      ": expected " + want.letters() + ", observed " +
                                      report.cells[r][c].letters());
      }
    }
  }
  return report;
}

std::string render_matrix(const MatrixReport& report) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-14s", "");
  out << buf;
  for (auto c : kAllColumns) {
    std::snprintf(buf, sizeof buf, "%-8s", std::string(to_string(c)).c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t r = 0; r < 4; ++r) {
    std::snprintf(buf, sizeof buf, "%-14s", kRowNames[r]);
    out << buf;
    for (std::size_t c = 0; c < 5; ++c) {
      std::string cell = report.cells[r][c].letters();
      if (report.expected && !(*report.expected)[r][c].matches(report.cells[r][c]))
        cell += "!";
      std::snprintf(buf, sizeof buf, "%-8s", cell.c_str());
      out << buf;
    }
    out << '\n';
  }
  if (report.expected) {
    out << (report.mismatches.empty() ? "20/20 cells match\n"
                                      : std::to_string(20 - report.mismatches.size()) +
                                            "/20 cells match\n");
    for (const auto& m : report.mismatches) out << "  mismatch " << m << '\n';
  }
  return out.str();
}

json matrix_to_json(const MatrixReport& report) {
  json j;
  j["schema"] = kMatrixSchema;
  j["rows"] = json::array();
  for (auto l : kAllLevels) j["rows"].push_back(to_string(l));
  j["columns"] = json::array();
  for (auto c : kAllColumns) j["columns"].push_back(to_string(c));
  j["cells"] = json::array();
  j["evidence"] = json::array();
  for (std::size_t r = 0; r < 4; ++r) {
    json row = json::array();
    json ev = json::array();
    for (std::size_t c = 0; c < 5; ++c) {
      const GoalReport& g = report.cells[r][c];
      row.push_back(g.letters());
      ev.push_back(json{{"D", g.disruption_evidence},
                        {"M", g.manipulation_evidence},
                        {"T", g.takeover_evidence}});
    }
    j["cells"].push_back(row);
    j["evidence"].push_back(ev);
  }
  j["mismatches"] = report.mismatches;
  if (report.expected) j["matches"] = report.matches();
  return j;
}

DefaultsReport defaults_report() { return {mechanism_registry()}; }

std::string render_defaults(const DefaultsReport& report) {
  std::ostringstream out;
  auto yn = [](bool b) { return b ? "Yes" : "No"; };
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %-10s %-10s %-10s %-11s %s\n", "mechanism",
                "available", "default", "lifetime", "revocation", "redistribution");
  out << buf;
  for (const auto& m : report.mechanisms) {
    // The infinity sign is three bytes but one column wide.
    const bool inf = m.default_lifetime == "inf";
    std::snprintf(buf, sizeof buf, "%-28s %-10s %-10s %-*s %-11s %s\n", m.name.c_str(),
                  yn(m.available), yn(m.enabled_by_default), inf ? 12 : 10,
                  inf ? "\u221e" : m.default_lifetime.c_str(), yn(m.revocation),
                  yn(m.redistribution));
    out << buf;
  }
  return out.str();
}

json defaults_to_json(const DefaultsReport& report) {
  json rows = json::array();
  for (const auto& m : report.mechanisms)
    rows.push_back(json{{"mechanism", m.name},
                        {"available", m.available},
                        {"enabled_by_default", m.enabled_by_default},
                        {"default_lifetime", m.default_lifetime},
                        {"revocation", m.revocation},
                        {"redistribution", m.redistribution}});
  return json{{"mechanisms", rows}};
}

CalibrationCurve calibrate(const SimConstants& constants, std::uint64_t seed,
                           int max_attackers) {
  CalibrationCurve curve;
  std::vector<std::future<FloodOutcome>> futures;
  for (int k = 1; k <= max_attackers; ++k)
    futures.push_back(std::async(std::launch::async, [&constants, seed, k] {
      return run_flood(SecurityConfig::acls_only(), constants, seed, k);
    }));
  for (int k = 1; k <= max_attackers; ++k) {
    FloodOutcome o = futures[static_cast<std::size_t>(k - 1)].get();
    curve.points.push_back({k, o.disruption, o.first_unavailable});
    if (o.disruption && !curve.threshold) curve.threshold = k;
    if (!o.disruption && curve.threshold) curve.monotone = false;
  }
  return curve;
}

std::string render_calibration(const CalibrationCurve& curve) {
  std::ostringstream out;
  out << "attackers  disruption  first_unavailable\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%9d  %-10s  %s\n", p.attackers,
                  p.disruption ? "yes" : "no",
                  p.first_unavailable ? std::to_string(*p.first_unavailable).c_str() : "-");
    out << buf;
  }
  out << "threshold: "
      << (curve.threshold ? std::to_string(*curve.threshold) : std::string("none"))
      << (curve.monotone ? " (monotone)" : " (not monotone)") << '\n';
  return out.str();
}

}  // namespace meshsim
