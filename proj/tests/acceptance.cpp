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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "meshsim/harness.hpp"

namespace meshsim {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// 1. Goal matrix.
Verdict goal_matrix() {
  MatrixReport m =
      run_matrix(SimConstants{}, 1, load_expected_matrix(default_expected_matrix_path()));
  std::string detail = std::to_string(20 - m.mismatches.size()) + "/20 cells match";
  for (const auto& line : m.mismatches) detail += "; " + line;
  return {m.matches(), detail};
}

// 2. Flood bracket and calibration sweep.
Verdict flood_bracket() {
  const SimConstants k;
  const bool small = run_flood(SecurityConfig::acls_only(), k, 1, 3).disruption;
  const bool large = run_flood(SecurityConfig::acls_only(), k, 1, 25).disruption;
  CalibrationCurve c = calibrate(k, 1, 40);
  const bool in_range = c.threshold && *c.threshold >= 10 && *c.threshold <= 25;
  std::ostringstream d;
  d << "k=3 " << (small ? "disrupts" : "holds") << ", k=25 "
    << (large ? "disrupts" : "holds") << ", threshold "
    << (c.threshold ? std::to_string(*c.threshold) : std::string("none"))
    << (c.monotone ? ", monotone" : ", not monotone");
  return {!small && large && in_range && c.monotone, d.str()};
}

// 3. Default-configuration attack chain.
Verdict default_chain() {
  PlaybookResult r =
      run_playbook(AdversaryLevel::unprivileged, SecurityConfig::none(), SimConstants{}, 42);
  auto ok = [&r](StepKind kind) {
    return std::any_of(r.steps.begin(), r.steps.end(),
                       [kind](const StepOutcome& s) { return s.kind == kind && s.success; });
  };
  int evictions = 0;
  for (const auto& s : r.steps) evictions += s.kind == StepKind::force_leave && s.success;
  const bool chain = ok(StepKind::kv_read) && ok(StepKind::kv_write) &&
                     ok(StepKind::bootstrap_conflict) && evictions >= 4;
  std::ostringstream d;
  d << "goals " << r.report.letters() << " in " << r.attack_ticks << " ticks, "
    << evictions << " evictions";
  return {r.report.letters() == "DMT" && chain && r.attack_ticks <= 200, d.str()};
}

// 4. Defaults report.
Verdict defaults() {
  const std::vector<MechanismInfo> want = {
      {"cluster message encryption", true, false, "inf", false, false},
      {"service message encryption", true, false, "1 year", true, false},
      {"cluster access control", true, false, "inf", true, false},
      {"service access control", true, false, "inf", true, false},
  };
  const auto got = defaults_report().mechanisms;
  return {got == want, std::to_string(got.size()) + " rows"};
}

// 5. Election safety and availability under one server crash.
Verdict raft_safety() {
  constexpr int kRuns = 100;
  constexpr Tick kObserve = 60;
  const Tick bound = 2 * SimConstants{}.election_timeout_max;
  int safe = 0;
  int bounded = 0;
  Tick worst = 0;
  for (std::uint64_t seed = 1; seed <= kRuns; ++seed) {
    Deployment d = deploy(SecurityConfig::none(), SimConstants{}, seed, Topology::standard());
    if (!d.converged) continue;
    Cluster& c = d.cluster;
    const NodeId victim{static_cast<std::uint32_t>(1 + seed % 3)};
    const Tick crash_at = c.now();
    c.crash(victim);
    c.run(kObserve);
    Tick run = 0;
    Tick longest = 0;
    for (const auto& o : c.timeline()) {
      if (o.tick <= crash_at) continue;
      run = o.available ? 0 : run + 1;
      longest = std::max(longest, run);
    }
    worst = std::max(worst, longest);
    safe += c.election_safety().holds();
    bounded += longest <= bound && c.available();
  }
  std::ostringstream d;
  d << safe << "/" << kRuns << " safe, " << bounded << "/" << kRuns
    << " recovered within " << bound << " ticks (worst gap " << worst << ")";
  return {safe == kRuns && bounded == kRuns, d.str()};
}

// 6. Determinism of traces and of the matrix across seeds.
Verdict determinism() {
  bool traces = true;
  for (auto column : kAllColumns) {
    for (auto level : kAllLevels) {
      PlaybookResult a = run_playbook(level, config_for(column), SimConstants{}, 7);
      PlaybookResult b = run_playbook(level, config_for(column), SimConstants{}, 7);
      traces = traces && !a.trace.empty() && a.trace == b.trace;
    }
  }
  const GoalGrid reference = run_matrix(SimConstants{}, 1, std::nullopt).observed();
  int invariant = 0;
  constexpr int kSeeds = 10;
  for (std::uint64_t seed = 2; seed < 2 + kSeeds; ++seed)
    invariant += run_matrix(SimConstants{}, seed, std::nullopt).observed() == reference;
  std::ostringstream d;
  d << "traces " << (traces ? "identical" : "differ") << ", matrix invariant on "
    << invariant << "/" << kSeeds << " extra seeds";
  return {traces && invariant == kSeeds, d.str()};
}

// 7. Gate soundness over every flag combination and attacker credential set.
enum class CertKind { none, client, server };
enum class TokenKind { none, node, management };

struct GateCase {
  SecurityConfig cfg;
  bool label = false;
  bool key = false;
  CertKind cert = CertKind::none;
  TokenKind token = TokenKind::none;

  std::string describe() const {
    std::ostringstream s;
    s << "flags=" << cfg.label_secret << cfg.gossip_encryption << cfg.acls << cfg.tls
      << " label=" << label << " key=" << key << " cert=" << static_cast<int>(cert)
      << " token=" << static_cast<int>(token);
    return s.str();
  }
};

// Returns a violation description, or empty when the case is sound.
std::string check_gate_case(const GateCase& g, std::uint64_t seed) {
  const Topology topo = Topology::standard(3, 1);
  Deployment d = deploy(g.cfg, SimConstants{}, seed, topo);
  if (!d.converged) return "deployment did not converge";
  Cluster& c = d.cluster;
  const NodeId boot = d.bootstrapper;
  const Node& b = c.node(boot);
  const NodeId attacker = c.next_free_id();

  SecretStore s;
  s.dc_label = g.label ? b.config().dc_label : std::string("dc-guess");
  if (g.key) s.gossip_key = b.secrets().gossip_key;
  s.trusted_ca = b.secrets().trusted_ca;
  if (g.cert != CertKind::none && b.secrets().ca_key)
    s.cert = issue_cert(b.secrets().ca_key, attacker,
                        g.cert == CertKind::server ? CertRole::server : CertRole::client,
                        c.now());
  if (g.token != TokenKind::none && g.cfg.acls) {
    const Scope scope = g.token == TokenKind::management
                            ? Scope::management()
                            : Scope::node_scope(attacker, Role::server);
    auto minted = c.acl_mint(Identity::of(b), {scope});
    if (!minted.token) return "could not mint test token";
    s.acl_token = minted.token;
  }
  NodeConfig cfg;
  cfg.role = Role::server;
  cfg.dc_label = s.dc_label;
  cfg.allegiance = Allegiance::adversary;
  c.spawn_node(cfg, s, attacker);

  // The label is always compared; keeping it secret only stops sniffing.
  const bool label_ok = g.label;
  const bool key_ok = g.key || !g.cfg.gossip_encryption;
  const bool cert_ok = !g.cfg.tls || g.cert == CertKind::server;
  const bool may_join = label_ok && key_ok && cert_ok;

  const bool joined = c.join(attacker, boot).accepted;
  if (joined && !may_join) return "join landed through a closed gate";
  if (!joined && may_join) return "legitimate credentials refused";
  if (!joined) return {};

  const bool voter_ok = !g.cfg.acls || g.token != TokenKind::none;
  const bool voter = c.node(boot).members().is_voter(attacker);
  if (voter && !voter_ok) return "voter admitted without a server token";

  // Operations from the new member must respect default deny.
  const Identity me = Identity::of(c.node(attacker));
  const bool tls_ok = !g.cfg.tls || g.cert != CertKind::none;
  const bool mgmt = !g.cfg.acls || g.token == TokenKind::management;
  const bool put = c.kv_put(me, "secrets/probe", "x").status == OpStatus::committed;
  if (put && !(tls_ok && mgmt)) return "kv write committed without authority";
  const bool mint = c.acl_mint(me, {Scope::management()}).status == OpStatus::committed;
  if (mint && !(g.cfg.acls && tls_ok && mgmt)) return "token mint committed without authority";

  const NodeId target{3};
  const bool evicted = c.force_leave(attacker, target, s.acl_token
                                                          ? std::optional(s.acl_token->token_id)
                                                          : std::nullopt)
                           .removed;
  // Under TLS only the recipients' leader may evict; the attacker never leads here.
  if (evicted && (!mgmt || g.cfg.tls)) return "force-leave accepted without authority";
  return {};
}

Verdict gate_soundness() {
  int cases = 0;
  std::vector<std::string> violations;
  for (int flags = 0; flags < 16; ++flags) {
    SecurityConfig cfg{(flags & 1) != 0, (flags & 2) != 0, (flags & 4) != 0, (flags & 8) != 0};
    for (int label = 0; label < 2; ++label)
      for (int key = 0; key < 2; ++key)
        for (auto cert : {CertKind::none, CertKind::client, CertKind::server})
          for (auto token : {TokenKind::none, TokenKind::node, TokenKind::management}) {
            GateCase g{cfg, label != 0, key != 0, cert, token};
            ++cases;
            std::string v = check_gate_case(g, 1 + static_cast<std::uint64_t>(cases));
            if (!v.empty()) violations.push_back(g.describe() + ": " + v);
          }
  }
  std::string detail = std::to_string(cases) + " cases, " +
                       std::to_string(violations.size()) + " violations";
  for (std::size_t i = 0; i < std::min<std::size_t>(violations.size(), 5); ++i)
    detail += "; " + violations[i];
  return {violations.empty(), detail};
}

}  // namespace
}  // namespace meshsim

int main() {
  using namespace meshsim;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"goal matrix", goal_matrix},
      {"flood threshold bracket", flood_bracket},
      {"default-configuration chain", default_chain},
      {"defaults report", defaults},
      {"election safety under crash", raft_safety},
      {"determinism", determinism},
      {"gate soundness", gate_soundness},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", ++n, name, v.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
