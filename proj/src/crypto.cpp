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

#include "meshsim/crypto.hpp"

#include <cstdio>

namespace meshsim {

std::string_view to_string(CertRole role) {
  switch (role) {
    case CertRole::server: return "server";
    case CertRole::client: return "client";
    case CertRole::ca: return "ca";
  }
  return "?";
}

std::string KeyGenerator::fresh_symbol(std::string_view prefix) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(rng_()));
  return std::string(prefix) + "-" + buf;
}

GossipKey generate_gossip_key(KeyGenerator& gen) {
  return GossipKey{gen.fresh_symbol("gossip")};
}

CaState init_ca(KeyGenerator& gen, NodeId host) {
  return CaState{CaKey{gen.fresh_symbol("ca")}, host};
}

std::optional<Certificate> issue_cert(const std::optional<CaKey>& ca_key,
                                      NodeId subject, CertRole role,
                                      Tick now) {
  if (!ca_key) return std::nullopt;
  return Certificate{subject, role, ca_key->public_id(), now, kOneYearTicks};
}

bool verify_cert(const Certificate& cert, std::string_view trusted_ca,
                 NodeId claimed_subject, Tick now) {
  return !trusted_ca.empty() && cert.signer == trusted_ca &&
         cert.subject == claimed_subject && !cert.expired_at(now);
}

}  // namespace meshsim
