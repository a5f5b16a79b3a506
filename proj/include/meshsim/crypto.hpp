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

// Symbolic key material. Equality of symbols stands in for a successful
// decrypt or signature check; nothing here is real cryptography.

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "meshsim/types.hpp"

namespace meshsim {

/// Shared symmetric key sealing gossip traffic. One per cluster, never rotated.
struct GossipKey {
  std::string symbol;

  friend bool operator==(const GossipKey&, const GossipKey&) = default;
};

/// Private signing half of the certificate authority.
struct CaKey {
  std::string symbol;

  /// Public identifier that certificates name as their signer.
  std::string public_id() const { return "ca-pub:" + symbol; }

  friend bool operator==(const CaKey&, const CaKey&) = default;
};

enum class CertRole : std::uint8_t { server, client, ca };

std::string_view to_string(CertRole role);

/// A year at one tick per second; far beyond any simulated run.
inline constexpr Tick kOneYearTicks = 365ULL * 24 * 3600;

struct Certificate {
  NodeId subject;
  CertRole role = CertRole::client;
  std::string signer;
  Tick issued_at = 0;
  Tick lifetime = kOneYearTicks;

  bool expired_at(Tick now) const {
    return lifetime != kInfiniteLifetime && now - issued_at >= lifetime;
  }

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct CaState {
  CaKey key;
  NodeId host;
};

/// Deterministic source of fresh opaque symbols (keys, labels, token ids).
class KeyGenerator {
 public:
  explicit KeyGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string fresh_symbol(std::string_view prefix);

 private:
  std::mt19937_64 rng_;
};

GossipKey generate_gossip_key(KeyGenerator& gen);

CaState init_ca(KeyGenerator& gen, NodeId host);

/// Signing requires possession of the CA private key; without it, nothing.
std::optional<Certificate> issue_cert(const std::optional<CaKey>& ca_key,
                                      NodeId subject, CertRole role,
                                      Tick now);

/// Valid iff signed by the trusted CA, bound to `claimed_subject`, and unexpired.
bool verify_cert(const Certificate& cert, std::string_view trusted_ca,
                 NodeId claimed_subject, Tick now);

}  // namespace meshsim
