#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdnguard::ledger {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;

Digest sha256(std::span<const std::uint8_t> data);
inline Digest sha256(std::string_view text) {
  return sha256({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string to_hex(std::span<const std::uint8_t> bytes);
// Lowercase or uppercase hex of exactly out.size() bytes.
bool from_hex(std::string_view hex, std::span<std::uint8_t> out);

// An Ed25519 key pair bound to a submitter id.
class SigningIdentity {
 public:
  // Deterministic from a 32-byte seed.
  SigningIdentity(std::string id, const std::array<std::uint8_t, 32>& seed);
  // Seed derived from (id, seed) so simulated runs reproduce their keys.
  static SigningIdentity derive(std::string id, std::uint64_t seed);

  const std::string& id() const noexcept { return id_; }
  const PublicKey& public_key() const noexcept { return public_key_; }

  Signature sign(const Digest& digest) const;

 private:
  std::string id_;
  std::array<std::uint8_t, 64> secret_key_{};
  PublicKey public_key_{};
};

bool verify_signature(const PublicKey& key, const Digest& digest, const Signature& sig) noexcept;

}  // namespace sdnguard::ledger
