#include "sdnguard/ledger/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "sdnguard/error.hpp"

namespace sdnguard::ledger {

namespace {

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw Error(Errc::SerializationFailure, "libsodium failed to initialize");
}

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

bool from_hex(std::string_view hex, std::span<std::uint8_t> out) {
  if (hex.size() != out.size() * 2) return false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return true;
}

SigningIdentity::SigningIdentity(std::string id, const std::array<std::uint8_t, 32>& seed)
    : id_(std::move(id)) {
  ensure_sodium();
  crypto_sign_seed_keypair(public_key_.data(), secret_key_.data(), seed.data());
}

SigningIdentity SigningIdentity::derive(std::string id, std::uint64_t seed) {
  std::string material = "sdnguard-identity:" + id + ":" + std::to_string(seed);
  return SigningIdentity(std::move(id), sha256(material));
}

Signature SigningIdentity::sign(const Digest& digest) const {
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, digest.data(), digest.size(), secret_key_.data());
  return sig;
}

bool verify_signature(const PublicKey& key, const Digest& digest, const Signature& sig) noexcept {
  if (sodium_init() < 0) return false;
  return crypto_sign_verify_detached(sig.data(), digest.data(), digest.size(), key.data()) == 0;
}

}  // namespace sdnguard::ledger
