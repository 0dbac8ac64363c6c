#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sdnguard/ids/ensemble.hpp"
#include "sdnguard/labels.hpp"
#include "sdnguard/ledger/crypto.hpp"
#include "sdnguard/policy.hpp"

namespace sdnguard::ledger {

// The logged content of one transaction.
struct AlertRecord {
  std::string flow_id;
  Label label = Label::Normal;
  double confidence = 0.0;
  double timestamp = 0.0;
  std::optional<policy::NetworkAction> action;
  std::optional<double> qos_score;

  bool operator==(const AlertRecord&) const = default;
};

// Reals are written with six fractional digits.
std::string format_real(double v);

// Fields in order flow_id, label, confidence, timestamp, action, qos_score;
// each as a 4-byte big-endian length followed by UTF-8 text. Absent optional
// fields are zero-length. Throws SerializationFailure on non-finite reals,
// an empty flow id, or a field longer than 64 KiB.
Bytes canonical_payload(const AlertRecord& r);

// Inverse of canonical_payload; reals come back rounded to six digits.
// std::nullopt on any malformation.
std::optional<AlertRecord> decode_payload(std::span<const std::uint8_t> payload);

// Appends a 4-byte big-endian length and the bytes of `text`.
void append_field(Bytes& out, std::string_view text);

struct AlertTransaction {
  Bytes payload;
  std::string timestamp_text;  // seal time, format_real
  Digest digest{};
  Signature signature{};
  std::string submitter;

  bool operator==(const AlertTransaction&) const = default;
};

// SHA-256 over payload followed by the length-prefixed timestamp text.
Digest transaction_digest(std::span<const std::uint8_t> payload, std::string_view timestamp_text);

AlertTransaction seal_transaction(const ids::Alert& alert,
                                  std::optional<policy::NetworkAction> action,
                                  std::optional<double> qos_score, const SigningIdentity& id,
                                  double now);

}  // namespace sdnguard::ledger
