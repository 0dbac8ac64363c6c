#include "sdnguard/ledger/transaction.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "sdnguard/error.hpp"

namespace sdnguard::ledger {

namespace {

constexpr std::size_t kMaxField = 64 * 1024;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::optional<std::string> field() {
    if (in_.size() - pos_ < 4) return std::nullopt;
    const std::uint32_t n = std::uint32_t{in_[pos_]} << 24 | std::uint32_t{in_[pos_ + 1]} << 16 |
                            std::uint32_t{in_[pos_ + 2]} << 8 | std::uint32_t{in_[pos_ + 3]};
    pos_ += 4;
    if (n > kMaxField || in_.size() - pos_ < n) return std::nullopt;
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const noexcept { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::optional<double> parse_real(const std::string& s) {
  // Exactly what format_real produces: optional '-', digits, '.', six digits.
  std::size_t i = s.size() > 0 && s[0] == '-' ? 1 : 0;
  const std::size_t dot = s.find('.');
  if (dot == std::string::npos || dot == i || s.size() - dot != 7) return std::nullopt;
  for (std::size_t k = i; k < s.size(); ++k) {
    if (k != dot && (s[k] < '0' || s[k] > '9')) return std::nullopt;
  }
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string format_real(double v) {
  if (!std::isfinite(v)) throw Error(Errc::SerializationFailure, "non-finite real");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void append_field(Bytes& out, std::string_view text) {
  if (text.size() > kMaxField) throw Error(Errc::SerializationFailure, "field exceeds 64 KiB");
  const auto n = static_cast<std::uint32_t>(text.size());
  out.push_back(static_cast<std::uint8_t>(n >> 24));
  out.push_back(static_cast<std::uint8_t>(n >> 16));
  out.push_back(static_cast<std::uint8_t>(n >> 8));
  out.push_back(static_cast<std::uint8_t>(n));
  out.insert(out.end(), text.begin(), text.end());
}

Bytes canonical_payload(const AlertRecord& r) {
  if (r.flow_id.empty()) throw Error(Errc::SerializationFailure, "empty flow id");
  Bytes out;
  append_field(out, r.flow_id);
  append_field(out, label_name(r.label));
  append_field(out, format_real(r.confidence));
  append_field(out, format_real(r.timestamp));
  append_field(out, r.action ? policy::action_name(*r.action) : std::string_view{});
  append_field(out, r.qos_score ? format_real(*r.qos_score) : std::string{});
  return out;
}

std::optional<AlertRecord> decode_payload(std::span<const std::uint8_t> payload) {
  Reader rd(payload);
  auto flow = rd.field();
  auto label = rd.field();
  auto conf = rd.field();
  auto ts = rd.field();
  auto action = rd.field();
  auto qos = rd.field();
  if (!qos || !rd.done() || flow->empty()) return std::nullopt;

  AlertRecord r;
  r.flow_id = *flow;
  auto l = parse_label(*label);
  if (!l || label_name(*l) != *label) return std::nullopt;
  r.label = *l;
  auto c = parse_real(*conf);
  auto t = parse_real(*ts);
  if (!c || !t) return std::nullopt;
  r.confidence = *c;
  r.timestamp = *t;
  if (!action->empty()) {
    auto a = policy::parse_action(*action);
    if (!a || policy::action_name(*a) != *action) return std::nullopt;
    r.action = a;
  }
  if (!qos->empty()) {
    auto q = parse_real(*qos);
    if (!q) return std::nullopt;
    r.qos_score = q;
  }
  return r;
}

Digest transaction_digest(std::span<const std::uint8_t> payload, std::string_view timestamp_text) {
  Bytes buf(payload.begin(), payload.end());
  append_field(buf, timestamp_text);
  return sha256(buf);
}

AlertTransaction seal_transaction(const ids::Alert& alert,
                                  std::optional<policy::NetworkAction> action,
                                  std::optional<double> qos_score, const SigningIdentity& id,
                                  double now) {
  AlertTransaction t;
  t.payload = canonical_payload(
      {alert.flow_id, alert.label, alert.confidence, alert.timestamp, action, qos_score});
  t.timestamp_text = format_real(now);
  t.digest = transaction_digest(t.payload, t.timestamp_text);
  t.signature = id.sign(t.digest);
  t.submitter = id.id();
  return t;
}

}  // namespace sdnguard::ledger
