#include "sdnguard/ledger/chain_file.hpp"

#include <fstream>
#include <iterator>
#include <json.hpp>

#include "sdnguard/error.hpp"

namespace sdnguard::ledger {

namespace {

constexpr std::string_view kMagic = "SDNLEDG1";

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_lp(Bytes& out, std::span<const std::uint8_t> data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
}

void put_lp(Bytes& out, std::string_view text) {
  put_lp(out, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

template <std::size_t N>
void put_fixed(Bytes& out, const std::array<std::uint8_t, N>& a) {
  out.insert(out.end(), a.begin(), a.end());
}

// Bounds-checked cursor; every getter returns false once input runs out.
class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const noexcept { return in_.size() - pos_; }

  bool u32(std::uint32_t& v) {
    if (remaining() < 4) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | in_[pos_++];
    return true;
  }
  bool u64(std::uint64_t& v) {
    if (remaining() < 8) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | in_[pos_++];
    return true;
  }
  template <std::size_t N>
  bool fixed(std::array<std::uint8_t, N>& a) {
    if (remaining() < N) return false;
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), N, a.begin());
    pos_ += N;
    return true;
  }
  bool bytes(Bytes& b) {
    std::uint32_t n = 0;
    if (!u32(n) || remaining() < n) return false;
    b.assign(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return true;
  }
  bool text(std::string& s) {
    std::uint32_t n = 0;
    if (!u32(n) || remaining() < n) return false;
    s.assign(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return true;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool parse_block(std::span<const std::uint8_t> record, Block& b) {
  Cursor c(record);
  std::uint32_t count = 0;
  if (!c.u64(b.index) || !c.fixed(b.prev_hash) || !c.text(b.commit_ts_text) || !c.u32(count)) return false;
  // Each transaction needs at least 12 + 32 + 64 bytes.
  if (count > c.remaining() / 108) return false;
  b.txns.resize(count);
  for (auto& t : b.txns) {
    if (!c.bytes(t.payload) || !c.text(t.timestamp_text) || !c.fixed(t.digest) || !c.fixed(t.signature) ||
        !c.text(t.submitter)) {
      return false;
    }
  }
  return c.fixed(b.block_hash) && c.remaining() == 0;
}

}  // namespace

Bytes serialize_block(const Block& b) {
  Bytes body;
  put_u64(body, b.index);
  put_fixed(body, b.prev_hash);
  put_lp(body, b.commit_ts_text);
  put_u32(body, static_cast<std::uint32_t>(b.txns.size()));
  for (const auto& t : b.txns) {
    put_lp(body, t.payload);
    put_lp(body, t.timestamp_text);
    put_fixed(body, t.digest);
    put_fixed(body, t.signature);
    put_lp(body, t.submitter);
  }
  put_fixed(body, b.block_hash);
  Bytes out;
  put_lp(out, body);
  return out;
}

Bytes serialize_chain(std::span<const Block> blocks) {
  Bytes out(kMagic.begin(), kMagic.end());
  for (const auto& b : blocks) {
    Bytes rec = serialize_block(b);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

ParsedChain parse_chain(std::span<const std::uint8_t> bytes) {
  ParsedChain out;
  if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    out.fault_at = 0;
    out.fault = "bad file magic";
    return out;
  }
  Cursor c(bytes.subspan(kMagic.size()));
  while (c.remaining() > 0) {
    const std::size_t at = out.blocks.size();
    std::uint32_t len = 0;
    if (!c.u32(len) || c.remaining() < len) {
      out.fault_at = at;
      out.fault = "truncated block record";
      return out;
    }
    Block b;
    if (!parse_block(c.take(len), b)) {
      out.fault_at = at;
      out.fault = "malformed block record";
      return out;
    }
    out.blocks.push_back(std::move(b));
  }
  return out;
}

VerifyResult verify_chain_bytes(std::span<const std::uint8_t> bytes, const KeyRegistry& registry,
                                SignatureCache* cache) {
  ParsedChain parsed = parse_chain(bytes);
  if (!parsed.fault_at) return verify_chain(parsed.blocks, registry, cache);
  if (!parsed.blocks.empty()) {
    VerifyResult prefix = verify_chain(parsed.blocks, registry, cache);
    if (!prefix.ok) return prefix;
  }
  return VerifyResult{false, *parsed.fault_at, std::nullopt, parsed.fault};
}

void write_chain_file(const std::string& path, std::span<const Block> blocks) {
  Bytes data = serialize_chain(blocks);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
}

Bytes read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_key_registry(const std::string& path, const KeyRegistry& registry, std::string_view config_hash) {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& [id, key] : registry) ids.push_back({{"id", id}, {"public_key", to_hex(key)}});
  nlohmann::json doc{{"identities", ids}};
  if (!config_hash.empty()) doc["config_hash"] = config_hash;
  std::ofstream out(path, std::ios::trunc);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path);
}

KeyRegistry read_key_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  KeyRegistry reg;
  try {
    auto j = nlohmann::json::parse(in);
    for (const auto& e : j.at("identities")) {
      PublicKey key{};
      if (!from_hex(e.at("public_key").get<std::string>(), key)) {
        throw Error(Errc::InvalidInput, "bad public key hex in " + path);
      }
      reg[e.at("id").get<std::string>()] = key;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidInput, path + ": " + e.what());
  }
  return reg;
}

void export_chain_jsonl(std::ostream& out, std::span<const Block> blocks) {
  for (const auto& b : blocks) {
    nlohmann::json txns = nlohmann::json::array();
    for (const auto& t : b.txns) {
      nlohmann::json jt{{"submitter", t.submitter},
                        {"timestamp", t.timestamp_text},
                        {"digest", to_hex(t.digest)},
                        {"signature", to_hex(t.signature)}};
      if (auto r = decode_payload(t.payload)) {
        jt["flow_id"] = r->flow_id;
        jt["label"] = label_name(r->label);
        jt["confidence"] = format_real(r->confidence);
        jt["alert_ts"] = format_real(r->timestamp);
        jt["action"] = r->action ? nlohmann::json(policy::action_name(*r->action)) : nlohmann::json(nullptr);
        jt["qos_score"] = r->qos_score ? nlohmann::json(format_real(*r->qos_score)) : nlohmann::json(nullptr);
      } else {
        jt["payload_hex"] = to_hex(t.payload);
      }
      txns.push_back(std::move(jt));
    }
    nlohmann::json jb{{"index", b.index},
                      {"prev_hash", to_hex(b.prev_hash)},
                      {"commit_ts", b.commit_ts_text},
                      {"block_hash", to_hex(b.block_hash)},
                      {"txns", std::move(txns)}};
    out << jb.dump() << '\n';
  }
}

}  // namespace sdnguard::ledger
