#include "sdnguard/ledger/ledger.hpp"

#include <algorithm>

#include "sdnguard/error.hpp"

namespace sdnguard::ledger {

Digest compute_block_hash(const Block& b) {
  Bytes buf;
  buf.reserve(8 + 32 + 4 + b.commit_ts_text.size() + 32 * b.txns.size());
  for (int shift = 56; shift >= 0; shift -= 8) buf.push_back(static_cast<std::uint8_t>(b.index >> shift));
  buf.insert(buf.end(), b.prev_hash.begin(), b.prev_hash.end());
  append_field(buf, b.commit_ts_text);
  for (const auto& t : b.txns) buf.insert(buf.end(), t.digest.begin(), t.digest.end());
  return sha256(buf);
}

const Block& genesis_block() {
  static const Block g = [] {
    Block b;
    b.commit_ts_text = format_real(0.0);
    b.block_hash = compute_block_hash(b);
    return b;
  }();
  return g;
}

void validate(const LedgerConfig& cfg) {
  const auto& e = cfg.endorsement;
  if (e.peers < 1 || e.required < 1 || e.required > e.peers) {
    throw Error(Errc::InvalidConfig, "endorsement needs 1 <= M <= N_p");
  }
  if (cfg.block_size < 1) throw Error(Errc::InvalidConfig, "block_size must be >= 1");
  if (!(cfg.block_timeout >= 0.0)) throw Error(Errc::InvalidConfig, "block_timeout must be >= 0");
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) throw Error(Errc::InvalidConfig, "theta must lie in [0,1]");
}

std::string endorsement_check(const AlertTransaction& txn, const KeyRegistry& registry) {
  if (!decode_payload(txn.payload)) return "malformed payload";
  if (transaction_digest(txn.payload, txn.timestamp_text) != txn.digest) return "bad digest";
  auto it = registry.find(txn.submitter);
  if (it == registry.end()) return "unknown submitter";
  if (!verify_signature(it->second, txn.digest, txn.signature)) return "bad signature";
  return {};
}

Ledger::Ledger(LedgerConfig cfg) : cfg_(cfg) {
  validate(cfg_);
  chain_.push_back(genesis_block());
}

Ledger::Ledger(LedgerConfig cfg, KeyRegistry registry, std::vector<Block> blocks)
    : cfg_(cfg), registry_(std::move(registry)), chain_(std::move(blocks)) {
  validate(cfg_);
  if (chain_.empty() || chain_.front() != genesis_block()) {
    throw Error(Errc::InvalidInput, "ledger must start with the genesis block");
  }
  for (const auto& b : chain_) {
    index_block_locked(b);
    next_seq_ += b.txns.size();
  }
}

void Ledger::register_identity(const std::string& id, const PublicKey& key) {
  std::lock_guard lock(mu_);
  registry_[id] = key;
}

KeyRegistry Ledger::registry() const {
  std::lock_guard lock(mu_);
  return registry_;
}

SubmitOutcome Ledger::submit(AlertTransaction txn, double confidence, double now) {
  if (confidence < cfg_.theta) return BelowThreshold{};
  KeyRegistry registry = this->registry();
  Rejected rejected;
  int endorsements = 0;
  for (int peer = 0; peer < cfg_.endorsement.peers; ++peer) {
    std::string why = endorsement_check(txn, registry);
    if (why.empty()) {
      ++endorsements;
    } else {
      rejected.reasons.push_back("peer-" + std::to_string(peer + 1) + ": " + why);
    }
  }
  if (endorsements < cfg_.endorsement.required) return rejected;

  std::lock_guard lock(mu_);
  Accepted ok{next_seq_++, txn.digest};
  pending_.push_back({std::move(txn), now});
  return ok;
}

Block Ledger::cut_locked(std::size_t count, double now) {
  Block b;
  b.index = chain_.size();
  b.prev_hash = chain_.back().block_hash;
  b.commit_ts_text = format_real(now);
  b.txns.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    b.txns.push_back(std::move(pending_.front().txn));
    pending_.pop_front();
  }
  b.block_hash = compute_block_hash(b);
  chain_.push_back(b);
  index_block_locked(chain_.back());
  return b;
}

void Ledger::index_block_locked(const Block& b) {
  for (const auto& t : b.txns) {
    auto r = decode_payload(t.payload);
    if (!r) continue;
    by_flow_[r->flow_id].push_back({r->label, r->confidence, r->timestamp, r->action, r->qos_score, b.index});
  }
}

std::optional<Block> Ledger::commit_block(double now) {
  std::lock_guard lock(mu_);
  if (pending_.empty()) return std::nullopt;
  if (pending_.size() >= cfg_.block_size) return cut_locked(cfg_.block_size, now);
  if (now - pending_.front().submitted >= cfg_.block_timeout) return cut_locked(pending_.size(), now);
  return std::nullopt;
}

std::vector<Block> Ledger::flush(double now) {
  std::lock_guard lock(mu_);
  std::vector<Block> out;
  while (!pending_.empty()) out.push_back(cut_locked(std::min(pending_.size(), cfg_.block_size), now));
  return out;
}

std::vector<Block> Ledger::blocks() const {
  std::lock_guard lock(mu_);
  return chain_;
}

std::size_t Ledger::block_count() const {
  std::lock_guard lock(mu_);
  return chain_.size();
}

std::size_t Ledger::pending_size() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

std::optional<double> Ledger::oldest_pending() const {
  std::lock_guard lock(mu_);
  if (pending_.empty()) return std::nullopt;
  return pending_.front().submitted;
}

std::vector<QueryRecord> Ledger::query(std::string_view flow_id) const {
  std::lock_guard lock(mu_);
  auto it = by_flow_.find(std::string(flow_id));
  return it == by_flow_.end() ? std::vector<QueryRecord>{} : it->second;
}

bool SignatureCache::verify(const PublicKey& key, const Digest& digest, const Signature& sig) {
  std::string k;
  k.reserve(key.size() + digest.size() + sig.size());
  k.append(reinterpret_cast<const char*>(key.data()), key.size());
  k.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  k.append(reinterpret_cast<const char*>(sig.data()), sig.size());
  if (seen_.contains(k)) return true;
  if (!verify_signature(key, digest, sig)) return false;
  seen_.insert(std::move(k));
  return true;
}

std::string VerifyResult::describe() const {
  if (ok) return "Ok";
  std::string s = "TamperedAt(block " + std::to_string(block);
  if (txn) s += ", txn " + std::to_string(*txn);
  s += ")";
  if (!reason.empty()) s += ": " + reason;
  return s;
}

VerifyResult verify_chain(std::span<const Block> blocks, const KeyRegistry& registry,
                          SignatureCache* cache) {
  auto fail = [](std::uint64_t block, std::optional<std::size_t> txn, std::string why) {
    return VerifyResult{false, block, txn, std::move(why)};
  };
  if (blocks.empty()) return fail(0, std::nullopt, "empty ledger");
  if (blocks[0] != genesis_block()) return fail(0, std::nullopt, "genesis mismatch");

  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (b.index != i) return fail(i, std::nullopt, "index out of sequence");
    for (std::size_t t = 0; t < b.txns.size(); ++t) {
      const AlertTransaction& txn = b.txns[t];
      if (!decode_payload(txn.payload)) return fail(i, t, "malformed payload");
      if (transaction_digest(txn.payload, txn.timestamp_text) != txn.digest) return fail(i, t, "bad digest");
      auto key = registry.find(txn.submitter);
      if (key == registry.end()) return fail(i, t, "unknown submitter");
      const bool sig_ok = cache ? cache->verify(key->second, txn.digest, txn.signature)
                                : verify_signature(key->second, txn.digest, txn.signature);
      if (!sig_ok) return fail(i, t, "bad signature");
    }
    if (compute_block_hash(b) != b.block_hash) return fail(i, std::nullopt, "block hash mismatch");
    if (b.prev_hash != blocks[i - 1].block_hash) return fail(i, std::nullopt, "prev_hash does not link");
  }
  return {};
}

}  // namespace sdnguard::ledger
