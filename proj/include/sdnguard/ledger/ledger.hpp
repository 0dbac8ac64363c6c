#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "sdnguard/ledger/crypto.hpp"
#include "sdnguard/ledger/transaction.hpp"

namespace sdnguard::ledger {

struct Block {
  std::uint64_t index = 0;
  Digest prev_hash{};
  std::string commit_ts_text;
  std::vector<AlertTransaction> txns;
  Digest block_hash{};

  bool operator==(const Block&) const = default;
};

// SHA-256 over u64be(index) | prev_hash | lp(commit_ts_text) | txn digests.
Digest compute_block_hash(const Block& b);

// Index 0, zero prev hash, no transactions, commit time "0.000000".
const Block& genesis_block();

struct EndorsementPolicy {
  int peers = 2;
  int required = 2;
};

struct LedgerConfig {
  EndorsementPolicy endorsement;
  std::size_t block_size = 10;
  double block_timeout = 2.0;  // seconds of virtual time
  double theta = 0.5;
};

void validate(const LedgerConfig& cfg);

using KeyRegistry = std::map<std::string, PublicKey, std::less<>>;

struct Accepted {
  std::uint64_t seq = 0;  // position in the total submission order
  Digest digest{};
};
struct BelowThreshold {};
struct Rejected {
  std::vector<std::string> reasons;  // one entry per refusing peer, "peer-1: bad signature"
};
using SubmitOutcome = std::variant<Accepted, BelowThreshold, Rejected>;

// A committed alert as returned by query().
struct QueryRecord {
  Label label = Label::Normal;
  double confidence = 0.0;
  double timestamp = 0.0;
  std::optional<policy::NetworkAction> action;
  std::optional<double> qos_score;
  std::uint64_t block = 0;
};

// The format, digest, submitter and signature checks a peer runs before
// endorsing. Empty on success, otherwise the reason.
std::string endorsement_check(const AlertTransaction& txn, const KeyRegistry& registry);

// Simulated permissioned ledger: threshold gate, M-of-N peer endorsement, an
// ordered pending queue and a single committer. All members are safe to call
// from several threads.
class Ledger {
 public:
  explicit Ledger(LedgerConfig cfg = {});
  // Rebuilds the in-memory state from stored blocks (block 0 must be genesis).
  Ledger(LedgerConfig cfg, KeyRegistry registry, std::vector<Block> blocks);

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  void register_identity(const std::string& id, const PublicKey& key);
  KeyRegistry registry() const;
  const LedgerConfig& config() const noexcept { return cfg_; }

  // Gate: C < theta -> BelowThreshold. Otherwise every peer re-verifies the
  // transaction and it is queued iff at least `required` peers endorse.
  SubmitOutcome submit(AlertTransaction txn, double confidence, double now);

  // Cuts one block when pending >= block_size (the oldest block_size
  // transactions) or the oldest pending entry is at least block_timeout old
  // (everything pending).
  std::optional<Block> commit_block(double now);
  // Cuts blocks until nothing is pending.
  std::vector<Block> flush(double now);

  std::vector<Block> blocks() const;
  std::size_t block_count() const;
  std::size_t pending_size() const;
  // Submission time of the oldest pending transaction.
  std::optional<double> oldest_pending() const;

  // Committed alerts for flow_id in commit order; pending ones are excluded.
  std::vector<QueryRecord> query(std::string_view flow_id) const;

 private:
  struct Pending {
    AlertTransaction txn;
    double submitted = 0.0;
  };

  Block cut_locked(std::size_t count, double now);
  void index_block_locked(const Block& b);

  LedgerConfig cfg_;
  mutable std::mutex mu_;
  KeyRegistry registry_;
  std::deque<Pending> pending_;
  std::vector<Block> chain_;
  std::uint64_t next_seq_ = 0;
  std::unordered_map<std::string, std::vector<QueryRecord>> by_flow_;
};

// Remembers (key, digest, signature) triples that already verified, so a
// re-audit of mostly unchanged data skips repeated curve operations. Only
// exact matches are skipped.
class SignatureCache {
 public:
  bool verify(const PublicKey& key, const Digest& digest, const Signature& sig);
  std::size_t size() const noexcept { return seen_.size(); }

 private:
  std::unordered_set<std::string> seen_;
};

struct VerifyResult {
  bool ok = true;
  std::uint64_t block = 0;
  std::optional<std::size_t> txn;
  std::string reason;

  // "Ok" or "TamperedAt(block 7, txn 3): bad digest".
  std::string describe() const;
};

// Checks, block by block: index, each transaction (format, digest, known
// submitter, signature), the block hash, then the link to the predecessor.
// Reports the earliest inconsistency.
VerifyResult verify_chain(std::span<const Block> blocks, const KeyRegistry& registry,
                          SignatureCache* cache = nullptr);

}  // namespace sdnguard::ledger
