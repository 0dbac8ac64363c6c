#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sdnguard/ledger/ledger.hpp"

namespace sdnguard::ledger {

// File layout: the 8-byte magic "SDNLEDG1", then one record per block:
//   u32be record_length, then
//   u64be index | prev_hash[32] | lp(commit_ts_text) | u32be txn_count |
//   txn_count x (lp(payload) | lp(timestamp_text) | digest[32] |
//                signature[64] | lp(submitter)) | block_hash[32]
// where lp(x) is a u32be length followed by the bytes.
Bytes serialize_block(const Block& b);
Bytes serialize_chain(std::span<const Block> blocks);

struct ParsedChain {
  std::vector<Block> blocks;
  // Position of the first record that could not be decoded; blocks holds
  // everything before it.
  std::optional<std::size_t> fault_at;
  std::string fault;
};

ParsedChain parse_chain(std::span<const std::uint8_t> bytes);

// Parse failures surface as TamperedAt(the block being decoded), unless an
// earlier parsed block already fails verification.
VerifyResult verify_chain_bytes(std::span<const std::uint8_t> bytes, const KeyRegistry& registry,
                                SignatureCache* cache = nullptr);

void write_chain_file(const std::string& path, std::span<const Block> blocks);
Bytes read_file_bytes(const std::string& path);

// Sidecar JSON: {"identities": [{"id": "...", "public_key": "<hex>"}]}.
void write_key_registry(const std::string& path, const KeyRegistry& registry, std::string_view config_hash = {});
KeyRegistry read_key_registry(const std::string& path);

// Audit export: one JSON object per line and block with hex digests and the
// decoded transaction fields.
void export_chain_jsonl(std::ostream& out, std::span<const Block> blocks);

}  // namespace sdnguard::ledger
