#pragma once

#include <cstdint>
#include <vector>

namespace sdnguard::ledger {

// Virtual-time model of submit -> commit latency. Submitters emit bursts of
// `concurrency` transactions at a fixed aggregate arrival rate; every peer
// endorses serially (network delay plus a per-transaction verify cost, with
// seeded jitter); the orderer cuts a block when block_size endorsed
// transactions are waiting or the oldest has waited block_timeout; a single
// committer applies blocks in order at ordering + validation * n.
struct LatencyModelConfig {
  std::vector<std::size_t> block_sizes{10, 50, 100, 300};
  std::vector<std::size_t> concurrency{1};
  std::size_t transactions = 3000;
  double arrival_rate_tps = 2000.0;
  int peers = 2;
  double network_ms = 20.0;
  double verify_ms = 0.1;
  double jitter = 0.2;  // uniform +-fraction on network and verify delays
  double ordering_ms = 50.0;
  double validation_per_txn_ms = 0.15;
  double block_timeout_s = 2.0;
  std::uint64_t seed = 1;
};

struct LatencyRow {
  std::size_t block_size = 0;
  std::size_t concurrency = 0;
  std::size_t transactions = 0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  double p95_ms = 0.0;
};

// One row per (block size, concurrency) in the given order. Every setting
// replays the same arrival and jitter sequence, so rows differ only by the
// parameters under study. Throws InvalidConfig on an empty or invalid config.
std::vector<LatencyRow> measure_txn_latency(const LatencyModelConfig& cfg);

}  // namespace sdnguard::ledger
