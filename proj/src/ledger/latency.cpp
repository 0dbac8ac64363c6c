#include "sdnguard/ledger/latency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdnguard/error.hpp"
#include "sdnguard/rng.hpp"

namespace sdnguard::ledger {

namespace {

LatencyRow simulate(const LatencyModelConfig& cfg, std::size_t block_size, std::size_t concurrency) {
  const std::size_t n = cfg.transactions;
  const double burst_gap = static_cast<double>(concurrency) / cfg.arrival_rate_tps;

  std::vector<double> submit(n);
  for (std::size_t i = 0; i < n; ++i) submit[i] = static_cast<double>(i / concurrency) * burst_gap;

  // Endorsement: each peer is a serial server; a transaction is endorsed once
  // the slowest peer replies.
  Rng rng(cfg.seed, 0x1ed6e5);
  std::vector<double> endorsed(n, 0.0);
  std::vector<double> peer_free(static_cast<std::size_t>(cfg.peers), 0.0);
  auto jittered = [&](double ms) { return ms * (1.0 + cfg.jitter * (2.0 * rng.uniform() - 1.0)) / 1000.0; };
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& free_at : peer_free) {
      const double arrive = submit[i] + jittered(cfg.network_ms) / 2.0;
      const double done = std::max(arrive, free_at) + jittered(cfg.verify_ms);
      free_at = done;
      endorsed[i] = std::max(endorsed[i], done + jittered(cfg.network_ms) / 2.0);
    }
  }

  // Ordering queue in endorsement order (ties by submission order).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return endorsed[a] < endorsed[b]; });

  std::vector<double> latency(n, 0.0);
  double committer_free = 0.0;
  std::size_t start = 0;
  while (start < n) {
    const std::size_t full_end = std::min(start + block_size, n);
    const double full_at = endorsed[order[full_end - 1]];
    const double timeout_at = endorsed[order[start]] + cfg.block_timeout_s;
    std::size_t end = full_end;
    double cut = full_at;
    if (full_end - start < block_size || timeout_at < full_at) {
      // Partial block: whatever has arrived when the timer fires (the tail of
      // the workload is flushed the same way).
      cut = timeout_at;
      end = start;
      while (end < full_end && endorsed[order[end]] <= cut) ++end;
      if (end == start) end = start + 1;
      cut = std::max(cut, endorsed[order[end - 1]]);
    }
    const double count = static_cast<double>(end - start);
    const double commit = std::max(cut + cfg.ordering_ms / 1000.0, committer_free) +
                          cfg.validation_per_txn_ms * count / 1000.0;
    committer_free = commit;
    for (std::size_t k = start; k < end; ++k) latency[order[k]] = (commit - submit[order[k]]) * 1000.0;
    start = end;
  }

  LatencyRow row{block_size, concurrency, n, 0.0, 0.0, 0.0, 0.0};
  row.mean_ms = std::accumulate(latency.begin(), latency.end(), 0.0) / static_cast<double>(n);
  auto [lo, hi] = std::minmax_element(latency.begin(), latency.end());
  row.min_ms = *lo;
  row.max_ms = *hi;
  std::vector<double> sorted = latency;
  std::sort(sorted.begin(), sorted.end());
  row.p95_ms = sorted[std::min(n - 1, static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n))) - 1)];
  return row;
}

}  // namespace

std::vector<LatencyRow> measure_txn_latency(const LatencyModelConfig& cfg) {
  if (cfg.block_sizes.empty() || cfg.concurrency.empty() || cfg.transactions == 0) {
    throw Error(Errc::InvalidConfig, "latency model needs block sizes, concurrency levels and transactions");
  }
  if (!(cfg.arrival_rate_tps > 0.0) || cfg.peers < 1 || cfg.jitter < 0.0 || cfg.jitter > 1.0 ||
      cfg.network_ms < 0.0 || cfg.verify_ms < 0.0 || cfg.ordering_ms < 0.0 ||
      cfg.validation_per_txn_ms < 0.0 || cfg.block_timeout_s < 0.0) {
    throw Error(Errc::InvalidConfig, "latency model parameters out of range");
  }
  std::vector<LatencyRow> rows;
  for (std::size_t b : cfg.block_sizes) {
    if (b == 0) throw Error(Errc::InvalidConfig, "block size must be >= 1");
    for (std::size_t c : cfg.concurrency) {
      if (c == 0) throw Error(Errc::InvalidConfig, "concurrency must be >= 1");
      rows.push_back(simulate(cfg, b, c));
    }
  }
  return rows;
}

}  // namespace sdnguard::ledger
