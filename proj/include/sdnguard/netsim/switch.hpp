#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/netsim/scenario.hpp"
#include "sdnguard/policy.hpp"
#include "sdnguard/rng.hpp"

namespace sdnguard::netsim {

// Rate limiter in bytes; starts full.
class TokenBucket {
 public:
  TokenBucket(double rate_bps, double burst_bytes);
  // Refills to `now`, then takes `bytes` if available.
  bool take(double bytes, double now);
  double tokens(double now);

 private:
  double rate_Bps_;
  double burst_;
  double tokens_;
  double last_ = 0.0;
};

struct InstalledRule {
  policy::FlowRule rule;
  double requested = 0.0;
  double applied = 0.0;  // active from this time on
  std::uint64_t seq = 0;
  std::optional<TokenBucket> meter;
};

enum class Disposition { Enqueued, Dropped, Redirected };

struct Admission {
  Disposition disposition = Disposition::Enqueued;
  policy::Queue queue = policy::Queue::Low;
  std::string reason;                  // set when dropped
  std::vector<PacketRecord> evicted;   // low-queue packets pushed out by this arrival
};

struct Departure {
  PacketRecord packet;
  policy::Queue queue = policy::Queue::Low;
};

// Single switch with one egress link. Rules match a flow in both directions;
// the highest-priority active rule wins and the default is forward to the
// low queue. The link serves the high queue first while its token rate
// allows and is otherwise work-conserving. The buffer is shared; overflow
// evicts from the low queue before refusing a high-queue packet.
class Switch {
 public:
  Switch(const SwitchConfig& cfg, double link_capacity_bps, std::uint64_t seed);

  // Schedules `rule` to take effect after a sampled install latency and
  // returns the activation time. Returns nullopt when an identical rule is
  // already installed. Replaces a rule with the same match and priority.
  // Throws TableFull beyond the configured capacity.
  std::optional<double> install_rule(const policy::FlowRule& rule, double now);
  double sample_install_latency();

  std::size_t rule_count() const noexcept { return rule_count_; }
  // Highest-priority rule active at `now` for p; nullptr means the default rule.
  const InstalledRule* match(const PacketRecord& p, double now) const;

  Admission admit(const PacketRecord& p, double now);

  // If the link is idle and a packet is queued, starts sending it and returns
  // its departure time.
  std::optional<double> try_start(double now);
  // Completes the packet in flight.
  Departure complete();
  bool busy() const noexcept { return in_flight_.has_value(); }
  bool idle_and_empty() const noexcept { return !in_flight_ && high_.empty() && low_.empty(); }
  std::size_t buffered_bytes() const noexcept { return buffered_; }
  // Time a newly queued low-priority packet would wait, in seconds.
  double queue_delay_estimate() const noexcept;

 private:
  InstalledRule* match_mut(const PacketRecord& p, double now);

  SwitchConfig cfg_;
  double link_Bps_;
  Rng rng_;
  std::unordered_map<FlowKey, std::vector<InstalledRule>, FlowKeyHash> rules_;
  std::size_t rule_count_ = 0;
  std::uint64_t next_seq_ = 0;

  std::deque<PacketRecord> high_;
  std::deque<PacketRecord> low_;
  std::size_t buffered_ = 0;
  TokenBucket high_bucket_;
  std::optional<Departure> in_flight_;
};

}  // namespace sdnguard::netsim
