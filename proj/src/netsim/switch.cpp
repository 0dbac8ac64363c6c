#include "sdnguard/netsim/switch.hpp"

#include <algorithm>

#include "sdnguard/error.hpp"

namespace sdnguard::netsim {

TokenBucket::TokenBucket(double rate_bps, double burst_bytes)
    : rate_Bps_(rate_bps / 8.0), burst_(burst_bytes), tokens_(burst_bytes) {}

double TokenBucket::tokens(double now) {
  if (now > last_) {
    tokens_ = std::min(burst_, tokens_ + (now - last_) * rate_Bps_);
    last_ = now;
  }
  return tokens_;
}

bool TokenBucket::take(double bytes, double now) {
  if (tokens(now) < bytes) return false;
  tokens_ -= bytes;
  return true;
}

namespace {
// Two full-size frames of credit for the high queue.
constexpr double kHighBurstBytes = 3000.0;
}  // namespace

Switch::Switch(const SwitchConfig& cfg, double link_capacity_bps, std::uint64_t seed)
    : cfg_(cfg),
      link_Bps_(link_capacity_bps / 8.0),
      rng_(seed, 0x5717c4),
      high_bucket_(link_capacity_bps * cfg.high_share, kHighBurstBytes) {
  if (!(link_capacity_bps > 0.0)) throw Error(Errc::InvalidConfig, "link capacity must be > 0");
}

double Switch::sample_install_latency() {
  const double mean = cfg_.install_mean_ms / 1000.0;
  if (cfg_.install_jitter == 0.0) return mean;
  return mean * (1.0 + cfg_.install_jitter * (2.0 * rng_.uniform() - 1.0));
}

std::optional<double> Switch::install_rule(const policy::FlowRule& rule, double now) {
  auto& slot = rules_[flow_key(rule.match)];
  auto same = std::find_if(slot.begin(), slot.end(), [&](const InstalledRule& r) {
    return r.rule.priority == rule.priority;
  });
  if (same != slot.end() && same->rule == rule) return std::nullopt;
  if (same == slot.end() && rule_count_ >= cfg_.table_capacity) {
    throw Error(Errc::TableFull, "flow table holds " + std::to_string(rule_count_) + " rules");
  }
  InstalledRule ir;
  ir.rule = rule;
  ir.requested = now;
  ir.applied = now + sample_install_latency();
  ir.seq = next_seq_++;
  if (rule.meter_bps) ir.meter.emplace(*rule.meter_bps, cfg_.meter_burst_bytes);
  const double applied = ir.applied;
  if (same != slot.end()) {
    *same = std::move(ir);
  } else {
    slot.push_back(std::move(ir));
    ++rule_count_;
  }
  return applied;
}

InstalledRule* Switch::match_mut(const PacketRecord& p, double now) {
  auto it = rules_.find(flow_key(p));
  if (it == rules_.end()) return nullptr;
  InstalledRule* best = nullptr;
  for (auto& r : it->second) {
    if (r.applied > now) continue;
    if (!best || r.rule.priority > best->rule.priority ||
        (r.rule.priority == best->rule.priority && r.seq < best->seq)) {
      best = &r;
    }
  }
  return best;
}

const InstalledRule* Switch::match(const PacketRecord& p, double now) const {
  return const_cast<Switch*>(this)->match_mut(p, now);
}

Admission Switch::admit(const PacketRecord& p, double now) {
  Admission a;
  InstalledRule* r = match_mut(p, now);
  if (r) {
    switch (r->rule.action) {
      case policy::RuleAction::Drop:
        a.disposition = Disposition::Dropped;
        a.reason = "rule";
        return a;
      case policy::RuleAction::OutputHoneypot:
        a.disposition = Disposition::Redirected;
        return a;
      case policy::RuleAction::Forward:
        break;
    }
    if (r->meter && !r->meter->take(p.length, now)) {
      a.disposition = Disposition::Dropped;
      a.reason = "meter";
      return a;
    }
    a.queue = r->rule.queue.value_or(policy::Queue::Low);
  }

  auto fits = [&] {
    return buffered_ + p.length <= cfg_.buffer_bytes && high_.size() + low_.size() < cfg_.buffer_packets;
  };
  if (!fits() && a.queue == policy::Queue::High) {
    while (!low_.empty() && !fits()) {
      buffered_ -= low_.back().length;
      a.evicted.push_back(std::move(low_.back()));
      low_.pop_back();
    }
  }
  if (!fits()) {
    a.disposition = Disposition::Dropped;
    a.reason = "overflow";
    return a;
  }
  (a.queue == policy::Queue::High ? high_ : low_).push_back(p);
  buffered_ += p.length;
  return a;
}

std::optional<double> Switch::try_start(double now) {
  if (in_flight_ || (high_.empty() && low_.empty())) return std::nullopt;
  policy::Queue q;
  if (!high_.empty() && high_bucket_.take(high_.front().length, now)) {
    q = policy::Queue::High;
  } else if (!low_.empty()) {
    q = policy::Queue::Low;
  } else {
    q = policy::Queue::High;
  }
  auto& queue = q == policy::Queue::High ? high_ : low_;
  in_flight_ = Departure{std::move(queue.front()), q};
  queue.pop_front();
  buffered_ -= in_flight_->packet.length;
  return now + in_flight_->packet.length / link_Bps_;
}

Departure Switch::complete() {
  Departure d = std::move(*in_flight_);
  in_flight_.reset();
  return d;
}

double Switch::queue_delay_estimate() const noexcept {
  return static_cast<double>(buffered_) / link_Bps_;
}

}  // namespace sdnguard::netsim
