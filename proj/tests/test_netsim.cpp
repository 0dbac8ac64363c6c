#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "sdnguard/error.hpp"
#include "sdnguard/netsim/closed_loop.hpp"
#include "sdnguard/netsim/event_log.hpp"
#include "sdnguard/netsim/scenario.hpp"
#include "sdnguard/netsim/switch.hpp"
#include "sdnguard/netsim/traffic.hpp"

using namespace sdnguard;
using namespace sdnguard::netsim;

namespace {

const std::string kFlow = "10.0.0.9:4000->10.0.0.2:80/TCP";

PacketRecord packet(const std::string& flow_id, double ts, std::uint32_t len = 1000) {
  const auto t = *parse_flow_id(flow_id);
  PacketRecord p;
  p.ts = ts;
  p.src_ip = t.src_ip;
  p.dst_ip = t.dst_ip;
  p.src_port = t.src_port;
  p.dst_port = t.dst_port;
  p.protocol = t.protocol;
  p.length = len;
  return p;
}

SwitchConfig instant() {
  SwitchConfig c;
  c.install_mean_ms = 0.0;
  c.install_jitter = 0.0;
  return c;
}

std::string jsonl(const EventLog& log) {
  std::ostringstream out;
  log.write_jsonl(out);
  return out.str();
}

ScenarioConfig voip_only(double rate_kbps, double duration) {
  ScenarioConfig c;
  c.duration = duration;
  c.apps = {AppTraffic{App::VoIP, 1, rate_kbps, 200, Protocol::UDP, 5060, 0.0, -1.0, 0.1}};
  return c;
}

}  // namespace

TEST(TokenBucket, StartsFullAndRefills) {
  TokenBucket b(8000.0, 500.0);  // 1000 B/s
  EXPECT_TRUE(b.take(500, 0.0));
  EXPECT_FALSE(b.take(1, 0.0));
  EXPECT_NEAR(b.tokens(0.25), 250.0, 1e-9);
  EXPECT_NEAR(b.tokens(10.0), 500.0, 1e-9);
}

// A 1 Mbps meter passes half of a 2 Mbps stream, up to the initial burst.
TEST(Switch, MeterMatchesTokenBucketAnalytics) {
  Switch sw(instant(), 1e9, 1);
  sw.install_rule(policy::compile_rule(kFlow, policy::SeverityClass::Suspicious, policy::NetworkAction::RateLimit), 0.0);
  const double duration = 6.0;
  double offered = 0.0, passed = 0.0;
  for (double t = 0.0; t < duration; t += 0.004) {  // 1000 B / 4 ms = 2 Mbps
    const auto a = sw.admit(packet(kFlow, t), t);
    offered += 1000;
    if (a.disposition == Disposition::Enqueued) {
      passed += 1000;
      while (auto done = sw.try_start(t)) sw.complete();
    } else {
      EXPECT_EQ(a.reason, "meter");
    }
  }
  const double analytic = 1e6 / 8.0 * duration + instant().meter_burst_bytes;
  EXPECT_NEAR(passed, analytic, 0.01 * analytic);
  EXPECT_NEAR(passed, offered / 2.0, 0.05 * offered / 2.0);
}

TEST(Switch, DefaultForwardsToLowQueue) {
  Switch sw(instant(), 1e6, 1);
  const auto a = sw.admit(packet(kFlow, 0.0), 0.0);
  EXPECT_EQ(a.disposition, Disposition::Enqueued);
  EXPECT_EQ(a.queue, policy::Queue::Low);
  EXPECT_EQ(sw.match(packet(kFlow, 0.0), 0.0), nullptr);
}

TEST(Switch, HighestPriorityWinsBothDirections) {
  Switch sw(instant(), 1e6, 1);
  sw.install_rule(policy::compile_rule(kFlow, policy::SeverityClass::Safe, policy::NetworkAction::Prioritize), 0.0);
  sw.install_rule(policy::compile_rule(kFlow, policy::SeverityClass::Malicious, policy::NetworkAction::Drop), 0.0);
  const auto fwd = sw.admit(packet(kFlow, 0.1), 0.1);
  EXPECT_EQ(fwd.disposition, Disposition::Dropped);
  EXPECT_EQ(fwd.reason, "rule");
  const auto back = sw.admit(packet("10.0.0.2:80->10.0.0.9:4000/TCP", 0.2), 0.2);
  EXPECT_EQ(back.disposition, Disposition::Dropped);
  EXPECT_EQ(sw.match(packet(kFlow, 0.3), 0.3)->rule.priority, 100);
  EXPECT_EQ(sw.rule_count(), 2u);
}

TEST(Switch, HoneypotRedirects) {
  Switch sw(instant(), 1e6, 1);
  sw.install_rule(policy::compile_rule(kFlow, policy::SeverityClass::Malicious, policy::NetworkAction::RedirectHoneypot),
                  0.0);
  EXPECT_EQ(sw.admit(packet(kFlow, 0.0), 0.0).disposition, Disposition::Redirected);
}

TEST(Switch, InstallLatencyModel) {
  SwitchConfig c;
  c.install_mean_ms = 24.8;
  c.install_jitter = 0.0;
  Switch exact(c, 1e6, 1);
  const auto rule = policy::compile_rule(kFlow, policy::SeverityClass::Malicious, policy::NetworkAction::Drop);
  EXPECT_DOUBLE_EQ(*exact.install_rule(rule, 1.0), 1.0248);
  EXPECT_EQ(exact.match(packet(kFlow, 1.02), 1.02), nullptr);
  EXPECT_NE(exact.match(packet(kFlow, 1.0248), 1.0248), nullptr);
  EXPECT_FALSE(exact.install_rule(rule, 2.0).has_value());

  Switch zero(instant(), 1e6, 1);
  EXPECT_EQ(*zero.install_rule(rule, 3.0), 3.0);
  EXPECT_NE(zero.match(packet(kFlow, 3.0), 3.0), nullptr);

  c.install_jitter = 0.3;
  Switch jittery(c, 1e6, 9);
  double sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lat = jittery.sample_install_latency();
    EXPECT_GE(lat, 0.0248 * 0.7 - 1e-12);
    EXPECT_LE(lat, 0.0248 * 1.3 + 1e-12);
    sum += lat;
  }
  EXPECT_NEAR(sum / 1000.0, 0.0248, 0.00248);
}

TEST(Switch, TableFull) {
  SwitchConfig c = instant();
  c.table_capacity = 2;
  Switch sw(c, 1e6, 1);
  for (int i = 0; i < 2; ++i) {
    sw.install_rule(policy::compile_rule("10.0.0.1:" + std::to_string(100 + i) + "->10.0.0.2:80/TCP",
                                         policy::SeverityClass::Malicious, policy::NetworkAction::Drop),
                    0.0);
  }
  try {
    sw.install_rule(policy::compile_rule(kFlow, policy::SeverityClass::Malicious, policy::NetworkAction::Drop), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TableFull);
  }
}

TEST(Switch, OverflowEvictsLowBeforeHigh) {
  SwitchConfig c = instant();
  c.buffer_bytes = 3000;
  Switch sw(c, 1e6, 1);
  const std::string voip = "10.0.1.1:30000->10.0.0.2:5060/UDP";
  sw.install_rule(policy::compile_rule(voip, policy::SeverityClass::Safe, policy::NetworkAction::Prioritize), 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(sw.admit(packet(kFlow, 0.0), 0.0).disposition, Disposition::Enqueued);
  const auto low = sw.admit(packet(kFlow, 0.0), 0.0);
  EXPECT_EQ(low.disposition, Disposition::Dropped);
  EXPECT_EQ(low.reason, "overflow");
  const auto high = sw.admit(packet(voip, 0.0, 500), 0.0);
  EXPECT_EQ(high.disposition, Disposition::Enqueued);
  EXPECT_EQ(high.queue, policy::Queue::High);
  ASSERT_EQ(high.evicted.size(), 1u);
  EXPECT_LE(sw.buffered_bytes(), 3000u);
  // High queue is served first.
  ASSERT_TRUE(sw.try_start(0.0));
  EXPECT_EQ(sw.complete().queue, policy::Queue::High);
}

TEST(Switch, PacketSlotLimit) {
  SwitchConfig c = instant();
  c.buffer_packets = 4;
  Switch sw(c, 1e6, 1);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(sw.admit(packet(kFlow, 0.0, 64), 0.0).disposition, Disposition::Enqueued);
  EXPECT_EQ(sw.admit(packet(kFlow, 0.0, 64), 0.0).reason, "overflow");
}

TEST(Traffic, RatesMatchConfiguration) {
  const auto trace = generate_traffic(voip_only(64.0, 10.0));
  double bytes = 0.0;
  for (const auto& p : trace.packets) bytes += p.length;
  EXPECT_NEAR(bytes, 80000.0, 0.05 * 80000.0);

  auto c = voip_ddos_scenario(3);
  const auto full = generate_traffic(c);
  double voip = 0.0, attack = 0.0;
  for (const auto& p : full.packets) {
    (p.app == App::Attack ? attack : voip) += p.length;
    if (p.app == App::Attack) EXPECT_EQ(p.label, c.attack.type);
  }
  EXPECT_NEAR(voip, 10 * 100e3 / 8 * c.duration, 0.05 * 10 * 100e3 / 8 * c.duration);
  const double attack_bytes = c.attack.intensity_mbps * 1e6 / 8 * (c.duration - c.attack.start);
  EXPECT_NEAR(attack, attack_bytes, 0.05 * attack_bytes);
  ASSERT_FALSE(full.warnings.empty());
  EXPECT_EQ(full.warnings[0].rfind("OverCapacityConfig", 0), 0u);
  for (std::size_t i = 1; i < full.packets.size(); ++i) EXPECT_LE(full.packets[i - 1].ts, full.packets[i].ts);
}

TEST(Traffic, ZeroAttackIsBenignOnlyAndDeterministic) {
  auto c = voip_ddos_scenario(5);
  auto quiet = c;
  quiet.attack.intensity_mbps = 0.0;
  auto benign = c;
  benign.attack = AttackSpec{};
  const auto a = generate_traffic(quiet), b = generate_traffic(benign);
  ASSERT_EQ(a.packets.size(), b.packets.size());
  for (std::size_t i = 0; i < a.packets.size(); ++i) {
    EXPECT_EQ(a.packets[i].ts, b.packets[i].ts);
    EXPECT_EQ(tuple_of(a.packets[i]), tuple_of(b.packets[i]));
  }
  const auto x = generate_traffic(c), y = generate_traffic(c);
  ASSERT_EQ(x.packets.size(), y.packets.size());
  for (std::size_t i = 0; i < x.packets.size(); ++i) {
    EXPECT_EQ(x.packets[i].ts, y.packets[i].ts);
    EXPECT_EQ(x.packets[i].length, y.packets[i].length);
  }
}

TEST(Traffic, SyntheticFlows) {
  const auto flows = synthetic_flows(4000, 2);
  ASSERT_EQ(flows.size(), 4000u);
  std::size_t normal = 0;
  std::set<Label> seen;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    ASSERT_TRUE(flows[i].label);
    seen.insert(*flows[i].label);
    normal += *flows[i].label == Label::Normal ? 1 : 0;
    if (i > 0) EXPECT_GE(flows[i].first_ts, flows[i - 1].first_ts);
    EXPECT_EQ(flows[i].fwd_pkt_count + flows[i].bwd_pkt_count, flows[i].pkt_count);
  }
  EXPECT_NEAR(static_cast<double>(normal) / 4000.0, 0.5, 0.05);
  EXPECT_EQ(seen.size(), kNumLabels);
}

TEST(Scenario, JsonRoundTripAndValidation) {
  auto c = voip_ddos_scenario(7, false);
  c.switch_cfg.buffer_packets = 64;
  const auto back = scenario_from_json(scenario_to_json(c));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(c));
  EXPECT_EQ(back.seed, 7u);
  EXPECT_FALSE(back.enforcement);

  auto bad = c;
  bad.duration = 0.0;
  EXPECT_THROW(validate(bad), Error);
  bad = c;
  bad.attack.intensity_mbps = -1.0;
  EXPECT_THROW(validate(bad), Error);
  EXPECT_THROW(scenario_from_json(nlohmann::json{{"duration", "long"}}), Error);
}

TEST(EventLog, OrderedAndRoundTrips) {
  EventLog log;
  log.push(PacketDelivered{0.5, kFlow, 100, App::VoIP, policy::Queue::High});
  log.push(AlertRaised{1.0, 0, ids::Alert{kFlow, Label::DDoS, 0.9, 1.0}});
  log.push(RuleInstalled{1.0, 0,
                         policy::compile_rule(kFlow, policy::SeverityClass::Malicious, policy::NetworkAction::Drop),
                         0.0248, 1.0248});
  log.push(PacketDropped{1.1, kFlow, 1000, App::Attack, "rule"});
  log.push(PacketRedirected{1.2, kFlow, 1000, App::Attack});
  log.push(TxnSubmitted{1.2, "abcd", kFlow});
  log.push(TxnCommitted{2.0, "abcd", 1});
  EXPECT_THROW(log.push(TxnCommitted{1.9, "x", 1}), Error);

  std::ostringstream out;
  log.write_jsonl(out, "hash");
  EXPECT_EQ(out.str().rfind("{\"config_hash\":\"hash\",\"type\":\"RunHeader\"}", 0), 0u);
  std::istringstream in(out.str());
  const auto back = read_event_log_jsonl(in);
  EXPECT_EQ(jsonl(back), jsonl(log));
  EXPECT_EQ(back.count<RuleInstalled>(), 1u);
}

TEST(ClosedLoop, BenignWithNeverAlertingModel) {
  auto c = voip_only(100.0, 5.0);
  const auto r = run_closed_loop(c, never_alert_detector());
  EXPECT_EQ(r.log.count<AlertRaised>(), 0u);
  EXPECT_EQ(r.log.count<RuleInstalled>(), 0u);
  EXPECT_EQ(r.chain.size(), 1u);
}

TEST(ClosedLoop, EveryAttackFlowGetsADropRule) {
  const auto c = voip_ddos_scenario(2);
  const auto trace = generate_traffic(c);
  const auto r = run_closed_loop(c, trace, perfect_detector());
  std::set<FlowKey> attack, dropped;
  for (const auto& p : trace.packets) if (p.app == App::Attack) attack.insert(flow_key(p));
  for (const auto& e : r.log.events()) {
    if (const auto* ri = std::get_if<RuleInstalled>(&e)) {
      if (ri->rule.action == policy::RuleAction::Drop && ri->rule.priority == 100) dropped.insert(flow_key(ri->rule.match));
    }
  }
  EXPECT_EQ(attack.size(), static_cast<std::size_t>(c.attack.sources));
  EXPECT_EQ(dropped, attack);
}

TEST(ClosedLoop, EnforcementOffInstallsNothingButStillLogs) {
  const auto r = run_closed_loop(voip_ddos_scenario(1, false), perfect_detector());
  EXPECT_GT(r.log.count<AlertRaised>(), 0u);
  EXPECT_EQ(r.log.count<RuleInstalled>(), 0u);
  EXPECT_GT(r.log.count<TxnCommitted>(), 0u);
  EXPECT_EQ(r.log.count<TxnCommitted>(), r.log.count<TxnSubmitted>());
}

TEST(ClosedLoopProperty, ConservationCausalityDeterminism) {
  for (std::uint64_t seed : {1, 4}) {
    const auto c = voip_ddos_scenario(seed);
    const auto trace = generate_traffic(c);
    const auto r = run_closed_loop(c, trace, perfect_detector());
    std::map<FlowKey, std::uint64_t> offered, accounted;
    for (const auto& p : trace.packets) offered[flow_key(p)] += p.length;
    std::map<std::uint64_t, std::pair<double, std::string>> alerts;
    for (const auto& e : r.log.events()) {
      std::visit(
          [&](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, PacketDelivered> || std::is_same_v<T, PacketDropped> ||
                          std::is_same_v<T, PacketRedirected>) {
              accounted[flow_key(*parse_flow_id(ev.flow_id))] += ev.bytes;
            } else if constexpr (std::is_same_v<T, AlertRaised>) {
              alerts[ev.alert_id] = {ev.ts, ev.alert.flow_id};
            } else if constexpr (std::is_same_v<T, RuleInstalled>) {
              ASSERT_TRUE(alerts.count(ev.alert_id));
              EXPECT_LE(alerts[ev.alert_id].first, ev.ts);
              EXPECT_EQ(alerts[ev.alert_id].second, ev.rule.flow_id);
              EXPECT_GE(ev.applied_ts, ev.ts);
            }
          },
          e);
    }
    EXPECT_EQ(accounted, offered);
    EXPECT_EQ(r.offered_packets, trace.packets.size());

    const auto again = run_closed_loop(c, trace, perfect_detector());
    EXPECT_EQ(jsonl(again.log), jsonl(r.log));
    EXPECT_EQ(again.chain, r.chain);
  }
}

TEST(ClosedLoopProperty, EnforcementDominance) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto bytes = [](const EventLog& log) {
      double b = 0.0;
      for (const auto& e : log.events()) {
        if (const auto* d = std::get_if<PacketDelivered>(&e); d && d->app == App::VoIP) b += d->bytes;
      }
      return b;
    };
    const auto on = run_closed_loop(voip_ddos_scenario(seed, true), perfect_detector());
    const auto off = run_closed_loop(voip_ddos_scenario(seed, false), perfect_detector());
    EXPECT_GE(bytes(on.log), bytes(off.log)) << "seed " << seed;
  }
}

TEST(ClosedLoop, FullRuleTableDegradesToWarning) {
  auto c = voip_ddos_scenario(1);
  c.switch_cfg.table_capacity = 5;
  const auto r = run_closed_loop(c, perfect_detector());
  EXPECT_EQ(r.log.count<RuleInstalled>(), 5u);
  EXPECT_GT(r.log.count<AlertRaised>(), 5u);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.warnings.back().rfind("TableFull", 0), 0u);
}
