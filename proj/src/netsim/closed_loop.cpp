#include "sdnguard/netsim/closed_loop.hpp"

#include <deque>
#include <map>
#include <queue>
#include <tuple>

#include "sdnguard/error.hpp"
#include "sdnguard/ledger/transaction.hpp"
#include "sdnguard/netsim/switch.hpp"

namespace sdnguard::netsim {

Detector perfect_detector(double confidence) {
  return {"perfect", [confidence](const FlowState& f, const FeatureVector&) {
            return ids::FusedDecision{f.label.value_or(Label::Normal), confidence};
          }};
}

Detector never_alert_detector() {
  return {"never", [](const FlowState&, const FeatureVector&) { return ids::FusedDecision{Label::Normal, 1.0}; }};
}

Detector ensemble_detector(std::shared_ptr<const ids::Ensemble> ensemble, NormalizationStats stats) {
  if (!ensemble) throw Error(Errc::EmptyEnsemble, "no ensemble given");
  if (stats.feature_names != FeatureVector::names()) {
    throw Error(Errc::SchemaMismatch, "normalizer does not use the flow feature schema");
  }
  return {"ensemble", [ensemble, stats = std::move(stats)](const FlowState&, const FeatureVector& v) {
            const auto raw = v.values();
            std::array<double, FeatureVector::kSize> z{};
            normalize_into(raw, stats, z);
            return ensemble->classify(z);
          }};
}

namespace {

enum class Kind { Departure, Tick, Detection, EndOfTraffic };

struct SimEvent {
  double t;
  std::uint64_t seq;
  Kind kind;
  std::size_t ref;

  bool operator>(const SimEvent& o) const { return std::tie(t, seq) > std::tie(o.t, o.seq); }
};

class Loop {
 public:
  Loop(const ScenarioConfig& cfg, const Detector& det, const LoopConfig& lc)
      : cfg_(cfg),
        det_(det),
        lc_(lc),
        link_bps_(cfg.link_capacity_mbps * 1e6),
        table_(cfg.flow_table),
        sw_(cfg.switch_cfg, link_bps_, cfg.seed),
        ledger_(lc.ledger),
        identity_(ledger::SigningIdentity::derive(lc.identity, lc.identity_seed)) {
    ledger_.register_identity(identity_.id(), identity_.public_key());
    out_.flows.feature_names = FeatureVector::names();
  }

  ClosedLoopResult run(const Trace& trace) {
    out_.warnings = trace.warnings;
    for (std::size_t k = 1; static_cast<double>(k) * cfg_.detector.tick_s <= cfg_.duration; ++k) {
      schedule(static_cast<double>(k) * cfg_.detector.tick_s, Kind::Tick, 0);
    }
    const double traffic_end = std::max(cfg_.duration, trace.packets.empty() ? 0.0 : trace.packets.back().ts);
    schedule(traffic_end, Kind::EndOfTraffic, 0);

    std::size_t next = 0;
    while (next < trace.packets.size() || !pq_.empty()) {
      const bool take_arrival =
          next < trace.packets.size() && (pq_.empty() || trace.packets[next].ts < pq_.top().t);
      if (take_arrival) {
        now_ = std::max(now_, trace.packets[next].ts);
        on_arrival(trace.packets[next++]);
        continue;
      }
      SimEvent e = pq_.top();
      pq_.pop();
      now_ = std::max(now_, e.t);
      switch (e.kind) {
        case Kind::Departure: on_departure(); break;
        case Kind::Tick: on_tick(); break;
        case Kind::Detection: on_detection(e.ref); break;
        case Kind::EndOfTraffic: on_end_of_traffic(); break;
      }
    }
    for (const auto& b : ledger_.flush(now_)) log_commit(b);

    if (rules_refused_ > 0) {
      out_.warnings.push_back("TableFull: " + std::to_string(rules_refused_) + " rules not installed (capacity " +
                              std::to_string(cfg_.switch_cfg.table_capacity) + ")");
    }
    out_.chain = ledger_.blocks();
    out_.registry = ledger_.registry();
    out_.end_time = now_;
    return std::move(out_);
  }

 private:
  void schedule(double t, Kind kind, std::size_t ref) { pq_.push({t, seq_++, kind, ref}); }

  void on_arrival(const PacketRecord& p) {
    ++out_.offered_packets;
    out_.offered_bytes += p.length;

    closed_.clear();
    table_.ingest(p, closed_);
    queue_for_detection(std::move(closed_));

    const std::string flow_id = render_flow_id(tuple_of(p));
    Admission a = sw_.admit(p, now_);
    for (const auto& ev : a.evicted) {
      out_.log.push(PacketDropped{now_, render_flow_id(tuple_of(ev)), ev.length, ev.app, "overflow"});
    }
    switch (a.disposition) {
      case Disposition::Dropped:
        out_.log.push(PacketDropped{now_, flow_id, p.length, p.app, a.reason});
        break;
      case Disposition::Redirected:
        out_.log.push(PacketRedirected{now_, flow_id, p.length, p.app});
        break;
      case Disposition::Enqueued:
        start_link();
        break;
    }
  }

  void start_link() {
    if (auto t = sw_.try_start(now_)) schedule(*t, Kind::Departure, 0);
  }

  void on_departure() {
    Departure d = sw_.complete();
    out_.log.push(PacketDelivered{now_, render_flow_id(tuple_of(d.packet)), d.packet.length, d.packet.app, d.queue});
    start_link();
  }

  void on_tick() {
    queue_for_detection(table_.expire(now_));
    commit_ready_blocks();
  }

  void on_end_of_traffic() {
    queue_for_detection(table_.flush());
    commit_ready_blocks();
  }

  void queue_for_detection(std::vector<FlowState> flows) {
    const double cost = cfg_.detector.inference_ms / 1000.0;
    for (auto& f : flows) {
      detector_free_ = std::max(detector_free_, now_) + cost;
      pending_flows_.push_back(std::move(f));
      schedule(detector_free_, Kind::Detection, pending_flows_.size() - 1);
    }
  }

  void commit_ready_blocks() {
    while (auto b = ledger_.commit_block(now_)) log_commit(*b);
  }

  void log_commit(const ledger::Block& b) {
    for (const auto& t : b.txns) {
      out_.log.push(TxnCommitted{now_, ledger::to_hex(t.digest).substr(0, 16), b.index});
    }
  }

  double alerts_per_minute(std::uint32_t src) {
    auto& q = alert_times_[src];
    while (!q.empty() && q.front() < now_ - 60.0) q.pop_front();
    return static_cast<double>(q.size());
  }

  void on_detection(std::size_t ref) {
    FlowState f = std::move(pending_flows_[ref]);
    const FeatureVector fv = extract_features(f);
    const ids::FusedDecision d = det_.score(f, fv);
    const Label truth = f.label.value_or(Label::Normal);
    const std::string flow_id = f.flow_id();
    out_.detections.push_back({now_, flow_id, truth, d.label, d.score});
    const auto vals = fv.values();
    out_.flows.add_row(vals, truth);

    auto alert = ids::decide(d, lc_.ledger.theta, flow_id, now_);
    if (!alert) return;
    try {
      handle_alert(f, fv, *alert);
    } catch (const Error& e) {
      throw Error(e.code(), "t=" + std::to_string(now_) + " flow " + flow_id + ": " + e.what());
    }
  }

  void handle_alert(const FlowState& f, const FeatureVector& fv, const ids::Alert& alert) {
    const std::uint64_t alert_id = next_alert_++;
    out_.log.push(AlertRaised{now_, alert_id, alert});

    const auto& pc = lc_.policy;
    policy::SeverityInputs si;
    si.src_bytes_per_sec = fv.byte_rate;
    si.total_bytes_per_sec = link_bps_ / 8.0;
    si.confidence = alert.confidence;
    si.alerts_per_minute = alerts_per_minute(f.forward.src_ip);
    si.entropy_bits = fv.dst_port_entropy;
    alert_times_[f.forward.src_ip].push_back(now_);
    const double severity = policy::severity_score(si, pc.severity_weights);
    const policy::SeverityClass cls = policy::classify_severity(alert.confidence, pc.thresholds);
    const policy::NetworkAction action = pc.table.lookup(alert.label);

    policy::QosInputs qi;
    qi.app_priority = policy::app_priority(f.forward);
    qi.latency_ms = sw_.queue_delay_estimate() * 1000.0;
    qi.threat_severity = pc.risk_term == policy::RiskTerm::Severity ? severity : alert.confidence;
    qi.bw_share = std::min(fv.byte_rate * 8.0 / link_bps_, 1.0);
    const double qos = policy::qos_score(qi, pc.qos_weights);

    std::optional<policy::NetworkAction> enforced;
    if (cfg_.enforcement && policy::is_consistent(cls, action)) {
      const policy::FlowRule rule = policy::compile_rule(alert.flow_id, cls, action);
      try {
        if (auto applied = sw_.install_rule(rule, now_)) {
          out_.log.push(RuleInstalled{now_, alert_id, rule, *applied - now_, *applied});
        }
        enforced = action;
      } catch (const Error& e) {
        if (e.code() != Errc::TableFull) throw;
        // The alert is still logged, without an enforced action.
        ++rules_refused_;
      }
    }

    auto txn = ledger::seal_transaction(alert, enforced, qos, identity_, now_);
    const std::string txn_id = ledger::to_hex(txn.digest).substr(0, 16);
    auto outcome = ledger_.submit(std::move(txn), alert.confidence, now_);
    if (std::holds_alternative<ledger::Accepted>(outcome)) {
      out_.log.push(TxnSubmitted{now_, txn_id, alert.flow_id});
    } else if (auto* r = std::get_if<ledger::Rejected>(&outcome)) {
      std::string why;
      for (const auto& s : r->reasons) why += (why.empty() ? "" : "; ") + s;
      out_.warnings.push_back("ledger rejected alert " + std::to_string(alert_id) + ": " + why);
    }
  }

  std::size_t rules_refused_ = 0;
  const ScenarioConfig& cfg_;
  const Detector& det_;
  const LoopConfig& lc_;
  double link_bps_;
  FlowTable table_;
  Switch sw_;
  ledger::Ledger ledger_;
  ledger::SigningIdentity identity_;

  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> pq_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  double detector_free_ = 0.0;
  std::vector<FlowState> closed_;
  std::vector<FlowState> pending_flows_;
  std::uint64_t next_alert_ = 0;
  std::map<std::uint32_t, std::deque<double>> alert_times_;
  ClosedLoopResult out_;
};

}  // namespace

ClosedLoopResult run_closed_loop(const ScenarioConfig& cfg, const Trace& trace, const Detector& detector,
                                 const LoopConfig& loop) {
  validate(cfg);
  if (!detector.score) throw Error(Errc::InvalidConfig, "detector has no scoring function");
  Loop l(cfg, detector, loop);
  return l.run(trace);
}

ClosedLoopResult run_closed_loop(const ScenarioConfig& cfg, const Detector& detector, const LoopConfig& loop) {
  return run_closed_loop(cfg, generate_traffic(cfg), detector, loop);
}

}  // namespace sdnguard::netsim
