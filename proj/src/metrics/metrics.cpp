#include "sdnguard/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "sdnguard/error.hpp"

namespace sdnguard::metrics {

void ConfusionMatrix::add(Label truth, Label predicted) noexcept {
  const bool t = is_attack(truth);
  const bool p = is_attack(predicted);
  if (t && p) ++tp;
  else if (!t && !p) ++tn;
  else if (p) ++fp;
  else ++fn;
}

std::uint64_t MultiClassConfusion::total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& row : counts) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

ConfusionMatrix MultiClassConfusion::binary() const noexcept {
  ConfusionMatrix cm;
  for (Label t : kAllLabels) {
    for (Label p : kAllLabels) {
      const std::uint64_t c = counts[index_of(t)][index_of(p)];
      const bool ta = is_attack(t);
      const bool pa = is_attack(p);
      (ta ? (pa ? cm.tp : cm.fn) : (pa ? cm.fp : cm.tn)) += c;
    }
  }
  return cm;
}

double accuracy_pct(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(Errc::InsufficientData, "empty confusion matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total()) * 100.0;
}

ConfusionSummary confusion_metrics(const ConfusionMatrix& cm) {
  const double acc = accuracy_pct(cm);
  if (cm.fp + cm.tn == 0) throw Error(Errc::UndefinedFPR, "no negative samples (FP+TN = 0)");
  return {acc, static_cast<double>(cm.fp) / static_cast<double>(cm.fp + cm.tn)};
}

StatBlock StatBlock::of(std::span<const double> xs) {
  StatBlock s;
  if (xs.empty()) return s;
  s.count = xs.size();
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

LatencyMetrics latency_metrics(const netsim::EventLog& log) {
  LatencyMetrics m;
  std::unordered_map<std::uint64_t, const netsim::AlertRaised*> alerts;
  std::unordered_map<std::string, double> submitted;
  for (const auto& e : log.events()) {
    if (const auto* a = std::get_if<netsim::AlertRaised>(&e)) {
      alerts[a->alert_id] = a;
    } else if (const auto* r = std::get_if<netsim::RuleInstalled>(&e)) {
      auto it = alerts.find(r->alert_id);
      if (it == alerts.end() || it->second->alert.flow_id != r->rule.flow_id) {
        throw Error(Errc::OrphanEvent, "RuleInstalled for alert " + std::to_string(r->alert_id) +
                                           " without a matching AlertRaised");
      }
      m.alert_response_ms.push_back((r->applied_ts - it->second->ts) * 1000.0);
      m.reconfig_ms.push_back((r->applied_ts - r->ts) * 1000.0);
    } else if (const auto* s = std::get_if<netsim::TxnSubmitted>(&e)) {
      submitted.emplace(s->txn_id, s->ts);
    } else if (const auto* c = std::get_if<netsim::TxnCommitted>(&e)) {
      auto it = submitted.find(c->txn_id);
      if (it == submitted.end()) throw Error(Errc::OrphanEvent, "TxnCommitted " + c->txn_id + " never submitted");
      m.txn_ms.push_back((c->ts - it->second) * 1000.0);
    }
  }
  m.alert_response = StatBlock::of(m.alert_response_ms);
  m.reconfig = StatBlock::of(m.reconfig_ms);
  m.txn = StatBlock::of(m.txn_ms);
  return m;
}

double delivered_bytes(const netsim::EventLog& log, App app, const std::optional<Window>& window) {
  double total = 0.0;
  for (const auto& e : log.events()) {
    const auto* d = std::get_if<netsim::PacketDelivered>(&e);
    if (!d || d->app != app) continue;
    if (window && (d->ts < window->start || d->ts >= window->end)) continue;
    total += d->bytes;
  }
  return total;
}

double qos_retention(const netsim::EventLog& baseline, const netsim::EventLog& attack, App app,
                     const std::optional<Window>& window) {
  const double base = delivered_bytes(baseline, app, window);
  if (base <= 0.0) throw Error(Errc::ZeroBaseline, std::string("no baseline traffic for ") + std::string(app_name(app)));
  return delivered_bytes(attack, app, window) / base * 100.0;
}

double drift_resilience(std::span<const double> segment_accuracy) {
  if (segment_accuracy.empty()) throw Error(Errc::InsufficientData, "no segments");
  if (!(segment_accuracy.front() > 0.0)) throw Error(Errc::InvalidInput, "first segment accuracy is zero");
  const double lo = *std::min_element(segment_accuracy.begin(), segment_accuracy.end());
  return 100.0 * lo / segment_accuracy.front();
}

ThroughputDrift throughput_and_drift(std::span<const PredictionResult> results, double wallclock_s, int segments) {
  if (segments < 1) throw Error(Errc::InvalidInput, "segments must be >= 1");
  if (!(wallclock_s > 0.0)) throw Error(Errc::InvalidInput, "wall-clock time must be > 0");
  const std::size_t n = results.size();
  const auto k = static_cast<std::size_t>(segments);
  if (n < 10 * k) {
    throw Error(Errc::TooFewFlows, std::to_string(n) + " results for " + std::to_string(segments) + " segments");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (results[i].ts < results[i - 1].ts) throw Error(Errc::InvalidInput, "results are not time-ordered");
  }
  ThroughputDrift out;
  out.flows_per_sec = static_cast<double>(n) / wallclock_s;
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t lo = s * n / k;
    const std::size_t hi = (s + 1) * n / k;
    std::size_t correct = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      correct += is_attack(results[i].truth) == is_attack(results[i].predicted) ? 1 : 0;
    }
    out.segment_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(hi - lo));
  }
  out.drift_resilience_pct = drift_resilience(out.segment_accuracy);
  return out;
}

}  // namespace sdnguard::metrics
