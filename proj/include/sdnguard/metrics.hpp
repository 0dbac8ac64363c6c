#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/labels.hpp"
#include "sdnguard/netsim/event_log.hpp"

namespace sdnguard::metrics {

// Binary view: every non-Normal label counts as positive.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  void add(Label truth, Label predicted) noexcept;
  std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// counts[truth][predicted].
struct MultiClassConfusion {
  std::array<std::array<std::uint64_t, kNumLabels>, kNumLabels> counts{};

  void add(Label truth, Label predicted) noexcept {
    ++counts[index_of(truth)][index_of(predicted)];
  }
  std::uint64_t total() const noexcept;
  ConfusionMatrix binary() const noexcept;
};

struct ConfusionSummary {
  double accuracy_pct = 0.0;  // (TP+TN)/total * 100
  double fpr = 0.0;           // FP/(FP+TN), a fraction
};

// Throws InsufficientData on an empty matrix and UndefinedFPR when FP+TN = 0.
ConfusionSummary confusion_metrics(const ConfusionMatrix& cm);
// Accuracy alone; InsufficientData on an empty matrix.
double accuracy_pct(const ConfusionMatrix& cm);

struct StatBlock {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;

  static StatBlock of(std::span<const double> xs);
  bool operator==(const StatBlock&) const = default;
};

struct LatencyMetrics {
  std::vector<double> alert_response_ms;  // rule applied - alert raised, per installed rule
  std::vector<double> reconfig_ms;        // rule applied - install requested
  std::vector<double> txn_ms;             // committed - submitted, per transaction
  StatBlock alert_response;
  StatBlock reconfig;
  StatBlock txn;
};

// Throws OrphanEvent when a RuleInstalled names an alert that was never
// raised (or was raised for another flow), or a commit has no submission.
LatencyMetrics latency_metrics(const netsim::EventLog& log);

struct Window {
  double start = 0.0;
  double end = 0.0;  // exclusive
};

// Bytes of `app` delivered to the victim inside the window.
double delivered_bytes(const netsim::EventLog& log, App app, const std::optional<Window>& window = std::nullopt);

// 100 * delivered(attack) / delivered(baseline) for `app` over the same window
// (whole log when absent). Throws ZeroBaseline when the baseline is zero.
double qos_retention(const netsim::EventLog& baseline, const netsim::EventLog& attack, App app,
                     const std::optional<Window>& window = std::nullopt);

struct PredictionResult {
  double ts = 0.0;
  Label truth = Label::Normal;
  Label predicted = Label::Normal;
};

struct ThroughputDrift {
  double flows_per_sec = 0.0;
  double drift_resilience_pct = 0.0;
  std::vector<double> segment_accuracy;  // fractions, oldest first
};

// Segment s holds results [s*n/k, (s+1)*n/k). Drift resilience is
// 100 * min segment accuracy / first segment accuracy (binary accuracy).
// Throws TooFewFlows when n < 10*k, InvalidInput on wallclock <= 0,
// unordered timestamps, or a first segment with zero accuracy.
ThroughputDrift throughput_and_drift(std::span<const PredictionResult> results, double wallclock_s,
                                     int segments = 4);

// Drift resilience from given segment accuracies.
double drift_resilience(std::span<const double> segment_accuracy);

}  // namespace sdnguard::metrics
