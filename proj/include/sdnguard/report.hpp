#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdnguard/ledger/latency.hpp"
#include "sdnguard/metrics.hpp"

namespace sdnguard::metrics {

struct MetricsReport {
  std::string config_hash;
  std::string source;  // producing subcommand

  std::optional<ConfusionMatrix> confusion;
  std::optional<double> accuracy_pct;
  std::optional<double> fpr_pct;

  StatBlock alert_latency_ms;
  StatBlock reconfig_ms;
  StatBlock txn_ms;
  std::vector<double> alert_latency_series;
  std::vector<double> reconfig_series;
  std::vector<double> txn_series;
  std::vector<ledger::LatencyRow> txn_latency_table;

  std::map<std::string, double> qos_retention_pct;  // app name -> percent
  std::optional<Window> qos_window;

  std::optional<double> throughput_flows_per_sec;
  std::optional<double> drift_resilience_pct;
  std::vector<double> segment_accuracy;

  std::map<std::string, double> counters;

  bool operator==(const MetricsReport&) const;
};

// Writes report.json plus alert_latency.csv, reconfig.csv, txn_latency.csv,
// txn_latency_table.csv, qos_retention.csv and drift_segments.csv into `dir`
// (created if needed). Every file carries config_hash. Throws IoFailure.
void emit_report(const MetricsReport& report, const std::string& dir);

// Reads report.json back.
MetricsReport load_report(const std::string& dir);

}  // namespace sdnguard::metrics
