#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/labels.hpp"

namespace sdnguard::policy {

enum class NetworkAction { Drop, RedirectHoneypot, RateLimit, Prioritize };

std::string_view action_name(NetworkAction a) noexcept;
std::optional<NetworkAction> parse_action(std::string_view text);

// Attack label -> network action. Labels without an entry get default_action.
struct PolicyTable {
  std::map<Label, NetworkAction> actions;
  NetworkAction default_action = NetworkAction::RateLimit;

  NetworkAction lookup(Label l) const;
  // DDoS/DoS/Botnet -> Drop, Exploit/Web -> Redirect, Probe/BruteForce ->
  // RateLimit, Normal -> Prioritize.
  static PolicyTable defaults();
};

struct SeverityInputs {
  double src_bytes_per_sec = 0.0;    // B_src
  double total_bytes_per_sec = 1.0;  // B_total, > 0
  double confidence = 0.0;           // [0,1]
  double alerts_per_minute = 0.0;    // R_freq
  double entropy_bits = 0.0;         // H
};

struct SeverityWeights {
  double alpha = 0.2;  // bandwidth share
  double beta = 0.4;   // model confidence
  double gamma = 0.2;  // alert frequency
  double delta = 0.2;  // entropy

  SeverityWeights normalized() const;
};

// Bounded threat severity in [0,1]:
//   b = clamp(1 + log10(B_src/B_total)/3, 0, 1)   three decades of share
//   r = min(R_freq/10, 1)
//   h = H/16                                      16 bits = port space
//   T = clamp(alpha*b + beta*C + gamma*r + delta*h, 0, 1)
double severity_score(const SeverityInputs& in, const SeverityWeights& w);

enum class SeverityClass { Safe = 0, Suspicious = 1, Malicious = 2 };

std::string_view severity_name(SeverityClass s) noexcept;

struct SeverityThresholds {
  double high = 0.85;
  double medium = 0.60;
};

// >= high -> Malicious, >= medium -> Suspicious, else Safe. Requires
// 0 < medium < high <= 1 (InvalidThresholds otherwise).
SeverityClass classify_severity(double confidence, const SeverityThresholds& t);

struct QosInputs {
  double app_priority = 0.0;     // [0,1]
  double latency_ms = 0.0;       // >= 0
  double threat_severity = 0.0;  // [0,1]; or the confidence, see RiskTerm
  double bw_share = 0.0;         // bw_used / bw_total in [0,1]
};

struct QosWeights {
  double app = 0.4;
  double latency = 0.2;
  double risk = 0.3;
  double bandwidth = 0.1;

  QosWeights normalized() const;
};

// Which quantity fills the (1 - x) term of the QoS score.
enum class RiskTerm { Severity, Confidence };

inline constexpr double kLatencyScaleMs = 50.0;

// p = w_app*app + w_lat/(1 + l/50ms) + w_risk*(1 - T_sev) + w_bw*bw_share.
// Weights are normalized first; the result lies in [0,1].
double qos_score(const QosInputs& in, const QosWeights& w);

// VoIP 1.0, video 0.8, DNS/business 0.6, web 0.4, bulk and unknown 0.2,
// inferred from the transport port the way a controller would see it.
double app_priority(const FiveTuple& t) noexcept;
double app_priority(App app) noexcept;

enum class RuleAction { Drop, OutputHoneypot, Forward };
enum class Queue { High, Low };

std::string_view rule_action_name(RuleAction a) noexcept;
std::string_view queue_name(Queue q) noexcept;

inline constexpr double kRateLimitBps = 1'000'000.0;

struct FlowRule {
  std::string flow_id;
  FiveTuple match;  // matches both directions of the conversation
  RuleAction action = RuleAction::Forward;
  int priority = 0;
  std::optional<double> meter_bps;
  std::optional<Queue> queue;

  bool operator==(const FlowRule&) const = default;
};

bool is_consistent(SeverityClass s, NetworkAction a) noexcept;

// Translates a (severity, action) decision into a switch rule:
//   Malicious + Drop      -> drop, priority 100
//   Malicious + Redirect  -> output:honeypot, priority 90
//   Malicious + RateLimit -> forward, meter 1 Mbps, low queue, priority 60
//   Suspicious + any      -> forward, meter 1 Mbps, low queue, priority 60
//   Safe + Prioritize/RateLimit -> forward, high queue, priority 40
// Malicious + Prioritize and Safe + Drop/Redirect raise InconsistentDecision.
FlowRule compile_rule(std::string_view flow_id, SeverityClass severity, NetworkAction action);

struct PolicyConfig {
  PolicyTable table = PolicyTable::defaults();
  SeverityWeights severity_weights;
  SeverityThresholds thresholds;
  QosWeights qos_weights;
  RiskTerm risk_term = RiskTerm::Severity;
};

}  // namespace sdnguard::policy
