#include "sdnguard/policy.hpp"

#include <algorithm>
#include <cmath>

#include "sdnguard/error.hpp"

namespace sdnguard::policy {

std::string_view action_name(NetworkAction a) noexcept {
  switch (a) {
    case NetworkAction::Drop: return "Drop";
    case NetworkAction::RedirectHoneypot: return "RedirectHoneypot";
    case NetworkAction::RateLimit: return "RateLimit";
    case NetworkAction::Prioritize: return "Prioritize";
  }
  return "RateLimit";
}

std::optional<NetworkAction> parse_action(std::string_view text) {
  for (auto a : {NetworkAction::Drop, NetworkAction::RedirectHoneypot, NetworkAction::RateLimit,
                 NetworkAction::Prioritize}) {
    if (action_name(a) == text) return a;
  }
  if (text == "Redirect") return NetworkAction::RedirectHoneypot;
  return std::nullopt;
}

NetworkAction PolicyTable::lookup(Label l) const {
  auto it = actions.find(l);
  return it == actions.end() ? default_action : it->second;
}

PolicyTable PolicyTable::defaults() {
  PolicyTable t;
  t.actions = {
      {Label::DDoS, NetworkAction::Drop},
      {Label::DoS, NetworkAction::Drop},
      {Label::Botnet, NetworkAction::Drop},
      {Label::Exploit, NetworkAction::RedirectHoneypot},
      {Label::Web, NetworkAction::RedirectHoneypot},
      {Label::Probe, NetworkAction::RateLimit},
      {Label::BruteForce, NetworkAction::RateLimit},
      {Label::Normal, NetworkAction::Prioritize},
  };
  return t;
}

SeverityWeights SeverityWeights::normalized() const {
  const double s = alpha + beta + gamma + delta;
  if (alpha < 0 || beta < 0 || gamma < 0 || delta < 0 || !(s > 0.0)) {
    throw Error(Errc::InvalidConfig, "severity weights must be >= 0 with a positive sum");
  }
  return {alpha / s, beta / s, gamma / s, delta / s};
}

double severity_score(const SeverityInputs& in, const SeverityWeights& weights) {
  if (!(in.total_bytes_per_sec > 0.0)) throw Error(Errc::InvalidInput, "B_total must be > 0");
  if (in.src_bytes_per_sec < 0.0 || in.alerts_per_minute < 0.0 || in.entropy_bits < 0.0) {
    throw Error(Errc::InvalidInput, "severity inputs must be non-negative");
  }
  const SeverityWeights w = weights.normalized();
  const double ratio = std::min(in.src_bytes_per_sec / in.total_bytes_per_sec, 1.0);
  const double b = ratio > 0.0 ? std::clamp(1.0 + std::log10(ratio) / 3.0, 0.0, 1.0) : 0.0;
  const double c = std::clamp(in.confidence, 0.0, 1.0);
  const double r = std::min(in.alerts_per_minute / 10.0, 1.0);
  const double h = std::min(in.entropy_bits / 16.0, 1.0);
  return std::clamp(w.alpha * b + w.beta * c + w.gamma * r + w.delta * h, 0.0, 1.0);
}

std::string_view severity_name(SeverityClass s) noexcept {
  switch (s) {
    case SeverityClass::Safe: return "Safe";
    case SeverityClass::Suspicious: return "Suspicious";
    case SeverityClass::Malicious: return "Malicious";
  }
  return "Safe";
}

SeverityClass classify_severity(double confidence, const SeverityThresholds& t) {
  if (!(t.medium > 0.0 && t.medium < t.high && t.high <= 1.0)) {
    throw Error(Errc::InvalidThresholds, "need 0 < medium < high <= 1");
  }
  if (confidence >= t.high) return SeverityClass::Malicious;
  if (confidence >= t.medium) return SeverityClass::Suspicious;
  return SeverityClass::Safe;
}

QosWeights QosWeights::normalized() const {
  const double s = app + latency + risk + bandwidth;
  if (app < 0 || latency < 0 || risk < 0 || bandwidth < 0 || !(s > 0.0)) {
    throw Error(Errc::InvalidConfig, "QoS weights must be >= 0 with a positive sum");
  }
  return {app / s, latency / s, risk / s, bandwidth / s};
}

double qos_score(const QosInputs& in, const QosWeights& weights) {
  const QosWeights w = weights.normalized();
  const double app = std::clamp(in.app_priority, 0.0, 1.0);
  const double lat = 1.0 / (1.0 + std::max(in.latency_ms, 0.0) / kLatencyScaleMs);
  const double risk = 1.0 - std::clamp(in.threat_severity, 0.0, 1.0);
  const double bw = std::clamp(in.bw_share, 0.0, 1.0);
  return std::clamp(w.app * app + w.latency * lat + w.risk * risk + w.bandwidth * bw, 0.0, 1.0);
}

double app_priority(App app) noexcept {
  switch (app) {
    case App::VoIP: return 1.0;
    case App::Video: return 0.8;
    case App::DNS: return 0.6;
    case App::Web: return 0.4;
    case App::Bulk: return 0.2;
    case App::Attack:
    case App::Unknown: return 0.2;
  }
  return 0.2;
}

double app_priority(const FiveTuple& t) noexcept {
  auto classify = [&](std::uint16_t port) -> std::optional<App> {
    if (port == 5060 || port == 5061 || (t.protocol == Protocol::UDP && port >= 16384 && port <= 32767)) {
      return App::VoIP;
    }
    if (port == 554 || port == 1935 || (port >= 3478 && port <= 3481)) return App::Video;
    if (port == 53 || port == 389 || port == 445 || port == 3389) return App::DNS;
    if (port == 80 || port == 443 || port == 8080) return App::Web;
    return std::nullopt;
  };
  auto app = classify(t.dst_port);
  if (!app) app = classify(t.src_port);
  return app_priority(app.value_or(App::Bulk));
}

std::string_view rule_action_name(RuleAction a) noexcept {
  switch (a) {
    case RuleAction::Drop: return "drop";
    case RuleAction::OutputHoneypot: return "output:honeypot";
    case RuleAction::Forward: return "forward";
  }
  return "forward";
}

std::string_view queue_name(Queue q) noexcept { return q == Queue::High ? "high" : "low"; }

bool is_consistent(SeverityClass s, NetworkAction a) noexcept {
  switch (s) {
    case SeverityClass::Malicious: return a != NetworkAction::Prioritize;
    case SeverityClass::Suspicious: return true;
    case SeverityClass::Safe:
      return a == NetworkAction::Prioritize || a == NetworkAction::RateLimit;
  }
  return false;
}

FlowRule compile_rule(std::string_view flow_id, SeverityClass severity, NetworkAction action) {
  if (!is_consistent(severity, action)) {
    throw Error(Errc::InconsistentDecision, std::string(severity_name(severity)) + " flow mapped to " +
                                                std::string(action_name(action)));
  }
  auto tuple = parse_flow_id(flow_id);
  if (!tuple) throw Error(Errc::InvalidInput, "cannot extract match fields from '" + std::string(flow_id) + "'");
  FlowRule rule;
  rule.flow_id = std::string(flow_id);
  rule.match = *tuple;
  const bool rate_limited = severity == SeverityClass::Suspicious ||
                            (severity == SeverityClass::Malicious && action == NetworkAction::RateLimit);
  if (severity == SeverityClass::Malicious && action == NetworkAction::Drop) {
    rule.action = RuleAction::Drop;
    rule.priority = 100;
  } else if (severity == SeverityClass::Malicious && action == NetworkAction::RedirectHoneypot) {
    rule.action = RuleAction::OutputHoneypot;
    rule.priority = 90;
  } else if (rate_limited) {
    rule.action = RuleAction::Forward;
    rule.meter_bps = kRateLimitBps;
    rule.queue = Queue::Low;
    rule.priority = 60;
  } else {
    rule.action = RuleAction::Forward;
    rule.queue = Queue::High;
    rule.priority = 40;
  }
  return rule;
}

}  // namespace sdnguard::policy
