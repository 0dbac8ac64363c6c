#include "sdnguard/netsim/event_log.hpp"

#include <istream>
#include <json.hpp>

#include "sdnguard/error.hpp"

namespace sdnguard::netsim {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json rule_json(const policy::FlowRule& r) {
  json j{{"flow_id", r.flow_id},
         {"action", policy::rule_action_name(r.action)},
         {"priority", r.priority}};
  j["meter_bps"] = r.meter_bps ? json(*r.meter_bps) : json(nullptr);
  j["queue"] = r.queue ? json(policy::queue_name(*r.queue)) : json(nullptr);
  return j;
}

policy::FlowRule rule_from(const json& j) {
  policy::FlowRule r;
  r.flow_id = j.at("flow_id").get<std::string>();
  auto t = parse_flow_id(r.flow_id);
  if (!t) throw Error(Errc::InvalidInput, "bad flow id in event log: " + r.flow_id);
  r.match = *t;
  const auto action = j.at("action").get<std::string>();
  if (action == "drop") r.action = policy::RuleAction::Drop;
  else if (action == "output:honeypot") r.action = policy::RuleAction::OutputHoneypot;
  else r.action = policy::RuleAction::Forward;
  r.priority = j.at("priority").get<int>();
  if (!j.at("meter_bps").is_null()) r.meter_bps = j.at("meter_bps").get<double>();
  if (!j.at("queue").is_null()) {
    r.queue = j.at("queue").get<std::string>() == "high" ? policy::Queue::High : policy::Queue::Low;
  }
  return r;
}

App app_from(const json& j) { return parse_app(j.at("app").get<std::string>()).value_or(App::Unknown); }

}  // namespace

double event_ts(const Event& e) noexcept {
  return std::visit([](const auto& v) { return v.ts; }, e);
}

std::string_view event_type(const Event& e) noexcept {
  return std::visit(Overloaded{
                        [](const PacketDelivered&) { return std::string_view("PacketDelivered"); },
                        [](const PacketDropped&) { return std::string_view("PacketDropped"); },
                        [](const PacketRedirected&) { return std::string_view("PacketRedirected"); },
                        [](const AlertRaised&) { return std::string_view("AlertRaised"); },
                        [](const RuleInstalled&) { return std::string_view("RuleInstalled"); },
                        [](const TxnSubmitted&) { return std::string_view("TxnSubmitted"); },
                        [](const TxnCommitted&) { return std::string_view("TxnCommitted"); },
                    },
                    e);
}

void EventLog::push(Event e) {
  if (!events_.empty() && event_ts(e) < event_ts(events_.back())) {
    throw Error(Errc::InvalidInput, std::string(event_type(e)) + " at " + std::to_string(event_ts(e)) +
                                        " precedes the previous event");
  }
  events_.push_back(std::move(e));
}

void EventLog::write_jsonl(std::ostream& out, std::string_view config_hash) const {
  if (!config_hash.empty()) out << json{{"type", "RunHeader"}, {"config_hash", config_hash}}.dump() << '\n';
  for (const auto& e : events_) {
    json j{{"type", event_type(e)}, {"ts", event_ts(e)}};
    std::visit(Overloaded{
                   [&](const PacketDelivered& v) {
                     j["flow_id"] = v.flow_id;
                     j["bytes"] = v.bytes;
                     j["app"] = app_name(v.app);
                     j["queue"] = policy::queue_name(v.queue);
                   },
                   [&](const PacketDropped& v) {
                     j["flow_id"] = v.flow_id;
                     j["bytes"] = v.bytes;
                     j["app"] = app_name(v.app);
                     j["reason"] = v.reason;
                   },
                   [&](const PacketRedirected& v) {
                     j["flow_id"] = v.flow_id;
                     j["bytes"] = v.bytes;
                     j["app"] = app_name(v.app);
                   },
                   [&](const AlertRaised& v) {
                     j["alert_id"] = v.alert_id;
                     j["flow_id"] = v.alert.flow_id;
                     j["label"] = label_name(v.alert.label);
                     j["confidence"] = v.alert.confidence;
                     j["alert_ts"] = v.alert.timestamp;
                   },
                   [&](const RuleInstalled& v) {
                     j["alert_id"] = v.alert_id;
                     j["rule"] = rule_json(v.rule);
                     j["latency"] = v.latency;
                     j["applied_ts"] = v.applied_ts;
                   },
                   [&](const TxnSubmitted& v) {
                     j["txn_id"] = v.txn_id;
                     j["flow_id"] = v.flow_id;
                   },
                   [&](const TxnCommitted& v) {
                     j["txn_id"] = v.txn_id;
                     j["block"] = v.block;
                   },
               },
               e);
    out << j.dump() << '\n';
  }
}

EventLog read_event_log_jsonl(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "RunHeader") continue;
      const double ts = j.at("ts").get<double>();
      if (type == "PacketDelivered") {
        log.push(PacketDelivered{ts, j.at("flow_id").get<std::string>(), j.at("bytes").get<std::uint32_t>(),
                                 app_from(j),
                                 j.at("queue").get<std::string>() == "high" ? policy::Queue::High
                                                                            : policy::Queue::Low});
      } else if (type == "PacketDropped") {
        log.push(PacketDropped{ts, j.at("flow_id").get<std::string>(), j.at("bytes").get<std::uint32_t>(),
                               app_from(j), j.at("reason").get<std::string>()});
      } else if (type == "PacketRedirected") {
        log.push(PacketRedirected{ts, j.at("flow_id").get<std::string>(), j.at("bytes").get<std::uint32_t>(),
                                  app_from(j)});
      } else if (type == "AlertRaised") {
        auto label = parse_label(j.at("label").get<std::string>());
        if (!label) throw Error(Errc::InvalidInput, "unknown label");
        log.push(AlertRaised{ts, j.at("alert_id").get<std::uint64_t>(),
                             {j.at("flow_id").get<std::string>(), *label, j.at("confidence").get<double>(),
                              j.at("alert_ts").get<double>()}});
      } else if (type == "RuleInstalled") {
        log.push(RuleInstalled{ts, j.at("alert_id").get<std::uint64_t>(), rule_from(j.at("rule")),
                               j.at("latency").get<double>(), j.at("applied_ts").get<double>()});
      } else if (type == "TxnSubmitted") {
        log.push(TxnSubmitted{ts, j.at("txn_id").get<std::string>(), j.at("flow_id").get<std::string>()});
      } else if (type == "TxnCommitted") {
        log.push(TxnCommitted{ts, j.at("txn_id").get<std::string>(), j.at("block").get<std::uint64_t>()});
      } else {
        throw Error(Errc::InvalidInput, "unknown event type " + type);
      }
    } catch (const json::exception& e) {
      throw Error(Errc::InvalidInput, "event log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

}  // namespace sdnguard::netsim
