#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/ids/ensemble.hpp"
#include "sdnguard/policy.hpp"

namespace sdnguard::netsim {

// Packet events name the directional flow the packet belongs to.
struct PacketDelivered {
  double ts = 0.0;  // departure from the egress link
  std::string flow_id;
  std::uint32_t bytes = 0;
  App app = App::Unknown;
  policy::Queue queue = policy::Queue::Low;
};

struct PacketDropped {
  double ts = 0.0;
  std::string flow_id;
  std::uint32_t bytes = 0;
  App app = App::Unknown;
  std::string reason;  // "rule", "meter" or "overflow"
};

// Sent to the honeypot sink: neither delivered to the victim nor dropped.
struct PacketRedirected {
  double ts = 0.0;
  std::string flow_id;
  std::uint32_t bytes = 0;
  App app = App::Unknown;
};

struct AlertRaised {
  double ts = 0.0;
  std::uint64_t alert_id = 0;
  ids::Alert alert;
};

struct RuleInstalled {
  double ts = 0.0;  // install request
  std::uint64_t alert_id = 0;
  policy::FlowRule rule;
  double latency = 0.0;  // seconds
  double applied_ts = 0.0;
};

struct TxnSubmitted {
  double ts = 0.0;
  std::string txn_id;
  std::string flow_id;
};

struct TxnCommitted {
  double ts = 0.0;
  std::string txn_id;
  std::uint64_t block = 0;
};

using Event = std::variant<PacketDelivered, PacketDropped, PacketRedirected, AlertRaised, RuleInstalled,
                           TxnSubmitted, TxnCommitted>;

double event_ts(const Event& e) noexcept;
std::string_view event_type(const Event& e) noexcept;

// Append-only, time-ordered record of a simulation run.
class EventLog {
 public:
  // Throws InvalidInput when e is older than the last event.
  void push(Event e);

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  template <class T>
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& e : events_) n += std::holds_alternative<T>(e) ? 1 : 0;
    return n;
  }

  // One JSON object per line with a "type" member; reals use the shortest
  // round-trip form. A non-empty config_hash adds a leading
  // {"type": "RunHeader", "config_hash": ...} line.
  void write_jsonl(std::ostream& out, std::string_view config_hash = {}) const;

 private:
  std::vector<Event> events_;
};

// Skips RunHeader lines.
EventLog read_event_log_jsonl(std::istream& in);

}  // namespace sdnguard::netsim
