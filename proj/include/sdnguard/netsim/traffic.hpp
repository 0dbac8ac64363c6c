#pragma once

#include <string>
#include <vector>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/netsim/scenario.hpp"

namespace sdnguard::netsim {

struct Trace {
  std::vector<PacketRecord> packets;  // time-ordered, labelled with ground truth
  std::vector<std::string> warnings;  // e.g. "OverCapacityConfig: ..."
};

// Each benign flow and each attack source draws from its own seeded stream,
// so adding or removing the attack leaves the benign packets untouched.
Trace generate_traffic(const ScenarioConfig& cfg);

// Stand-alone labelled flows with class-typical shapes (packet counts,
// sizes, pacing, port spread, flags), for benchmarks and training data.
// Each flow covers [start, start + duration) with start increasing in the
// output order. Normal makes up about half of the flows.
std::vector<FlowState> synthetic_flows(std::size_t n, std::uint64_t seed);

// Offered load of the configured mix in Mbps (benign plus attack).
double offered_load_mbps(const ScenarioConfig& cfg);

}  // namespace sdnguard::netsim
