#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "sdnguard/flow_engine.hpp"
#include "sdnguard/labels.hpp"

namespace sdnguard::netsim {

// `flows` parallel constant-bit-rate flows of one application class.
struct AppTraffic {
  App app = App::VoIP;
  int flows = 1;
  double rate_kbps = 64.0;  // per flow
  std::uint32_t packet_size = 200;
  Protocol protocol = Protocol::UDP;
  std::uint16_t dst_port = 5060;
  double start = 0.0;
  double stop = -1.0;   // < 0: until the end of the run
  double jitter = 0.1;  // per-packet delay, fraction of the packet interval, [0, 0.5]
};

struct AttackSpec {
  // DDoS/DoS/Botnet/BruteForce/Web/Exploit: one fixed-port flow per source.
  // Probe: each source sweeps destination ports.
  Label type = Label::DDoS;
  double start = 2.0;
  double stop = -1.0;
  double intensity_mbps = 0.0;  // aggregate over all sources
  int sources = 20;
  std::uint32_t packet_size = 1000;
  Protocol protocol = Protocol::TCP;
  std::uint16_t dst_port = 80;
};

struct SwitchConfig {
  double high_share = 0.5;  // token rate of the high queue, fraction of link capacity
  std::size_t buffer_bytes = 100'000;
  // Slot limit; a packet is admitted only if both limits hold.
  std::size_t buffer_packets = 100;
  std::size_t table_capacity = 4096;
  double install_mean_ms = 24.8;
  double install_jitter = 0.3;  // uniform +-fraction of the mean
  double meter_burst_bytes = 10'000.0;
};

struct DetectorTiming {
  double inference_ms = 1.0;  // charged per scored flow
  double tick_s = 0.05;       // flow-table expiry and ledger commit period
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 20.0;
  double link_capacity_mbps = 5.0;
  std::uint64_t seed = 1;
  bool enforcement = true;
  std::vector<AppTraffic> apps;
  AttackSpec attack;
  SwitchConfig switch_cfg;
  FlowTableConfig flow_table{5.0, 0.5};
  DetectorTiming detector;
};

// Throws InvalidConfig on any out-of-range field.
void validate(const ScenarioConfig& cfg);

// JSON object with the member names above; absent members keep defaults.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::string& path);

// VoIP 10 x 100 kbps (200-byte packets) on a 5 Mbps link, DDoS from 20
// sources at 10x link capacity starting at 2 s, 20 s run.
ScenarioConfig voip_ddos_scenario(std::uint64_t seed = 1, bool enforcement = true);

}  // namespace sdnguard::netsim
