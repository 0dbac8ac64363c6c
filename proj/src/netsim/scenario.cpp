#include "sdnguard/netsim/scenario.hpp"

#include <fstream>

#include "sdnguard/error.hpp"

namespace sdnguard::netsim {

using nlohmann::json;

namespace {

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Protocol protocol_from(const json& j) {
  auto p = parse_protocol(j.get<std::string>());
  if (!p) throw Error(Errc::InvalidConfig, "unknown protocol " + j.dump());
  return *p;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (!(cfg.duration > 0.0)) bad("duration must be > 0");
  if (!(cfg.link_capacity_mbps > 0.0)) bad("link capacity must be > 0");
  for (const auto& a : cfg.apps) {
    if (a.flows < 0 || a.rate_kbps < 0.0 || a.packet_size == 0) bad("app traffic needs flows >= 0, rate >= 0, packet_size > 0");
    if (a.jitter < 0.0 || a.jitter > 0.5) bad("app jitter must lie in [0, 0.5]");
    if (a.start < 0.0) bad("app start must be >= 0");
  }
  const auto& at = cfg.attack;
  if (at.intensity_mbps < 0.0) bad("attack intensity must be >= 0");
  if (at.sources < 1 || at.packet_size == 0) bad("attack needs sources >= 1 and packet_size > 0");
  if (at.type == Label::Normal) bad("attack type cannot be Normal");
  if (at.start < 0.0) bad("attack start must be >= 0");
  const auto& s = cfg.switch_cfg;
  if (s.high_share < 0.0 || s.high_share > 1.0) bad("high_share must lie in [0,1]");
  if (s.buffer_bytes == 0 || s.buffer_packets == 0 || s.table_capacity == 0) bad("buffer and table capacity must be > 0");
  if (s.install_mean_ms < 0.0 || s.install_jitter < 0.0 || s.install_jitter > 1.0) bad("install latency out of range");
  if (!(s.meter_burst_bytes > 0.0)) bad("meter burst must be > 0");
  if (!(cfg.flow_table.idle_timeout > 0.0) || cfg.flow_table.active_timeout < 0.0) bad("flow timeouts out of range");
  if (cfg.detector.inference_ms < 0.0 || !(cfg.detector.tick_s > 0.0)) bad("detector timing out of range");
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  try {
    get_opt(j, "name", c.name);
    get_opt(j, "duration", c.duration);
    get_opt(j, "link_capacity_mbps", c.link_capacity_mbps);
    get_opt(j, "seed", c.seed);
    get_opt(j, "enforcement", c.enforcement);
    if (j.contains("apps")) {
      for (const auto& ja : j.at("apps")) {
        AppTraffic a;
        if (ja.contains("app")) {
          auto app = parse_app(ja.at("app").get<std::string>());
          if (!app) throw Error(Errc::InvalidConfig, "unknown app " + ja.at("app").dump());
          a.app = *app;
        }
        get_opt(ja, "flows", a.flows);
        get_opt(ja, "rate_kbps", a.rate_kbps);
        get_opt(ja, "packet_size", a.packet_size);
        if (ja.contains("protocol")) a.protocol = protocol_from(ja.at("protocol"));
        get_opt(ja, "dst_port", a.dst_port);
        get_opt(ja, "start", a.start);
        get_opt(ja, "stop", a.stop);
        get_opt(ja, "jitter", a.jitter);
        c.apps.push_back(a);
      }
    }
    if (j.contains("attack")) {
      const auto& ja = j.at("attack");
      if (ja.contains("type")) {
        auto l = parse_label(ja.at("type").get<std::string>());
        if (!l) throw Error(Errc::InvalidConfig, "unknown attack type " + ja.at("type").dump());
        c.attack.type = *l;
      }
      get_opt(ja, "start", c.attack.start);
      get_opt(ja, "stop", c.attack.stop);
      get_opt(ja, "intensity_mbps", c.attack.intensity_mbps);
      get_opt(ja, "sources", c.attack.sources);
      get_opt(ja, "packet_size", c.attack.packet_size);
      if (ja.contains("protocol")) c.attack.protocol = protocol_from(ja.at("protocol"));
      get_opt(ja, "dst_port", c.attack.dst_port);
    }
    if (j.contains("switch")) {
      const auto& js = j.at("switch");
      get_opt(js, "high_share", c.switch_cfg.high_share);
      get_opt(js, "buffer_bytes", c.switch_cfg.buffer_bytes);
      get_opt(js, "buffer_packets", c.switch_cfg.buffer_packets);
      get_opt(js, "table_capacity", c.switch_cfg.table_capacity);
      get_opt(js, "install_mean_ms", c.switch_cfg.install_mean_ms);
      get_opt(js, "install_jitter", c.switch_cfg.install_jitter);
      get_opt(js, "meter_burst_bytes", c.switch_cfg.meter_burst_bytes);
    }
    if (j.contains("flow_table")) {
      get_opt(j.at("flow_table"), "idle_timeout", c.flow_table.idle_timeout);
      get_opt(j.at("flow_table"), "active_timeout", c.flow_table.active_timeout);
    }
    if (j.contains("detector")) {
      get_opt(j.at("detector"), "inference_ms", c.detector.inference_ms);
      get_opt(j.at("detector"), "tick_s", c.detector.tick_s);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("scenario: ") + e.what());
  }
  validate(c);
  return c;
}

json scenario_to_json(const ScenarioConfig& c) {
  json apps = json::array();
  for (const auto& a : c.apps) {
    apps.push_back({{"app", app_name(a.app)},
                    {"flows", a.flows},
                    {"rate_kbps", a.rate_kbps},
                    {"packet_size", a.packet_size},
                    {"protocol", protocol_name(a.protocol)},
                    {"dst_port", a.dst_port},
                    {"start", a.start},
                    {"stop", a.stop},
                    {"jitter", a.jitter}});
  }
  return {
      {"name", c.name},
      {"duration", c.duration},
      {"link_capacity_mbps", c.link_capacity_mbps},
      {"seed", c.seed},
      {"enforcement", c.enforcement},
      {"apps", apps},
      {"attack",
       {{"type", label_name(c.attack.type)},
        {"start", c.attack.start},
        {"stop", c.attack.stop},
        {"intensity_mbps", c.attack.intensity_mbps},
        {"sources", c.attack.sources},
        {"packet_size", c.attack.packet_size},
        {"protocol", protocol_name(c.attack.protocol)},
        {"dst_port", c.attack.dst_port}}},
      {"switch",
       {{"high_share", c.switch_cfg.high_share},
        {"buffer_bytes", c.switch_cfg.buffer_bytes},
        {"buffer_packets", c.switch_cfg.buffer_packets},
        {"table_capacity", c.switch_cfg.table_capacity},
        {"install_mean_ms", c.switch_cfg.install_mean_ms},
        {"install_jitter", c.switch_cfg.install_jitter},
        {"meter_burst_bytes", c.switch_cfg.meter_burst_bytes}}},
      {"flow_table", {{"idle_timeout", c.flow_table.idle_timeout}, {"active_timeout", c.flow_table.active_timeout}}},
      {"detector", {{"inference_ms", c.detector.inference_ms}, {"tick_s", c.detector.tick_s}}},
  };
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open scenario " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path + ": " + e.what());
  }
  return scenario_from_json(j);
}

ScenarioConfig voip_ddos_scenario(std::uint64_t seed, bool enforcement) {
  ScenarioConfig c;
  c.name = "voip-ddos";
  c.duration = 20.0;
  c.link_capacity_mbps = 5.0;
  c.seed = seed;
  c.enforcement = enforcement;
  AppTraffic voip;
  voip.app = App::VoIP;
  voip.flows = 10;
  voip.rate_kbps = 100.0;
  voip.packet_size = 200;
  voip.protocol = Protocol::UDP;
  voip.dst_port = 5060;
  c.apps.push_back(voip);
  c.attack.type = Label::DDoS;
  c.attack.start = 2.0;
  c.attack.intensity_mbps = 10.0 * c.link_capacity_mbps;
  c.attack.sources = 20;
  c.attack.packet_size = 1000;
  return c;
}

}  // namespace sdnguard::netsim
