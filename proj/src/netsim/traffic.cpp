#include "sdnguard/netsim/traffic.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "sdnguard/rng.hpp"

namespace sdnguard::netsim {

namespace {

constexpr std::uint64_t kBenignStreams = 1'000;
constexpr std::uint64_t kAttackStreams = 1'000'000;

std::uint32_t ipv4(unsigned a, unsigned b, unsigned c, unsigned d) {
  return (a & 0xff) << 24 | (b & 0xff) << 16 | (c & 0xff) << 8 | (d & 0xff);
}

// Clients live in 10.0.<1+n/250>.<1+n%250>; servers are 10.0.0.<2+app slot>.
std::uint32_t client_ip(unsigned n) { return ipv4(10, 0, 1 + n / 250, 1 + n % 250); }
std::uint32_t attacker_ip(unsigned n) { return ipv4(10, 128 + (n / 62500) % 64, (n / 250) % 250, 1 + n % 250); }

struct Tagged {
  PacketRecord p;
  std::uint64_t stream;
  std::uint64_t seq;
};

std::uint8_t benign_flags(Protocol proto) {
  return proto == Protocol::TCP ? static_cast<std::uint8_t>(tcp_flag::ACK | tcp_flag::PSH) : 0;
}

void constant_rate(std::vector<Tagged>& out, PacketRecord tmpl, double rate_bps, double start,
                   double stop, double jitter, Rng& rng, std::uint64_t stream,
                   std::uint16_t port_sweep_base = 0) {
  if (rate_bps <= 0.0 || stop <= start) return;
  const double interval = tmpl.length * 8.0 / rate_bps;
  const double phase = rng.uniform() * interval;
  std::uint64_t seq = 0;
  for (double base = start + phase; base < stop; base = start + phase + static_cast<double>(++seq) * interval) {
    const double ts = base + jitter * interval * rng.uniform();
    if (ts >= stop) continue;
    PacketRecord p = tmpl;
    p.ts = ts;
    if (port_sweep_base != 0) p.dst_port = static_cast<std::uint16_t>(port_sweep_base + seq % 1024);
    out.push_back({p, stream, seq});
  }
}

}  // namespace

double offered_load_mbps(const ScenarioConfig& cfg) {
  double total = cfg.attack.intensity_mbps;
  for (const auto& a : cfg.apps) total += a.flows * a.rate_kbps / 1000.0;
  return total;
}

Trace generate_traffic(const ScenarioConfig& cfg) {
  validate(cfg);
  Trace trace;
  const double load = offered_load_mbps(cfg);
  if (load > 3.0 * cfg.link_capacity_mbps) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "OverCapacityConfig: offered %.3f Mbps exceeds 3x link capacity (%.3f Mbps)",
                  load, cfg.link_capacity_mbps);
    trace.warnings.emplace_back(buf);
  }

  std::vector<Tagged> all;
  unsigned client = 0;
  for (std::size_t slot = 0; slot < cfg.apps.size(); ++slot) {
    const AppTraffic& a = cfg.apps[slot];
    const double stop = a.stop < 0.0 ? cfg.duration : std::min(a.stop, cfg.duration);
    for (int f = 0; f < a.flows; ++f, ++client) {
      const std::uint64_t stream = kBenignStreams * (slot + 1) + static_cast<std::uint64_t>(f);
      Rng rng(cfg.seed, stream);
      PacketRecord tmpl;
      tmpl.src_ip = client_ip(client);
      tmpl.dst_ip = ipv4(10, 0, 0, 2 + static_cast<unsigned>(slot));
      tmpl.src_port = static_cast<std::uint16_t>(20000 + rng.below(40000));
      tmpl.dst_port = a.dst_port;
      tmpl.protocol = a.protocol;
      tmpl.length = a.packet_size;
      if (a.protocol == Protocol::TCP) tmpl.tcp_flags = benign_flags(a.protocol);
      tmpl.label = Label::Normal;
      tmpl.app = a.app;
      constant_rate(all, tmpl, a.rate_kbps * 1000.0, a.start, stop, a.jitter, rng, stream);
    }
  }

  const AttackSpec& at = cfg.attack;
  if (at.intensity_mbps > 0.0) {
    const double stop = at.stop < 0.0 ? cfg.duration : std::min(at.stop, cfg.duration);
    const double per_source = at.intensity_mbps * 1e6 / at.sources;
    for (int s = 0; s < at.sources; ++s) {
      const std::uint64_t stream = kAttackStreams + static_cast<std::uint64_t>(s);
      Rng rng(cfg.seed, stream);
      PacketRecord tmpl;
      tmpl.src_ip = attacker_ip(static_cast<unsigned>(s));
      tmpl.dst_ip = ipv4(10, 0, 0, 2);
      tmpl.src_port = static_cast<std::uint16_t>(1024 + rng.below(60000));
      tmpl.dst_port = at.dst_port;
      tmpl.protocol = at.protocol;
      tmpl.length = at.packet_size;
      if (at.protocol == Protocol::TCP) tmpl.tcp_flags = tcp_flag::SYN;
      tmpl.label = at.type;
      tmpl.app = App::Attack;
      const std::uint16_t sweep = at.type == Label::Probe ? std::uint16_t{1} : std::uint16_t{0};
      constant_rate(all, tmpl, per_source, at.start, stop, 0.5, rng, stream, sweep);
    }
  }

  std::sort(all.begin(), all.end(), [](const Tagged& x, const Tagged& y) {
    return std::tie(x.p.ts, x.stream, x.seq) < std::tie(y.p.ts, y.stream, y.seq);
  });
  trace.packets.reserve(all.size());
  for (auto& t : all) trace.packets.push_back(std::move(t.p));
  return trace;
}

}  // namespace sdnguard::netsim

namespace sdnguard::netsim {

namespace {

struct Shape {
  Label label;
  int min_pkts, max_pkts;
  double min_size, max_size;
  double min_iat, max_iat;
  double fwd_share;  // chance a packet travels client -> server
  Protocol proto;
  std::uint16_t port;
  std::uint8_t fwd_flags;
  std::uint8_t bwd_flags;
};

const Shape kShapes[] = {
    {Label::Normal, 4, 60, 60, 1400, 0.01, 0.4, 0.55, Protocol::TCP, 443, tcp_flag::ACK | tcp_flag::PSH, tcp_flag::ACK},
    {Label::Normal, 2, 20, 80, 300, 0.02, 0.6, 0.5, Protocol::UDP, 53, 0, 0},
    {Label::DDoS, 30, 200, 60, 90, 0.0005, 0.004, 1.0, Protocol::TCP, 80, tcp_flag::SYN, 0},
    {Label::DoS, 30, 200, 900, 1500, 0.001, 0.008, 0.95, Protocol::UDP, 80, 0, 0},
    {Label::Probe, 2, 4, 40, 64, 0.0005, 0.01, 0.5, Protocol::TCP, 8080, tcp_flag::SYN, tcp_flag::RST | tcp_flag::ACK},
    {Label::BruteForce, 10, 50, 80, 220, 0.2, 1.2, 0.55, Protocol::TCP, 22, tcp_flag::ACK | tcp_flag::PSH, tcp_flag::ACK},
    {Label::Web, 6, 40, 400, 1500, 0.05, 0.3, 0.7, Protocol::TCP, 80, tcp_flag::ACK | tcp_flag::PSH, tcp_flag::ACK},
    {Label::Exploit, 3, 15, 600, 1500, 0.01, 0.2, 0.8, Protocol::TCP, 445, tcp_flag::ACK | tcp_flag::PSH, tcp_flag::RST},
    {Label::Botnet, 4, 20, 70, 160, 1.0, 5.0, 0.5, Protocol::TCP, 6667, tcp_flag::ACK | tcp_flag::PSH, tcp_flag::ACK},
};

}  // namespace

std::vector<FlowState> synthetic_flows(std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kShapeCount = sizeof(kShapes) / sizeof(kShapes[0]);
  Rng rng(seed, 0x5f10);
  std::vector<FlowState> out;
  out.reserve(n);
  double start = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Half of the draws use the two normal profiles.
    const std::size_t pick = rng.uniform() < 0.5 ? rng.below(2) : 2 + rng.below(kShapeCount - 2);
    const Shape& s = kShapes[pick];
    start += rng.uniform(0.0, 0.002);
    PacketRecord p;
    p.src_ip = 0x0a000000u | static_cast<std::uint32_t>(rng.below(1u << 16) + 256);
    p.dst_ip = 0x0a800000u | static_cast<std::uint32_t>(rng.below(256) + 1);
    p.src_port = static_cast<std::uint16_t>(1024 + rng.below(60000));
    p.protocol = s.proto;
    p.label = s.label;
    p.app = s.label == Label::Normal ? (s.proto == Protocol::UDP ? App::DNS : App::Web) : App::Attack;
    const int count = s.min_pkts + static_cast<int>(rng.below(static_cast<std::size_t>(s.max_pkts - s.min_pkts + 1)));
    double ts = start;
    FlowState f;
    for (int k = 0; k < count; ++k) {
      PacketRecord q = p;
      q.ts = ts;
      const bool fwd = k == 0 || rng.uniform() < s.fwd_share;
      q.dst_port = s.port;
      if (!fwd) {
        std::swap(q.src_ip, q.dst_ip);
        std::swap(q.src_port, q.dst_port);
      }
      q.length = static_cast<std::uint32_t>(rng.uniform(s.min_size, s.max_size));
      if (s.proto == Protocol::TCP) q.tcp_flags = fwd ? s.fwd_flags : s.bwd_flags;
      if (k == 0) {
        f = FlowState::open(q);
      } else {
        f.append(q);
      }
      ts += rng.uniform(s.min_iat, s.max_iat);
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace sdnguard::netsim
