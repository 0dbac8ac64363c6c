#include "sdnguard/flow_engine.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "sdnguard/error.hpp"

namespace sdnguard {

std::string_view protocol_name(Protocol p) noexcept {
  switch (p) {
    case Protocol::TCP: return "TCP";
    case Protocol::UDP: return "UDP";
    case Protocol::ICMP: return "ICMP";
    case Protocol::OTHER: return "OTHER";
  }
  return "OTHER";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
  std::string up;
  for (char c : text) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "TCP" || up == "6") return Protocol::TCP;
  if (up == "UDP" || up == "17") return Protocol::UDP;
  if (up == "ICMP" || up == "1") return Protocol::ICMP;
  if (up == "OTHER") return Protocol::OTHER;
  return std::nullopt;
}

std::string_view app_name(App a) noexcept {
  switch (a) {
    case App::VoIP: return "voip";
    case App::Video: return "video";
    case App::DNS: return "dns";
    case App::Web: return "web";
    case App::Bulk: return "bulk";
    case App::Attack: return "attack";
    case App::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<App> parse_app(std::string_view text) {
  for (App a : {App::VoIP, App::Video, App::DNS, App::Web, App::Bulk, App::Attack, App::Unknown}) {
    if (app_name(a) == text) return a;
  }
  return std::nullopt;
}

std::string format_ipv4(std::uint32_t ip) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (ip >> 24) & 0xff, (ip >> 16) & 0xff,
                (ip >> 8) & 0xff, ip & 0xff);
  return buf;
}

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
  std::uint32_t ip = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || next == p || v > 255) return std::nullopt;
    ip = (ip << 8) | v;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return ip;
}

FiveTuple tuple_of(const PacketRecord& p) noexcept {
  return {p.src_ip, p.dst_ip, p.src_port, p.dst_port, p.protocol};
}

std::string render_flow_id(const FiveTuple& t) {
  return format_ipv4(t.src_ip) + ":" + std::to_string(t.src_port) + "->" +
         format_ipv4(t.dst_ip) + ":" + std::to_string(t.dst_port) + "/" +
         std::string(protocol_name(t.protocol));
}

namespace {

std::optional<std::pair<std::uint32_t, std::uint16_t>> parse_endpoint(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto ip = parse_ipv4(s.substr(0, colon));
  if (!ip) return std::nullopt;
  const auto port_text = s.substr(colon + 1);
  unsigned port = 0;
  auto [next, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || next != port_text.data() + port_text.size() || port > 65535) {
    return std::nullopt;
  }
  return std::make_pair(*ip, static_cast<std::uint16_t>(port));
}

}  // namespace

std::optional<FiveTuple> parse_flow_id(std::string_view text) {
  const auto arrow = text.find("->");
  const auto slash = text.rfind('/');
  if (arrow == std::string_view::npos || slash == std::string_view::npos || slash < arrow) {
    return std::nullopt;
  }
  auto src = parse_endpoint(text.substr(0, arrow));
  auto dst = parse_endpoint(text.substr(arrow + 2, slash - arrow - 2));
  auto proto = parse_protocol(text.substr(slash + 1));
  if (!src || !dst || !proto) return std::nullopt;
  return FiveTuple{src->first, dst->first, src->second, dst->second, *proto};
}

FlowKey flow_key(const FiveTuple& t) noexcept {
  const bool keep = std::tie(t.src_ip, t.src_port) <= std::tie(t.dst_ip, t.dst_port);
  if (keep) return {t.src_ip, t.dst_ip, t.src_port, t.dst_port, t.protocol};
  return {t.dst_ip, t.src_ip, t.dst_port, t.src_port, t.protocol};
}

FlowKey flow_key(const PacketRecord& p) noexcept { return flow_key(tuple_of(p)); }

std::size_t FlowKeyHash::operator()(const FlowKey& k) const noexcept {
  std::uint64_t h = (static_cast<std::uint64_t>(k.ip_a) << 32) | k.ip_b;
  h ^= (static_cast<std::uint64_t>(k.port_a) << 24) ^ (static_cast<std::uint64_t>(k.port_b) << 8) ^
       static_cast<std::uint64_t>(k.protocol);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

FlowState FlowState::open(const PacketRecord& p) {
  FlowState f;
  f.key = flow_key(p);
  f.forward = tuple_of(p);
  f.first_ts = p.ts;
  f.last_ts = p.ts;
  f.size_min = p.length;
  f.size_max = p.length;
  f.label = p.label;
  f.app = p.app;
  f.pkt_count = 1;
  f.byte_sum = p.length;
  f.dst_port_counts[p.dst_port] = 1;
  f.fwd_pkt_count = 1;
  if (p.tcp_flags) {
    f.syn_count += (*p.tcp_flags & tcp_flag::SYN) ? 1 : 0;
    f.ack_count += (*p.tcp_flags & tcp_flag::ACK) ? 1 : 0;
    f.rst_count += (*p.tcp_flags & tcp_flag::RST) ? 1 : 0;
  }
  return f;
}

void FlowState::append(const PacketRecord& p) {
  if (p.ts < last_ts) {
    throw Error(Errc::NonMonotonicTimestamp,
                "packet at " + std::to_string(p.ts) + " precedes flow " + flow_id() +
                    " last seen at " + std::to_string(last_ts));
  }
  const double gap = p.ts - last_ts;
  iat_sum += gap;
  iat_sq_sum += gap * gap;
  last_ts = p.ts;
  ++pkt_count;
  byte_sum += p.length;
  size_min = std::min(size_min, p.length);
  size_max = std::max(size_max, p.length);
  ++dst_port_counts[p.dst_port];
  if (tuple_of(p) == forward) {
    ++fwd_pkt_count;
  } else {
    ++bwd_pkt_count;
  }
  if (p.tcp_flags) {
    syn_count += (*p.tcp_flags & tcp_flag::SYN) ? 1 : 0;
    ack_count += (*p.tcp_flags & tcp_flag::ACK) ? 1 : 0;
    rst_count += (*p.tcp_flags & tcp_flag::RST) ? 1 : 0;
  }
}

std::array<double, FeatureVector::kSize> FeatureVector::values() const noexcept {
  return {duration,  pkt_count, mean_pkt_size, byte_rate, mean_iat,  dst_port_entropy,
          size_min,  size_max,  fwd_ratio,     syn_count, ack_count, rst_count};
}

const std::vector<std::string>& FeatureVector::names() {
  static const std::vector<std::string> kNames = {
      "duration", "pkt_count", "mean_pkt_size", "byte_rate", "mean_iat",  "dst_port_entropy",
      "size_min", "size_max",  "fwd_ratio",     "syn_count", "ack_count", "rst_count"};
  return kNames;
}

double entropy_bits(const std::map<std::uint16_t, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [port, n] : counts) total += n;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (const auto& [port, n] : counts) {
    if (n == 0) continue;
    const double p = static_cast<double>(n) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  // -0.0 for a single port
  return h == 0.0 ? 0.0 : h;
}

FeatureVector extract_features(const FlowState& f) {
  FeatureVector v;
  const double n = static_cast<double>(f.pkt_count);
  v.duration = f.last_ts - f.first_ts;
  v.pkt_count = n;
  v.mean_pkt_size = static_cast<double>(f.byte_sum) / n;
  v.byte_rate = static_cast<double>(f.byte_sum) / std::max(v.duration, kMinRateWindow);
  v.mean_iat = f.pkt_count >= 2 ? f.iat_sum / (n - 1.0) : 0.0;
  v.dst_port_entropy = entropy_bits(f.dst_port_counts);
  v.size_min = f.size_min;
  v.size_max = f.size_max;
  v.fwd_ratio = static_cast<double>(f.fwd_pkt_count) / n;
  v.syn_count = static_cast<double>(f.syn_count);
  v.ack_count = static_cast<double>(f.ack_count);
  v.rst_count = static_cast<double>(f.rst_count);
  return v;
}

FlowTable::FlowTable(FlowTableConfig cfg) : cfg_(cfg) {
  if (!(cfg_.idle_timeout > 0.0)) throw Error(Errc::InvalidConfig, "idle timeout must be > 0");
  if (cfg_.active_timeout < 0.0) throw Error(Errc::InvalidConfig, "active timeout must be >= 0");
}

void FlowTable::ingest(const PacketRecord& p, std::vector<FlowState>& closed) {
  const FlowKey key = flow_key(p);
  auto it = flows_.find(key);
  if (it == flows_.end()) {
    flows_.emplace(key, FlowState::open(p));
    return;
  }
  FlowState& f = it->second;
  if (p.ts < f.last_ts) {
    throw Error(Errc::NonMonotonicTimestamp, "packet at " + std::to_string(p.ts) +
                                                 " precedes flow " + f.flow_id() +
                                                 " last seen at " + std::to_string(f.last_ts));
  }
  const bool idle = p.ts - f.last_ts >= cfg_.idle_timeout;
  const bool aged = cfg_.active_timeout > 0.0 && p.ts - f.first_ts >= cfg_.active_timeout;
  if (idle || aged) {
    closed.push_back(std::move(f));
    f = FlowState::open(p);
    return;
  }
  f.append(p);
}

std::vector<FlowState> FlowTable::expire(double now) {
  std::vector<FlowState> out;
  for (auto it = flows_.begin(); it != flows_.end();) {
    if (now - it->second.last_ts >= cfg_.idle_timeout) {
      out.push_back(std::move(it->second));
      it = flows_.erase(it);
    } else {
      ++it;
    }
  }
  sort_by_last_seen(out);
  return out;
}

std::vector<FlowState> FlowTable::ingest_and_expire(const PacketRecord& p, double now) {
  if (now < p.ts) {
    throw Error(Errc::InvalidInput, "expiry time precedes packet timestamp");
  }
  std::vector<FlowState> out;
  ingest(p, out);
  auto expired = expire(now);
  out.insert(out.end(), std::make_move_iterator(expired.begin()),
             std::make_move_iterator(expired.end()));
  sort_by_last_seen(out);
  return out;
}

std::vector<FlowState> FlowTable::flush() {
  std::vector<FlowState> out;
  out.reserve(flows_.size());
  for (auto& [key, f] : flows_) out.push_back(std::move(f));
  flows_.clear();
  sort_by_last_seen(out);
  return out;
}

const FlowState* FlowTable::find(const FlowKey& key) const {
  auto it = flows_.find(key);
  return it == flows_.end() ? nullptr : &it->second;
}

void sort_by_last_seen(std::vector<FlowState>& flows) {
  std::sort(flows.begin(), flows.end(), [](const FlowState& a, const FlowState& b) {
    return std::tie(a.last_ts, a.first_ts, a.key) < std::tie(b.last_ts, b.first_ts, b.key);
  });
}

NormalizationStats fit_normalizer(const std::vector<std::string>& feature_names,
                                  std::span<const double> row_major, std::size_t rows) {
  const std::size_t d = feature_names.size();
  if (rows < 2) throw Error(Errc::InsufficientData, "normalizer needs at least 2 rows");
  if (row_major.size() != rows * d) {
    throw Error(Errc::SchemaMismatch, "row data does not match the feature count");
  }
  NormalizationStats s;
  s.feature_names = feature_names;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  // Welford per feature.
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double x = row_major[i * d + j];
      const double delta = x - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (x - mean);
    }
    s.mean[j] = mean;
    s.stddev[j] = std::sqrt(std::max(m2 / static_cast<double>(rows), 0.0));
  }
  return s;
}

NormalizationStats fit_normalizer(std::span<const FeatureVector> rows) {
  std::vector<double> flat;
  flat.reserve(rows.size() * FeatureVector::kSize);
  for (const auto& r : rows) {
    const auto v = r.values();
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return fit_normalizer(FeatureVector::names(), flat, rows.size());
}

void normalize_into(std::span<const double> values, const NormalizationStats& stats,
                    std::span<double> out) noexcept {
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double sigma = stats.stddev[j];
    out[j] = sigma > 0.0 ? (values[j] - stats.mean[j]) / sigma : 0.0;
  }
}

std::vector<double> normalize(std::span<const double> values, const NormalizationStats& stats) {
  if (values.size() != stats.size()) {
    throw Error(Errc::SchemaMismatch, "vector has " + std::to_string(values.size()) +
                                          " features, normalizer covers " +
                                          std::to_string(stats.size()));
  }
  std::vector<double> out(values.size());
  normalize_into(values, stats, out);
  return out;
}

std::vector<double> normalize(const FeatureVector& v, const NormalizationStats& stats) {
  if (stats.feature_names != FeatureVector::names()) {
    throw Error(Errc::SchemaMismatch, "normalizer was fitted on a different feature schema");
  }
  const auto values = v.values();
  return normalize(std::span<const double>(values), stats);
}

}  // namespace sdnguard
