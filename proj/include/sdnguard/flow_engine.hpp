#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sdnguard/labels.hpp"

namespace sdnguard {

enum class Protocol : std::uint8_t { TCP, UDP, ICMP, OTHER };

std::string_view protocol_name(Protocol p) noexcept;
std::optional<Protocol> parse_protocol(std::string_view text);

// TCP flag bits as carried on the wire.
namespace tcp_flag {
inline constexpr std::uint8_t FIN = 0x01;
inline constexpr std::uint8_t SYN = 0x02;
inline constexpr std::uint8_t RST = 0x04;
inline constexpr std::uint8_t PSH = 0x08;
inline constexpr std::uint8_t ACK = 0x10;
}  // namespace tcp_flag

// Application class of generated traffic. Ground truth only; never visible
// to the detector.
enum class App : std::uint8_t { VoIP, Video, DNS, Web, Bulk, Attack, Unknown };

std::string_view app_name(App a) noexcept;
std::optional<App> parse_app(std::string_view text);

struct PacketRecord {
  double ts = 0.0;
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::TCP;
  std::uint32_t length = 1;
  std::optional<std::uint8_t> tcp_flags;

  // Ground-truth annotations for supervised and simulated traces.
  std::optional<Label> label;
  App app = App::Unknown;
};

std::string format_ipv4(std::uint32_t ip);
std::optional<std::uint32_t> parse_ipv4(std::string_view text);

// Directional 5-tuple.
struct FiveTuple {
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::TCP;

  FiveTuple reversed() const noexcept { return {dst_ip, src_ip, dst_port, src_port, protocol}; }
  bool operator==(const FiveTuple&) const = default;
};

FiveTuple tuple_of(const PacketRecord& p) noexcept;

// "10.0.0.1:5000->10.0.0.2:80/TCP"
std::string render_flow_id(const FiveTuple& t);
std::optional<FiveTuple> parse_flow_id(std::string_view text);

// Order-normalized 5-tuple: both directions of a conversation share a key.
struct FlowKey {
  std::uint32_t ip_a = 0;
  std::uint32_t ip_b = 0;
  std::uint16_t port_a = 0;
  std::uint16_t port_b = 0;
  Protocol protocol = Protocol::TCP;

  bool operator==(const FlowKey&) const = default;
  auto operator<=>(const FlowKey&) const = default;
};

FlowKey flow_key(const PacketRecord& p) noexcept;
FlowKey flow_key(const FiveTuple& t) noexcept;

struct FlowKeyHash {
  std::size_t operator()(const FlowKey& k) const noexcept;
};

struct FlowState {
  FlowKey key;
  FiveTuple forward;  // direction of the first packet
  double first_ts = 0.0;
  double last_ts = 0.0;
  std::uint64_t pkt_count = 0;
  std::uint64_t byte_sum = 0;
  double iat_sum = 0.0;
  double iat_sq_sum = 0.0;
  std::uint32_t size_min = 0;
  std::uint32_t size_max = 0;
  std::map<std::uint16_t, std::uint64_t> dst_port_counts;
  std::uint64_t fwd_pkt_count = 0;
  std::uint64_t bwd_pkt_count = 0;
  std::uint64_t syn_count = 0;
  std::uint64_t ack_count = 0;
  std::uint64_t rst_count = 0;
  std::optional<Label> label;
  App app = App::Unknown;

  std::string flow_id() const { return render_flow_id(forward); }

  // Starts a flow from its first packet.
  static FlowState open(const PacketRecord& p);
  void append(const PacketRecord& p);
};

// The fixed 12-feature schema.
struct FeatureVector {
  double duration = 0.0;
  double pkt_count = 0.0;
  double mean_pkt_size = 0.0;
  double byte_rate = 0.0;
  double mean_iat = 0.0;
  double dst_port_entropy = 0.0;
  double size_min = 0.0;
  double size_max = 0.0;
  double fwd_ratio = 0.0;
  double syn_count = 0.0;
  double ack_count = 0.0;
  double rst_count = 0.0;

  static constexpr std::size_t kSize = 12;
  std::array<double, kSize> values() const noexcept;
  static const std::vector<std::string>& names();
};

// Byte rate divides by at least this many seconds.
inline constexpr double kMinRateWindow = 0.001;

FeatureVector extract_features(const FlowState& f);

// Shannon entropy in bits of a frequency table.
double entropy_bits(const std::map<std::uint16_t, std::uint64_t>& counts);

struct FlowTableConfig {
  double idle_timeout = 5.0;
  // Flows older than this are exported and restarted; 0 disables it.
  double active_timeout = 0.0;
};

// Single-writer table of live flows.
class FlowTable {
 public:
  explicit FlowTable(FlowTableConfig cfg = {});

  // Appends p to its flow, then removes and returns every flow idle for at
  // least the idle timeout at `now`, ordered by last_ts. A packet arriving on
  // an already-idle (or over-age, when the active timeout is set) flow closes
  // the old flow and starts a new one; the closed flow is returned as well.
  std::vector<FlowState> ingest_and_expire(const PacketRecord& p, double now);

  // Appends p; flows closed by idle/active rollover are pushed to `closed`.
  void ingest(const PacketRecord& p, std::vector<FlowState>& closed);
  std::vector<FlowState> expire(double now);
  std::vector<FlowState> flush();

  std::size_t size() const noexcept { return flows_.size(); }
  const FlowState* find(const FlowKey& key) const;
  const FlowTableConfig& config() const noexcept { return cfg_; }

 private:
  FlowTableConfig cfg_;
  std::unordered_map<FlowKey, FlowState, FlowKeyHash> flows_;
};

void sort_by_last_seen(std::vector<FlowState>& flows);

// Per-feature z-score parameters, tied to a named feature order.
struct NormalizationStats {
  std::vector<std::string> feature_names;
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t size() const noexcept { return feature_names.size(); }
};

// Population mean and standard deviation; rows are feature-major in
// `feature_names` order.
NormalizationStats fit_normalizer(const std::vector<std::string>& feature_names,
                                  std::span<const double> row_major, std::size_t rows);
NormalizationStats fit_normalizer(std::span<const FeatureVector> rows);

std::vector<double> normalize(std::span<const double> values, const NormalizationStats& stats);
std::vector<double> normalize(const FeatureVector& v, const NormalizationStats& stats);
// Allocation-free form for hot loops. Sizes must already agree.
void normalize_into(std::span<const double> values, const NormalizationStats& stats,
                    std::span<double> out) noexcept;

}  // namespace sdnguard
