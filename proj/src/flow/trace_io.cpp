#include "sdnguard/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "sdnguard/error.hpp"

namespace sdnguard {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

template <typename T>
T parse_number(const std::string& cell, std::size_t row, std::string_view column) {
  T v{};
  auto [next, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || next != cell.data() + cell.size()) {
    throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + " column '" +
                                          std::string(column) + "': '" + cell + "'");
  }
  return v;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<PacketRecord> read_packet_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MissingColumn, "empty packet trace");
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
  for (const char* name : {"ts", "src_ip", "dst_ip", "src_port", "dst_port", "proto", "len"}) {
    if (!col.count(name)) throw Error(Errc::MissingColumn, std::string("packet trace lacks ") + name);
  }
  const bool has_flags = col.count("flags") > 0;
  const bool has_label = col.count("label") > 0;
  const bool has_app = col.count("app") > 0;

  std::vector<PacketRecord> out;
  std::size_t row = 0;
  double last_ts = 0.0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() < header.size()) {
      throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + " has too few fields");
    }
    for (auto& cell : f) cell = trim(cell);
    PacketRecord p;
    p.ts = parse_number<double>(f[col["ts"]], row, "ts");
    auto src = parse_ipv4(f[col["src_ip"]]);
    auto dst = parse_ipv4(f[col["dst_ip"]]);
    if (!src || !dst) throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + ": bad IPv4");
    p.src_ip = *src;
    p.dst_ip = *dst;
    p.src_port = parse_number<std::uint16_t>(f[col["src_port"]], row, "src_port");
    p.dst_port = parse_number<std::uint16_t>(f[col["dst_port"]], row, "dst_port");
    auto proto = parse_protocol(f[col["proto"]]);
    if (!proto) throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + ": bad proto");
    p.protocol = *proto;
    p.length = parse_number<std::uint32_t>(f[col["len"]], row, "len");
    if (p.length < 1 || p.ts < 0.0) {
      throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + ": len must be >= 1, ts >= 0");
    }
    if (has_flags && !f[col["flags"]].empty()) {
      const std::string& cell = f[col["flags"]];
      unsigned v = 0;
      const bool hex = cell.size() > 2 && cell[0] == '0' && (cell[1] == 'x' || cell[1] == 'X');
      const char* b = cell.data() + (hex ? 2 : 0);
      auto [next, ec] = std::from_chars(b, cell.data() + cell.size(), v, hex ? 16 : 10);
      if (ec != std::errc{} || next != cell.data() + cell.size() || v > 255) {
        throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + ": bad flags");
      }
      p.tcp_flags = static_cast<std::uint8_t>(v);
    }
    if (has_label && !f[col["label"]].empty()) {
      p.label = parse_label(f[col["label"]]);
      if (!p.label) throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + ": bad label");
    }
    if (has_app && !f[col["app"]].empty()) {
      auto app = parse_app(f[col["app"]]);
      if (!app) throw Error(Errc::UnparsableCell, "row " + std::to_string(row) + ": bad app");
      p.app = *app;
    }
    if (p.ts < last_ts) {
      throw Error(Errc::NonMonotonicTimestamp, "row " + std::to_string(row) + " goes back in time");
    }
    last_ts = p.ts;
    out.push_back(p);
    ++row;
  }
  return out;
}

std::vector<PacketRecord> read_packet_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  return read_packet_csv(in);
}

void write_packet_csv(std::ostream& out, const std::vector<PacketRecord>& packets,
                      bool with_truth) {
  out << "ts,src_ip,dst_ip,src_port,dst_port,proto,len,flags";
  if (with_truth) out << ",label,app";
  out << '\n';
  char ts[64];
  for (const auto& p : packets) {
    std::snprintf(ts, sizeof ts, "%.6f", p.ts);
    out << ts << ',' << format_ipv4(p.src_ip) << ',' << format_ipv4(p.dst_ip) << ','
        << p.src_port << ',' << p.dst_port << ',' << protocol_name(p.protocol) << ','
        << p.length << ',';
    if (p.tcp_flags) {
      char flags[8];
      std::snprintf(flags, sizeof flags, "0x%02x", static_cast<unsigned>(*p.tcp_flags));
      out << flags;
    }
    if (with_truth) {
      out << ',' << (p.label ? label_name(*p.label) : std::string_view{}) << ','
          << app_name(p.app);
    }
    out << '\n';
  }
}

}  // namespace sdnguard
