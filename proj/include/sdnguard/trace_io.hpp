#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sdnguard/flow_engine.hpp"

namespace sdnguard {

// Packet traces: CSV with header `ts,src_ip,dst_ip,src_port,dst_port,proto,len,flags`.
// Optional trailing `label,app` columns carry ground truth for simulated traces.
std::vector<PacketRecord> read_packet_csv(std::istream& in);
std::vector<PacketRecord> read_packet_csv_file(const std::string& path);
void write_packet_csv(std::ostream& out, const std::vector<PacketRecord>& packets,
                      bool with_truth = false);

// Minimal CSV field splitter; handles double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace sdnguard
