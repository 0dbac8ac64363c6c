#include "sdnguard/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "sdnguard/error.hpp"

namespace sdnguard::metrics {

using nlohmann::json;

namespace {

constexpr const char* kDriftDefinition =
    "100 * min segment accuracy / first segment accuracy over equal-count temporal segments";

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json stat_json(const StatBlock& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

StatBlock stat_from(const json& j) {
  return {j.at("count").get<std::size_t>(), j.at("mean").get<double>(), j.at("min").get<double>(),
          j.at("max").get<double>()};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "cannot write " + p.string());
}

std::string series_csv(const std::string& hash, const std::string& column, const std::vector<double>& xs) {
  std::string s = "# config_hash=" + hash + "\nindex," + column + "\n";
  for (std::size_t i = 0; i < xs.size(); ++i) s += std::to_string(i) + "," + num(xs[i]) + "\n";
  return s;
}

}  // namespace

bool MetricsReport::operator==(const MetricsReport& o) const {
  auto rows_equal = [](const std::vector<ledger::LatencyRow>& a, const std::vector<ledger::LatencyRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].block_size != b[i].block_size || a[i].concurrency != b[i].concurrency ||
          a[i].transactions != b[i].transactions || a[i].mean_ms != b[i].mean_ms || a[i].min_ms != b[i].min_ms ||
          a[i].max_ms != b[i].max_ms || a[i].p95_ms != b[i].p95_ms) {
        return false;
      }
    }
    return true;
  };
  const bool windows_equal = qos_window.has_value() == o.qos_window.has_value() &&
                             (!qos_window || (qos_window->start == o.qos_window->start &&
                                              qos_window->end == o.qos_window->end));
  return config_hash == o.config_hash && source == o.source && confusion == o.confusion &&
         accuracy_pct == o.accuracy_pct && fpr_pct == o.fpr_pct && alert_latency_ms == o.alert_latency_ms &&
         reconfig_ms == o.reconfig_ms && txn_ms == o.txn_ms && alert_latency_series == o.alert_latency_series &&
         reconfig_series == o.reconfig_series && txn_series == o.txn_series &&
         rows_equal(txn_latency_table, o.txn_latency_table) && qos_retention_pct == o.qos_retention_pct &&
         windows_equal && throughput_flows_per_sec == o.throughput_flows_per_sec &&
         drift_resilience_pct == o.drift_resilience_pct && segment_accuracy == o.segment_accuracy &&
         counters == o.counters;
}

void emit_report(const MetricsReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir + ": " + ec.message());
  const fs::path root(dir);

  json rows = json::array();
  for (const auto& row : r.txn_latency_table) {
    rows.push_back({{"block_size", row.block_size},
                    {"concurrency", row.concurrency},
                    {"transactions", row.transactions},
                    {"mean_ms", row.mean_ms},
                    {"min_ms", row.min_ms},
                    {"max_ms", row.max_ms},
                    {"p95_ms", row.p95_ms}});
  }
  json j;
  j["config_hash"] = r.config_hash;
  j["source"] = r.source;
  j["confusion"] = r.confusion ? json{{"tp", r.confusion->tp}, {"tn", r.confusion->tn},
                                      {"fp", r.confusion->fp}, {"fn", r.confusion->fn}}
                               : json(nullptr);
  j["accuracy_pct"] = opt(r.accuracy_pct);
  j["fpr_pct"] = opt(r.fpr_pct);
  j["alert_latency_ms"] = stat_json(r.alert_latency_ms);
  j["reconfig_ms"] = stat_json(r.reconfig_ms);
  j["txn_ms"] = stat_json(r.txn_ms);
  j["series"] = {{"alert_latency_ms", r.alert_latency_series},
                 {"reconfig_ms", r.reconfig_series},
                 {"txn_ms", r.txn_series}};
  j["txn_latency_table"] = {{"empty", r.txn_latency_table.empty()}, {"rows", rows}};
  j["qos_retention_pct"] = r.qos_retention_pct;
  j["qos_window"] = r.qos_window ? json{{"start", r.qos_window->start}, {"end", r.qos_window->end}} : json(nullptr);
  j["throughput_flows_per_sec"] = opt(r.throughput_flows_per_sec);
  j["drift_resilience_pct"] = opt(r.drift_resilience_pct);
  j["drift_definition"] = kDriftDefinition;
  j["segment_accuracy"] = r.segment_accuracy;
  j["counters"] = r.counters;
  write_text(root / "report.json", j.dump(2) + "\n");

  const std::string& h = r.config_hash;
  write_text(root / "alert_latency.csv", series_csv(h, "alert_latency_ms", r.alert_latency_series));
  write_text(root / "reconfig.csv", series_csv(h, "reconfig_ms", r.reconfig_series));
  write_text(root / "txn_latency.csv", series_csv(h, "txn_ms", r.txn_series));
  write_text(root / "drift_segments.csv", series_csv(h, "segment_accuracy", r.segment_accuracy));

  std::string table = "# config_hash=" + h + "\nblock_size,concurrency,transactions,mean_ms,min_ms,max_ms,p95_ms\n";
  for (const auto& row : r.txn_latency_table) {
    table += std::to_string(row.block_size) + "," + std::to_string(row.concurrency) + "," +
             std::to_string(row.transactions) + "," + num(row.mean_ms) + "," + num(row.min_ms) + "," +
             num(row.max_ms) + "," + num(row.p95_ms) + "\n";
  }
  write_text(root / "txn_latency_table.csv", table);

  std::string qos = "# config_hash=" + h + "\napp,retention_pct\n";
  for (const auto& [app, pct] : r.qos_retention_pct) qos += app + "," + num(pct) + "\n";
  write_text(root / "qos_retention.csv", qos);
}

MetricsReport load_report(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / "report.json";
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  MetricsReport r;
  try {
    const json j = json::parse(in);
    r.config_hash = j.at("config_hash").get<std::string>();
    r.source = j.at("source").get<std::string>();
    if (!j.at("confusion").is_null()) {
      const auto& c = j.at("confusion");
      r.confusion = ConfusionMatrix{c.at("tp").get<std::uint64_t>(), c.at("tn").get<std::uint64_t>(),
                                    c.at("fp").get<std::uint64_t>(), c.at("fn").get<std::uint64_t>()};
    }
    r.accuracy_pct = opt_from(j.at("accuracy_pct"));
    r.fpr_pct = opt_from(j.at("fpr_pct"));
    r.alert_latency_ms = stat_from(j.at("alert_latency_ms"));
    r.reconfig_ms = stat_from(j.at("reconfig_ms"));
    r.txn_ms = stat_from(j.at("txn_ms"));
    r.alert_latency_series = j.at("series").at("alert_latency_ms").get<std::vector<double>>();
    r.reconfig_series = j.at("series").at("reconfig_ms").get<std::vector<double>>();
    r.txn_series = j.at("series").at("txn_ms").get<std::vector<double>>();
    for (const auto& row : j.at("txn_latency_table").at("rows")) {
      r.txn_latency_table.push_back({row.at("block_size").get<std::size_t>(), row.at("concurrency").get<std::size_t>(),
                                     row.at("transactions").get<std::size_t>(), row.at("mean_ms").get<double>(),
                                     row.at("min_ms").get<double>(), row.at("max_ms").get<double>(),
                                     row.at("p95_ms").get<double>()});
    }
    r.qos_retention_pct = j.at("qos_retention_pct").get<std::map<std::string, double>>();
    if (!j.at("qos_window").is_null()) {
      r.qos_window = Window{j.at("qos_window").at("start").get<double>(), j.at("qos_window").at("end").get<double>()};
    }
    r.throughput_flows_per_sec = opt_from(j.at("throughput_flows_per_sec"));
    r.drift_resilience_pct = opt_from(j.at("drift_resilience_pct"));
    r.segment_accuracy = j.at("segment_accuracy").get<std::vector<double>>();
    r.counters = j.at("counters").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidInput, path.string() + ": " + e.what());
  }
  return r;
}

}  // namespace sdnguard::metrics
