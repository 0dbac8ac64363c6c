#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "sdnguard/dataset.hpp"
#include "sdnguard/error.hpp"
#include "sdnguard/flow_engine.hpp"
#include "sdnguard/trace_io.hpp"
#include "support/oracles.hpp"

using namespace sdnguard;

namespace {

PacketRecord pkt(double ts, const char* src, std::uint16_t sp, const char* dst, std::uint16_t dp,
                 std::uint32_t len = 100, Protocol proto = Protocol::TCP) {
  PacketRecord p;
  p.ts = ts;
  p.src_ip = *parse_ipv4(src);
  p.dst_ip = *parse_ipv4(dst);
  p.src_port = sp;
  p.dst_port = dp;
  p.length = len;
  p.protocol = proto;
  return p;
}

FlowState flow_of(const std::vector<PacketRecord>& pkts) {
  FlowState f = FlowState::open(pkts.front());
  for (std::size_t i = 1; i < pkts.size(); ++i) f.append(pkts[i]);
  return f;
}

std::map<std::uint16_t, std::uint64_t> counts(std::initializer_list<std::pair<std::uint16_t, std::uint64_t>> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST(FlowKey, BothDirectionsShareKey) {
  const auto a = pkt(0, "10.0.0.1", 5000, "10.0.0.2", 80);
  const auto b = pkt(0, "10.0.0.2", 80, "10.0.0.1", 5000);
  EXPECT_EQ(flow_key(a), flow_key(b));
  EXPECT_EQ(flow_key(a), flow_key(a));
  EXPECT_NE(flow_key(a), flow_key(pkt(0, "10.0.0.1", 5000, "10.0.0.2", 443)));
}

TEST(FlowKey, DisjointTuplesNeverCollide) {
  Rng rng(3);
  std::map<FlowKey, std::pair<FiveTuple, FiveTuple>> seen;
  for (int i = 0; i < 5000; ++i) {
    FiveTuple t{static_cast<std::uint32_t>(rng.below(8)), static_cast<std::uint32_t>(rng.below(8)),
                static_cast<std::uint16_t>(rng.below(8)), static_cast<std::uint16_t>(rng.below(8)),
                rng.below(2) ? Protocol::TCP : Protocol::UDP};
    auto [it, fresh] = seen.emplace(flow_key(t), std::pair{t, t.reversed()});
    if (!fresh) EXPECT_TRUE(t == it->second.first || t == it->second.second);
  }
}

TEST(FlowId, RendersAndParses) {
  const FiveTuple t = tuple_of(pkt(0, "10.0.0.1", 5000, "10.0.0.2", 80));
  EXPECT_EQ(render_flow_id(t), "10.0.0.1:5000->10.0.0.2:80/TCP");
  EXPECT_EQ(parse_flow_id(render_flow_id(t)), t);
  EXPECT_FALSE(parse_flow_id("10.0.0.1:5000-10.0.0.2:80/TCP"));
  EXPECT_FALSE(parse_flow_id("10.0.0.1:99999->10.0.0.2:80/TCP"));
}

TEST(FlowTable, SinglePacketExpiresAtTimeoutBoundary) {
  FlowTable table({5.0, 0.0});
  auto out = table.ingest_and_expire(pkt(0, "10.0.0.1", 1, "10.0.0.2", 2), 0.0);
  EXPECT_TRUE(out.empty());
  out = table.expire(5.0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].pkt_count, 1u);
  EXPECT_EQ(table.size(), 0u);
}

TEST(FlowTable, ActiveFlowStays) {
  FlowTable table({5.0, 0.0});
  table.ingest_and_expire(pkt(0, "10.0.0.1", 1, "10.0.0.2", 2), 0.0);
  auto out = table.ingest_and_expire(pkt(1, "10.0.0.1", 1, "10.0.0.2", 2), 3.0);
  EXPECT_TRUE(out.empty());
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.find(flow_key(pkt(0, "10.0.0.1", 1, "10.0.0.2", 2)))->pkt_count, 2u);
}

TEST(FlowTable, ExpiresExactlyTheIdleFlows) {
  FlowTable table({5.0, 0.0});
  std::vector<PacketRecord> ps;
  for (int i = 0; i < 3; ++i) ps.push_back(pkt(1.0, "10.0.0.1", static_cast<std::uint16_t>(100 + i), "10.0.0.2", 80));
  for (int i = 0; i < 2; ++i) ps.push_back(pkt(6.0, "10.0.0.1", static_cast<std::uint16_t>(200 + i), "10.0.0.2", 80));
  std::vector<FlowState> closed;
  for (const auto& p : ps) table.ingest(p, closed);
  // Oracle: scan every entry against the predicate.
  std::vector<FlowKey> expect;
  for (const auto& p : ps) {
    const FlowState* f = table.find(flow_key(p));
    if (7.0 - f->last_ts >= 5.0) expect.push_back(f->key);
  }
  const auto out = table.expire(7.0);
  ASSERT_EQ(out.size(), 3u);
  ASSERT_EQ(expect.size(), 3u);
  for (const auto& f : out) EXPECT_NE(std::find(expect.begin(), expect.end(), f.key), expect.end());
  EXPECT_EQ(table.size(), 2u);
}

TEST(FlowTable, RejectsTimeTravel) {
  FlowTable table;
  std::vector<FlowState> closed;
  table.ingest(pkt(2.0, "10.0.0.1", 1, "10.0.0.2", 2), closed);
  try {
    table.ingest(pkt(1.0, "10.0.0.1", 1, "10.0.0.2", 2), closed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonMonotonicTimestamp);
  }
}

TEST(FlowTable, IdleRolloverStartsNewFlow) {
  FlowTable table({5.0, 0.0});
  std::vector<FlowState> closed;
  table.ingest(pkt(0.0, "10.0.0.1", 1, "10.0.0.2", 2), closed);
  table.ingest(pkt(6.0, "10.0.0.1", 1, "10.0.0.2", 2), closed);
  ASSERT_EQ(closed.size(), 1u);
  EXPECT_EQ(closed[0].last_ts, 0.0);
  EXPECT_EQ(table.size(), 1u);
}

TEST(FlowTable, ActiveTimeoutSplitsLongFlows) {
  FlowTable table({5.0, 1.0});
  std::vector<FlowState> closed;
  for (int i = 0; i <= 30; ++i) table.ingest(pkt(0.1 * i, "10.0.0.1", 1, "10.0.0.2", 2), closed);
  const auto rest = table.flush();
  std::uint64_t total = rest.front().pkt_count;
  for (const auto& f : closed) {
    total += f.pkt_count;
    EXPECT_LT(f.last_ts - f.first_ts, 1.0);
  }
  EXPECT_EQ(total, 31u);
  EXPECT_EQ(closed.size(), 3u);
}

// Every ingested packet lands in exactly one returned flow.
TEST(FlowTableProperty, Conservation) {
  Rng rng(11);
  std::vector<PacketRecord> trace;
  for (int f = 0; f < 200; ++f) {
    auto pkts = oracle::random_flow(rng);
    trace.insert(trace.end(), pkts.begin(), pkts.end());
  }
  std::stable_sort(trace.begin(), trace.end(), [](const auto& a, const auto& b) { return a.ts < b.ts; });
  for (double active : {0.0, 2.0}) {
    FlowTable table({1.0, active});
    std::uint64_t packets = 0, bytes = 0;
    for (const auto& p : trace) {
      for (const auto& f : table.ingest_and_expire(p, p.ts)) {
        packets += f.pkt_count;
        bytes += f.byte_sum;
        EXPECT_EQ(f.fwd_pkt_count + f.bwd_pkt_count, f.pkt_count);
        EXPECT_GE(f.last_ts, f.first_ts);
      }
    }
    for (const auto& f : table.flush()) {
      packets += f.pkt_count;
      bytes += f.byte_sum;
    }
    EXPECT_EQ(packets, trace.size());
    EXPECT_EQ(bytes, std::accumulate(trace.begin(), trace.end(), std::uint64_t{0},
                                     [](std::uint64_t s, const PacketRecord& p) { return s + p.length; }));
  }
}

TEST(Features, ArithmeticExamples) {
  auto a = pkt(0.0, "10.0.0.1", 1, "10.0.0.2", 2, 100);
  auto b = pkt(1.0, "10.0.0.1", 1, "10.0.0.2", 2, 200);
  auto c = pkt(3.0, "10.0.0.1", 1, "10.0.0.2", 2, 300);
  const auto v = extract_features(flow_of({a, b, c}));
  EXPECT_EQ(v.mean_pkt_size, 200.0);
  EXPECT_EQ(v.mean_iat, 1.5);
  EXPECT_EQ(v.duration, 3.0);
  EXPECT_EQ(v.byte_rate, 200.0);

  auto d = pkt(0.0, "10.0.0.1", 1, "10.0.0.2", 2, 300);
  auto e = pkt(2.0, "10.0.0.1", 1, "10.0.0.2", 2, 300);
  EXPECT_EQ(extract_features(flow_of({d, e})).byte_rate, 300.0);
}

TEST(Features, SinglePacketDegenerateCases) {
  const auto v = extract_features(flow_of({pkt(4.0, "10.0.0.1", 1, "10.0.0.2", 2, 500)}));
  EXPECT_EQ(v.duration, 0.0);
  EXPECT_EQ(v.mean_iat, 0.0);
  EXPECT_EQ(v.byte_rate, 500.0 / kMinRateWindow);
  EXPECT_EQ(v.dst_port_entropy, 0.0);
  EXPECT_EQ(v.fwd_ratio, 1.0);
}

TEST(Features, AnalyticEntropy) {
  EXPECT_EQ(entropy_bits(counts({{80, 5}, {443, 5}, {53, 5}, {22, 5}})), 2.0);
  EXPECT_EQ(entropy_bits(counts({{80, 17}})), 0.0);
  EXPECT_EQ(entropy_bits(counts({{80, 2}, {443, 1}, {53, 1}})), 1.5);
  EXPECT_FALSE(std::signbit(entropy_bits(counts({{80, 1}}))));
}

TEST(FeaturesProperty, EntropyBounds) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::map<std::uint16_t, std::uint64_t> c;
    const std::size_t k = 1 + rng.below(20);
    for (std::size_t i = 0; i < k; ++i) c[static_cast<std::uint16_t>(i)] = 1 + rng.below(50);
    const double h = entropy_bits(c);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(static_cast<double>(k)) + 1e-12);
    std::map<std::uint16_t, std::uint64_t> uniform;
    for (std::size_t i = 0; i < k; ++i) uniform[static_cast<std::uint16_t>(i)] = 7;
    EXPECT_NEAR(entropy_bits(uniform), std::log2(static_cast<double>(k)), 1e-12);
  }
}

TEST(FeaturesProperty, StreamingMatchesBruteForce) {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pkts = oracle::random_flow(rng);
    const auto got = extract_features(flow_of(pkts)).values();
    const auto want = oracle::features(pkts);
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double tol = 1e-9 * std::max(1.0, std::abs(want[i]));
      EXPECT_NEAR(got[i], want[i], tol) << FeatureVector::names()[i] << " trial " << trial;
      EXPECT_TRUE(std::isfinite(got[i]));
    }
  }
}

TEST(Normalizer, Examples) {
  const std::vector<std::string> names{"x"};
  auto s = fit_normalizer(names, std::vector<double>{2.0, 4.0}, 2);
  EXPECT_EQ(s.mean[0], 3.0);
  EXPECT_EQ(s.stddev[0], 1.0);
  s = fit_normalizer(names, std::vector<double>{5.0, 5.0, 5.0}, 3);
  EXPECT_EQ(s.mean[0], 5.0);
  EXPECT_EQ(s.stddev[0], 0.0);
  EXPECT_EQ(normalize(std::vector<double>{9.0}, s)[0], 0.0);

  NormalizationStats manual{names, {5.0}, {2.0}};
  EXPECT_EQ(normalize(std::vector<double>{7.0}, manual)[0], 1.0);
  EXPECT_EQ(normalize(std::vector<double>{5.0}, manual)[0], 0.0);
}

TEST(Normalizer, Errors) {
  const std::vector<std::string> names{"x"};
  EXPECT_THROW(fit_normalizer(names, std::vector<double>{1.0}, 1), Error);
  NormalizationStats s{{"x", "y"}, {0, 0}, {1, 1}};
  try {
    normalize(std::vector<double>{1.0}, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaMismatch);
  }
}

TEST(NormalizerProperty, MatchesTwoPassOracleAndSelfApplication) {
  Rng rng(21);
  std::vector<FeatureVector> rows;
  for (int i = 0; i < 100; ++i) rows.push_back(extract_features(flow_of(oracle::random_flow(rng))));
  const auto s = fit_normalizer(rows);
  for (std::size_t j = 0; j < FeatureVector::kSize; ++j) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r.values()[j];
    mean /= static_cast<double>(rows.size());
    double var = 0.0;
    for (const auto& r : rows) var += (r.values()[j] - mean) * (r.values()[j] - mean);
    const double sd = std::sqrt(var / static_cast<double>(rows.size()));
    EXPECT_NEAR(s.mean[j], mean, 1e-9 * std::max(1.0, std::abs(mean)));
    EXPECT_NEAR(s.stddev[j], sd, 1e-9 * std::max(1.0, sd));

    double m = 0.0, v = 0.0;
    std::vector<double> z;
    for (const auto& r : rows) z.push_back(normalize(r, s)[j]);
    for (double x : z) m += x;
    m /= static_cast<double>(z.size());
    for (double x : z) v += (x - m) * (x - m);
    v /= static_cast<double>(z.size());
    EXPECT_LT(std::abs(m), 1e-6);
    if (s.stddev[j] > 0.0) EXPECT_LT(std::abs(v - 1.0), 1e-6) << FeatureVector::names()[j];
  }
}

TEST(TraceIo, RoundTrip) {
  Rng rng(8);
  auto pkts = oracle::random_flow(rng);
  pkts[0].label = Label::DDoS;
  pkts[0].app = App::Attack;
  std::stringstream ss;
  write_packet_csv(ss, pkts, true);
  const auto back = read_packet_csv(ss);
  ASSERT_EQ(back.size(), pkts.size());
  for (std::size_t i = 0; i < pkts.size(); ++i) {
    EXPECT_NEAR(back[i].ts, pkts[i].ts, 5e-7);  // written with microsecond resolution
    EXPECT_EQ(tuple_of(back[i]), tuple_of(pkts[i]));
    EXPECT_EQ(back[i].length, pkts[i].length);
    EXPECT_EQ(back[i].tcp_flags, pkts[i].tcp_flags);
  }
  EXPECT_EQ(back[0].label, Label::DDoS);
  EXPECT_EQ(back[0].app, App::Attack);
}

TEST(Dataset, CompleteRowsVerbatim) {
  std::stringstream ss("a,b,label\n1,2,Normal\n3,4,DDoS\n5.5,-6,Probe\n");
  FlowCsvSchema schema;
  schema.features = {{"a", {"a"}}, {"b", {"b"}}};
  const auto d = read_flow_csv(ss, schema);
  ASSERT_EQ(d.rows(), 3u);
  EXPECT_EQ(d.values, (std::vector<double>{1, 2, 3, 4, 5.5, -6}));
  EXPECT_EQ(d.labels, (std::vector<Label>{Label::Normal, Label::DDoS, Label::Probe}));
}

TEST(Dataset, ImputesColumnMean) {
  std::stringstream ss("a,label\n2,Normal\n,Normal\n4,DoS\nNaN,DoS\n");
  FlowCsvSchema schema;
  schema.features = {{"a", {"a"}}};
  const auto d = read_flow_csv(ss, schema);
  EXPECT_EQ(d.values, (std::vector<double>{2, 3, 4, 3}));
}

TEST(Dataset, InsdnClassSpellings) {
  for (const char* name : {"Normal", "DoS", "DDoS", "Brute Force", "BFA", "Web Attacks", "Web-Attack", "Exploits",
                           "U2R", "Probe", "Botnet", "BOTNET"}) {
    EXPECT_TRUE(parse_label(name).has_value()) << name;
  }
  EXPECT_EQ(parse_label("brute force"), Label::BruteForce);
  EXPECT_EQ(parse_label("Web Attacks"), Label::Web);
  EXPECT_FALSE(parse_label("Smurf").has_value());
}

TEST(Dataset, Errors) {
  FlowCsvSchema schema;
  schema.features = {{"a", {"a"}}};
  std::stringstream missing("b,label\n1,Normal\n");
  try {
    read_flow_csv(missing, schema);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingColumn);
  }
  std::stringstream bad("a,label\n1,Normal\nzz,Normal\n");
  try {
    read_flow_csv(bad, schema);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnparsableCell);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(Dataset, DerivedColumnsAndCommentLines) {
  std::stringstream ss("# config_hash=abc\nfwd,bwd,dur_us,label\n3,1,2000000,Normal\n");
  FlowCsvSchema schema;
  schema.features = {{"pkts", {"fwd", "bwd"}}, {"ratio", {"fwd"}, 1.0, {"fwd", "bwd"}}, {"dur", {"dur_us"}, 1e-6}};
  const auto d = read_flow_csv(ss, schema);
  EXPECT_EQ(d.values, (std::vector<double>{4.0, 0.75, 2.0}));
}

TEST(Dataset, WriteReadRoundTrip) {
  Rng rng(2);
  std::vector<FeatureVector> rows;
  std::vector<Label> labels;
  for (int i = 0; i < 50; ++i) {
    rows.push_back(extract_features(flow_of(oracle::random_flow(rng))));
    labels.push_back(kAllLabels[rng.below(kNumLabels)]);
  }
  const auto d = make_dataset(rows, labels);
  std::stringstream ss;
  write_flow_csv(ss, d);
  const auto back = read_flow_csv(ss, default_flow_schema());
  EXPECT_EQ(back.values, d.values);
  EXPECT_EQ(back.labels, d.labels);
}

// CICFlowMeter exports spell headers with spaces or underscores; the shipped
// mapping loads either form.
TEST(Dataset, InsdnSchemaMapsCicFlowMeterColumns) {
  const auto schema = load_flow_schema(SDNGUARD_SOURCE_DIR "/configs/insdn_schema.json");
  std::stringstream ss(
      "Flow_ID,Flow_Duration,Tot_Fwd_Pkts,Tot_Bwd_Pkts,TotLen_Fwd_Pkts,TotLen_Bwd_Pkts,Flow_Byts/s,Flow_IAT_Mean,"
      "Pkt_Len_Min,Pkt_Len_Max,SYN_Flag_Cnt,ACK_Flag_Cnt,RST_Flag_Cnt,Label\n"
      "x,2000000,3,1,300,100,200,500000,60,200,1,0,0,DDoS\n"
      "y,1000,1,0,60,0,Infinity,0,60,60,0,1,0,BFA\n");
  const auto d = read_flow_csv(ss, schema);
  ASSERT_EQ(d.rows(), 2u);
  EXPECT_EQ(d.feature_names, FeatureVector::names());
  const std::vector<double> first(d.row(0).begin(), d.row(0).end());
  EXPECT_EQ(first, (std::vector<double>{2.0, 4, 100, 200, 0.5, 0, 60, 200, 0.75, 1, 0, 0}));
  EXPECT_EQ(d.row(1)[3], 200.0);  // "Infinity" imputed with the column mean
  EXPECT_EQ(d.labels, (std::vector<Label>{Label::DDoS, Label::BruteForce}));
}
