#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "sdnguard/error.hpp"
#include "sdnguard/ledger/chain_file.hpp"
#include "sdnguard/ledger/crypto.hpp"
#include "sdnguard/ledger/latency.hpp"
#include "sdnguard/ledger/ledger.hpp"
#include "sdnguard/ledger/transaction.hpp"
#include "sdnguard/rng.hpp"
#include "support/ledger_fixture.hpp"
#include "support/oracles.hpp"
#include "support/sha256_reference.hpp"

using namespace sdnguard;
using namespace sdnguard::ledger;

namespace {

std::vector<std::uint8_t> lp(const std::string& s) {
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(s.size() >> 24), static_cast<std::uint8_t>(s.size() >> 16),
                                static_cast<std::uint8_t>(s.size() >> 8), static_cast<std::uint8_t>(s.size())};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<std::uint8_t> cat(std::initializer_list<std::vector<std::uint8_t>> parts) {
  std::vector<std::uint8_t> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

LedgerConfig config(std::size_t block_size = 10, double timeout = 2.0) {
  LedgerConfig cfg;
  cfg.block_size = block_size;
  cfg.block_timeout = timeout;
  return cfg;
}

void trust(Ledger& l) { l.register_identity(fixture::ids_identity().id(), fixture::ids_identity().public_key()); }

AlertTransaction seal(const std::string& flow, double conf, double ts, Label label = Label::DDoS) {
  return seal_transaction({flow, label, conf, ts}, policy::NetworkAction::Drop, 0.42, fixture::ids_identity(), ts);
}

}  // namespace

TEST(Crypto, Sha256MatchesReference) {
  EXPECT_EQ(to_hex(sha256(std::string_view("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  Rng rng(1);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::uint8_t> msg(rng.below(300));
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng.below(256));
    EXPECT_EQ(sha256(msg), reference::sha256(msg));
  }
}

TEST(Crypto, HexRoundTrip) {
  Digest d = sha256(std::string_view("x"));
  Digest back{};
  ASSERT_TRUE(from_hex(to_hex(d), back));
  EXPECT_EQ(back, d);
  EXPECT_FALSE(from_hex("zz", std::span<std::uint8_t>(back.data(), 1)));
  EXPECT_FALSE(from_hex("abc", std::span<std::uint8_t>(back.data(), 2)));
}

TEST(Crypto, SignVerify) {
  const auto id = SigningIdentity::derive("ids-0", 1);
  const auto again = SigningIdentity::derive("ids-0", 1);
  const auto other = SigningIdentity::derive("ids-0", 2);
  EXPECT_EQ(id.public_key(), again.public_key());
  EXPECT_NE(id.public_key(), other.public_key());
  const Digest d = sha256(std::string_view("alert"));
  auto sig = id.sign(d);
  EXPECT_TRUE(verify_signature(id.public_key(), d, sig));
  EXPECT_FALSE(verify_signature(other.public_key(), d, sig));
  sig[5] ^= 1;
  EXPECT_FALSE(verify_signature(id.public_key(), d, sig));
}

TEST(Transaction, DigestMatchesReferenceOverDocumentedLayout) {
  const ids::Alert a{"A", Label::DDoS, 0.9, 100.0};
  const auto txn = seal_transaction(a, std::nullopt, std::nullopt, fixture::ids_identity(), 100.0);
  const auto payload = cat({lp("A"), lp("DDoS"), lp("0.900000"), lp("100.000000"), lp(""), lp("")});
  EXPECT_EQ(txn.payload, payload);
  EXPECT_EQ(txn.timestamp_text, "100.000000");
  const auto ref = reference::sha256(cat({payload, lp("100.000000")}));
  EXPECT_EQ(txn.digest, ref);
  EXPECT_TRUE(verify_signature(fixture::ids_identity().public_key(), txn.digest, txn.signature));
  EXPECT_EQ(txn.submitter, "ids-0");
}

TEST(Transaction, DeterministicAndSensitive) {
  const ids::Alert a{"A", Label::DDoS, 0.9, 100.0};
  const auto t1 = seal_transaction(a, policy::NetworkAction::Drop, 0.3, fixture::ids_identity(), 101.0);
  const auto t2 = seal_transaction(a, policy::NetworkAction::Drop, 0.3, fixture::ids_identity(), 101.0);
  EXPECT_EQ(t1.digest, t2.digest);
  for (std::size_t i = 0; i < t1.payload.size(); ++i) {
    auto p = t1.payload;
    p[i] ^= 0x01;
    EXPECT_NE(transaction_digest(p, t1.timestamp_text), t1.digest);
  }
}

TEST(Transaction, PayloadRoundTripAndRejects) {
  AlertRecord r{"10.0.0.1:1->10.0.0.2:2/UDP", Label::Web, 0.123456, 42.5, policy::NetworkAction::RedirectHoneypot,
                0.75};
  const auto p = canonical_payload(r);
  EXPECT_EQ(decode_payload(p), r);
  EXPECT_FALSE(decode_payload(std::vector<std::uint8_t>(p.begin(), p.end() - 1)));
  auto bad = p;
  bad.push_back(0);
  EXPECT_FALSE(decode_payload(bad));
  r.flow_id.clear();
  EXPECT_THROW(canonical_payload(r), Error);
  r.flow_id = "x";
  r.confidence = std::nan("");
  try {
    canonical_payload(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SerializationFailure);
  }
}

TEST(Submit, GateAndEndorsement) {
  Ledger l(config());
  trust(l);
  EXPECT_TRUE(std::holds_alternative<Accepted>(l.submit(seal("f", 0.9, 1.0), 0.9, 1.0)));
  EXPECT_TRUE(std::holds_alternative<BelowThreshold>(l.submit(seal("f", 0.4, 1.0), 0.4, 1.0)));
  EXPECT_EQ(l.pending_size(), 1u);

  auto bad = seal("f", 0.9, 2.0);
  bad.signature[0] ^= 0x80;
  const auto out = l.submit(bad, 0.9, 2.0);
  ASSERT_TRUE(std::holds_alternative<Rejected>(out));
  const auto& reasons = std::get<Rejected>(out).reasons;
  ASSERT_EQ(reasons.size(), 2u);
  EXPECT_NE(reasons[0].find("bad signature"), std::string::npos);
  EXPECT_EQ(l.pending_size(), 1u);

  auto stranger = seal_transaction({"f", Label::DDoS, 0.9, 3.0}, std::nullopt, std::nullopt,
                                   SigningIdentity::derive("intruder", 1), 3.0);
  EXPECT_NE(endorsement_check(stranger, l.registry()).find("unknown submitter"), std::string::npos);
  auto garbled = seal("f", 0.9, 3.0);
  garbled.payload.resize(3);
  garbled.digest = transaction_digest(garbled.payload, garbled.timestamp_text);
  EXPECT_NE(endorsement_check(garbled, l.registry()).find("malformed"), std::string::npos);
}

TEST(Commit, SizeAndTimeoutPaths) {
  Ledger l(config(2, 2.0));
  trust(l);
  l.submit(seal("a", 0.9, 1.0), 0.9, 1.0);
  EXPECT_FALSE(l.commit_block(1.0));
  l.submit(seal("b", 0.9, 1.1), 0.9, 1.1);
  const auto b = l.commit_block(1.1);
  ASSERT_TRUE(b);
  ASSERT_EQ(b->txns.size(), 2u);
  EXPECT_EQ(decode_payload(b->txns[0].payload)->flow_id, "a");
  EXPECT_EQ(decode_payload(b->txns[1].payload)->flow_id, "b");

  Ledger t(config(10, 2.0));
  trust(t);
  for (int i = 0; i < 3; ++i) t.submit(seal("x", 0.9, 5.0), 0.9, 5.0);
  EXPECT_FALSE(t.commit_block(6.9));
  const auto late = t.commit_block(7.0);
  ASSERT_TRUE(late);
  EXPECT_EQ(late->txns.size(), 3u);
  EXPECT_FALSE(t.commit_block(100.0));
}

TEST(Commit, LinkageAcrossBlocks) {
  Ledger l(config(1));
  trust(l);
  for (int i = 0; i < 5; ++i) {
    l.submit(seal("f" + std::to_string(i), 0.9, i), 0.9, i);
    ASSERT_TRUE(l.commit_block(i));
  }
  const auto chain = l.blocks();
  ASSERT_EQ(chain.size(), 6u);
  EXPECT_EQ(chain[0], genesis_block());
  for (std::size_t i = 1; i < chain.size(); ++i) {
    EXPECT_EQ(chain[i].prev_hash, chain[i - 1].block_hash);
    EXPECT_EQ(chain[i].index, i);
    EXPECT_EQ(compute_block_hash(chain[i]), chain[i].block_hash);
  }
}

TEST(Verify, CleanChainIsOk) {
  const auto chain = fixture::build_chain(100, 3);
  const auto r = verify_chain(chain, fixture::registry());
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.describe(), "Ok");
}

TEST(Verify, PayloadBitFlipPinpointsTxn) {
  auto chain = fixture::build_chain(10, 4);
  chain[7].txns[2].payload[5] ^= 0x04;
  const auto r = verify_chain(chain, fixture::registry());
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.block, 7u);
  EXPECT_EQ(r.txn, 2u);
  EXPECT_EQ(r.describe().rfind("TamperedAt(block 7, txn 2)", 0), 0u);
}

TEST(Verify, SelfConsistentForgeryBreaksSuccessorLink) {
  auto chain = fixture::build_chain(10, 4);
  Block forged = chain[3];
  forged.txns.pop_back();
  const auto a = fixture::alert(999);
  forged.txns.push_back(seal_transaction(a, std::nullopt, std::nullopt, fixture::ids_identity(), a.timestamp));
  forged.block_hash = compute_block_hash(forged);
  chain[3] = forged;
  // The forged block itself checks out.
  EXPECT_TRUE(verify_chain(std::span(chain).first(4), fixture::registry()).ok);
  const auto r = verify_chain(chain, fixture::registry());
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.block, 4u);
  EXPECT_FALSE(r.txn.has_value());
}

TEST(Verify, UnknownSubmitterAndEmptyChain) {
  const auto chain = fixture::build_chain(2, 2);
  EXPECT_FALSE(verify_chain(chain, KeyRegistry{}).ok);
  EXPECT_FALSE(verify_chain({}, fixture::registry()).ok);
}

TEST(Query, ReturnsCommittedAlertsInOrder) {
  Ledger l(config(1));
  trust(l);
  l.submit(seal("X", 0.8, 1.0, Label::DDoS), 0.8, 1.0);
  l.commit_block(1.0);
  l.submit(seal("X", 0.95, 2.0, Label::DoS), 0.95, 2.0);
  l.commit_block(2.0);
  l.submit(seal("X", 0.99, 3.0), 0.99, 3.0);  // pending
  const auto q = l.query("X");
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].label, Label::DDoS);
  EXPECT_EQ(q[0].confidence, 0.8);
  EXPECT_EQ(q[0].timestamp, 1.0);
  EXPECT_EQ(q[0].action, policy::NetworkAction::Drop);
  EXPECT_EQ(q[0].qos_score, 0.42);
  EXPECT_EQ(q[0].block, 1u);
  EXPECT_EQ(q[1].label, Label::DoS);
  EXPECT_EQ(q[1].block, 2u);
  EXPECT_TRUE(l.query("nope").empty());
}

TEST(LedgerProperty, GateSoundnessAndQueryConsistency) {
  Ledger l(config(7, 0.5));
  trust(l);
  Rng rng(17);
  std::multimap<std::string, double> accepted;
  double now = 0.0;
  for (int i = 0; i < 2000; ++i) {
    now += 0.01;
    const double conf = std::round(rng.uniform() * 1e6) / 1e6;
    const std::string flow = "f" + std::to_string(rng.below(50));
    if (std::holds_alternative<Accepted>(l.submit(seal(flow, conf, now), conf, now))) accepted.emplace(flow, conf);
    l.commit_block(now);
  }
  l.flush(now + 10.0);
  std::multimap<std::string, double> committed;
  for (const auto& b : l.blocks()) {
    for (const auto& t : b.txns) {
      const auto r = decode_payload(t.payload);
      ASSERT_TRUE(r);
      EXPECT_GE(r->confidence, 0.5);
      committed.emplace(r->flow_id, r->confidence);
    }
  }
  EXPECT_EQ(committed, accepted);
  std::size_t via_query = 0;
  for (int f = 0; f < 50; ++f) via_query += l.query("f" + std::to_string(f)).size();
  EXPECT_EQ(via_query, accepted.size());
}

TEST(LedgerProperty, AppendOnly) {
  Ledger l(config(3));
  trust(l);
  std::vector<Bytes> snapshot;
  for (int i = 0; i < 60; ++i) {
    l.submit(seal("f", 0.9, i), 0.9, i);
    if (l.commit_block(i)) {
      const auto chain = l.blocks();
      for (std::size_t k = 0; k < snapshot.size(); ++k) EXPECT_EQ(serialize_block(chain[k]), snapshot[k]);
      snapshot.clear();
      for (const auto& b : chain) snapshot.push_back(serialize_block(b));
    }
  }
  EXPECT_EQ(snapshot.size(), 21u);
}

TEST(Ledger, RebuildFromStoredBlocks) {
  const auto chain = fixture::build_chain(5, 2);
  Ledger again(LedgerConfig{}, fixture::registry(), chain);
  EXPECT_EQ(again.block_count(), chain.size());
  EXPECT_EQ(again.query(fixture::alert(3).flow_id).size(), 1u);
  auto bad = chain;
  bad.erase(bad.begin());
  EXPECT_THROW(Ledger(LedgerConfig{}, fixture::registry(), bad), Error);
}

TEST(ChainFile, RoundTripAndRegistry) {
  const auto dir = oracle::temp_dir("chain");
  const auto chain = fixture::build_chain(6, 3);
  write_chain_file((dir / "l.chain").string(), chain);
  const auto parsed = parse_chain(read_file_bytes((dir / "l.chain").string()));
  EXPECT_FALSE(parsed.fault_at);
  EXPECT_EQ(parsed.blocks, chain);
  write_key_registry((dir / "k.json").string(), fixture::registry(), "abcd");
  EXPECT_EQ(read_key_registry((dir / "k.json").string()), fixture::registry());

  std::ostringstream out;
  export_chain_jsonl(out, chain);
  const auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  std::filesystem::remove_all(dir);
}

// Single-bit corruptions anywhere in the file are caught, and the reported
// block is no later than the one after the corrupted block.
TEST(ChainFileProperty, BitFlipsAreDetected) {
  const auto chain = fixture::build_chain(20, 5);
  const auto bytes = serialize_chain(chain);
  std::vector<std::size_t> ends;
  std::size_t off = 8;
  for (const auto& b : chain) ends.push_back(off += serialize_block(b).size());
  SignatureCache cache;
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    auto copy = bytes;
    const std::size_t pos = rng.below(copy.size());
    copy[pos] ^= static_cast<std::uint8_t>(1u << rng.below(8));
    const std::size_t block = pos < 8 ? 0 : static_cast<std::size_t>(std::upper_bound(ends.begin(), ends.end(), pos) - ends.begin());
    const auto r = verify_chain_bytes(copy, fixture::registry(), &cache);
    EXPECT_FALSE(r.ok) << "byte " << pos;
    EXPECT_LE(r.block, block + 1) << "byte " << pos;
  }
}

TEST(Latency, ZeroDelayBlockOfOne) {
  LatencyModelConfig cfg;
  cfg.block_sizes = {1};
  cfg.network_ms = cfg.verify_ms = cfg.ordering_ms = cfg.validation_per_txn_ms = 0.0;
  cfg.transactions = 100;
  const auto rows = measure_txn_latency(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_ms, 0.0);
  EXPECT_EQ(rows[0].max_ms, 0.0);
}

TEST(Latency, MonotoneInBlockSizeAndDeterministic) {
  LatencyModelConfig cfg;
  const auto rows = measure_txn_latency(cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].mean_ms, rows[i - 1].mean_ms);
  const auto again = measure_txn_latency(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].mean_ms, again[i].mean_ms);
    EXPECT_EQ(rows[i].p95_ms, again[i].p95_ms);
    EXPECT_LE(rows[i].min_ms, rows[i].mean_ms);
    EXPECT_LE(rows[i].p95_ms, rows[i].max_ms);
  }
  cfg.block_sizes.clear();
  EXPECT_THROW(measure_txn_latency(cfg), Error);
}
