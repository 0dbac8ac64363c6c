#include "sdnguard/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sdnguard/error.hpp"
#include "sdnguard/ids/cross_validation.hpp"
#include "sdnguard/ids/external.hpp"
#include "sdnguard/ids/model_io.hpp"
#include "sdnguard/ids/pipeline.hpp"
#include "sdnguard/ledger/chain_file.hpp"
#include "sdnguard/metrics.hpp"
#include "sdnguard/netsim/closed_loop.hpp"
#include "sdnguard/netsim/traffic.hpp"
#include "sdnguard/report.hpp"

namespace sdnguard::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::shared_ptr<const ids::Classifier> train_model(const LabeledDataset& d, const RunConfig& c) {
  auto forest = [&] {
    ids::ForestParams p = c.forest;
    p.seed = c.seed;
    return std::make_shared<ids::ForestModel>(ids::train_forest(d, p));
  };
  auto boosted = [&] {
    ids::BoostedParams p = c.boosted;
    p.seed = c.seed;
    p.variant = "xgb";
    return std::make_shared<ids::BoostedModel>(ids::train_boosted(d, p));
  };
  auto cat = [&] {
    ids::BoostedParams p = c.boosted;
    p.seed = c.seed + 1;
    p.row_subsample = std::min(p.row_subsample, 0.8);
    p.col_subsample = std::min(p.col_subsample, 0.8);
    p.variant = "cat";
    return std::make_shared<ids::BoostedModel>(ids::train_boosted(d, p));
  };
  if (c.kind == "forest") return forest();
  if (c.kind == "boosted") return boosted();
  if (c.kind == "cat") return cat();
  if (c.kind == "ensemble") {
    if (c.ensemble_weights.size() != 3) {
      throw Error(Errc::InvalidConfig, "ensemble_weights needs 3 entries (forest, boosted, cat)");
    }
    std::vector<ids::EnsembleMember> members{{forest(), c.ensemble_weights[0]},
                                             {boosted(), c.ensemble_weights[1]},
                                             {cat(), c.ensemble_weights[2]}};
    return std::make_shared<ids::Ensemble>(std::move(members), c.fusion, c.theta);
  }
  throw Error(Errc::InvalidConfig, "unknown model kind '" + c.kind + "'");
}

namespace {

struct Invocation {
  RunConfig run;
  std::string config_path;
};

LabeledDataset load_dataset(const RunConfig& c) {
  if (c.dataset.empty()) throw Error(Errc::InvalidConfig, "--data is required");
  const FlowCsvSchema schema = c.schema.empty() ? default_flow_schema() : load_flow_schema(c.schema);
  return load_flow_csv(c.dataset, schema);
}

LabeledDataset normalized_copy(const LabeledDataset& d, const NormalizationStats& s) {
  LabeledDataset out = d;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    normalize_into(d.row(i), s, {out.values.data() + i * d.cols(), d.cols()});
  }
  return out;
}

std::shared_ptr<const ids::Ensemble> as_ensemble(std::shared_ptr<const ids::Classifier> m, double theta) {
  if (auto e = std::dynamic_pointer_cast<const ids::Ensemble>(m)) return e;
  return std::make_shared<ids::Ensemble>(std::vector<ids::EnsembleMember>{{std::move(m), 1.0}},
                                         ids::FusionMode::Soft, theta);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "cannot write " + p.string());
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir + ": " + ec.message());
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void add_confusion(metrics::MetricsReport& r, const metrics::ConfusionMatrix& cm) {
  r.confusion = cm;
  if (cm.total() == 0) return;
  r.accuracy_pct = metrics::accuracy_pct(cm);
  if (cm.fp + cm.tn > 0) r.fpr_pct = metrics::confusion_metrics(cm).fpr * 100.0;
}

void add_latencies(metrics::MetricsReport& r, const netsim::EventLog& log) {
  auto lm = metrics::latency_metrics(log);
  r.alert_latency_ms = lm.alert_response;
  r.reconfig_ms = lm.reconfig;
  r.txn_ms = lm.txn;
  r.alert_latency_series = std::move(lm.alert_response_ms);
  r.reconfig_series = std::move(lm.reconfig_ms);
  r.txn_series = std::move(lm.txn_ms);
}

void add_retention(metrics::MetricsReport& r, const netsim::EventLog& baseline, const netsim::EventLog& attack,
                   const std::optional<metrics::Window>& window) {
  r.qos_window = window;
  for (App app : {App::VoIP, App::Video, App::DNS, App::Web, App::Bulk}) {
    if (metrics::delivered_bytes(baseline, app, window) <= 0.0) continue;
    r.qos_retention_pct[std::string(app_name(app))] = metrics::qos_retention(baseline, attack, app, window);
  }
}

void add_drift(metrics::MetricsReport& r, const std::vector<metrics::PredictionResult>& results) {
  if (results.size() < 40) return;
  std::vector<double> acc;
  const std::size_t n = results.size();
  for (std::size_t s = 0; s < 4; ++s) {
    std::size_t correct = 0;
    for (std::size_t i = s * n / 4; i < (s + 1) * n / 4; ++i) {
      correct += is_attack(results[i].truth) == is_attack(results[i].predicted) ? 1 : 0;
    }
    acc.push_back(static_cast<double>(correct) / static_cast<double>((s + 1) * n / 4 - s * n / 4));
  }
  r.segment_accuracy = acc;
  if (acc.front() > 0.0) r.drift_resilience_pct = metrics::drift_resilience(acc);
}

// ---- subcommands ---------------------------------------------------------

int cmd_train(const RunConfig& c, const std::string& model_out) {
  if (model_out.empty()) throw Error(Errc::InvalidConfig, "--model-out is required");
  const LabeledDataset raw = load_dataset(c);
  const NormalizationStats stats = fit_normalizer(raw.feature_names, raw.values, raw.rows());
  const LabeledDataset data = normalized_copy(raw, stats);
  auto model = train_model(data, c);
  const std::string hash = config_hash(c);
  ids::save_model(model_out, *model, stats, hash);

  metrics::ConfusionMatrix cm;
  for (std::size_t i = 0; i < data.rows(); ++i) cm.add(data.labels[i], model->predict(data.row(i)));
  std::cout << "trained " << model->kind() << " on " << data.rows() << " rows x " << data.cols()
            << " features; training accuracy " << fmt(metrics::accuracy_pct(cm)) << "%\n"
            << "model written to " << model_out << " (config " << hash << ")\n";
  return 0;
}

int cmd_evaluate(const RunConfig& c) {
  const LabeledDataset raw = load_dataset(c);
  const std::string hash = config_hash(c);
  metrics::MetricsReport report;
  report.config_hash = hash;
  report.source = "evaluate";
  metrics::ConfusionMatrix total;
  std::string folds_csv = "# config_hash=" + hash + "\nfold,train_rows,test_rows,accuracy_pct,fpr\n";

  if (!c.model.empty()) {
    const auto bundle = ids::load_model(c.model);
    LabeledDataset data = raw;
    if (bundle.normalizer) data = normalized_copy(raw, *bundle.normalizer);
    for (std::size_t i = 0; i < data.rows(); ++i) total.add(data.labels[i], bundle.model->predict(data.row(i)));
  } else {
    auto fit = [&](const LabeledDataset& train) -> std::shared_ptr<const ids::Classifier> {
      const auto stats = fit_normalizer(train.feature_names, train.values, train.rows());
      auto model = train_model(normalized_copy(train, stats), c);
      // Wrap so the held-out fold is normalized with training statistics.
      return std::make_shared<ids::ExternalModel>(
          "normalized-" + std::string(model->kind()), train.feature_names,
          [model, stats](std::span<const double> x) { return model->predict_proba(normalize(x, stats)); });
    };
    const auto folds = ids::cross_validate(raw, c.folds, fit, c.seed);
    for (const auto& f : folds) {
      total.tp += f.binary.tp;
      total.tn += f.binary.tn;
      total.fp += f.binary.fp;
      total.fn += f.binary.fn;
      folds_csv += std::to_string(f.fold) + "," + std::to_string(f.train_rows) + "," + std::to_string(f.test_rows) +
                   "," + fmt(f.accuracy_pct, 6) + "," + (f.fpr ? fmt(*f.fpr, 6) : std::string("")) + "\n";
    }
  }
  add_confusion(report, total);
  report.counters["rows"] = static_cast<double>(raw.rows());
  metrics::emit_report(report, c.out);
  write_text(fs::path(c.out) / "folds.csv", folds_csv);
  std::cout << "accuracy " << (report.accuracy_pct ? fmt(*report.accuracy_pct) + "%" : "n/a") << ", FPR "
            << (report.fpr_pct ? fmt(*report.fpr_pct) + "%" : "n/a") << " over " << raw.rows() << " rows\n";
  return 0;
}

struct SimulateOptions {
  std::optional<std::uint64_t> seed;
  std::string enforce;
  std::string detector = "perfect";
  std::string export_flows;
};

int cmd_simulate(const RunConfig& c, const SimulateOptions& o) {
  netsim::ScenarioConfig sc = c.scenario.empty() ? netsim::voip_ddos_scenario() : netsim::load_scenario(c.scenario);
  if (o.seed) sc.seed = *o.seed;
  if (!o.enforce.empty()) sc.enforcement = o.enforce == "on";
  sc.flow_table = {c.tau, c.active_timeout};
  netsim::validate(sc);

  netsim::Detector detector;
  if (!c.model.empty()) {
    auto bundle = ids::load_model(c.model);
    if (!bundle.normalizer) throw Error(Errc::SchemaMismatch, "model file carries no normalizer");
    detector = netsim::ensemble_detector(as_ensemble(bundle.model, c.theta), *bundle.normalizer);
  } else if (o.detector == "never") {
    detector = netsim::never_alert_detector();
  } else {
    detector = netsim::perfect_detector();
  }

  netsim::LoopConfig loop;
  loop.policy = c.policy;
  loop.ledger = c.ledger;
  loop.ledger.theta = c.theta;
  loop.identity_seed = c.seed;

  json doc{{"run", to_json(c)}, {"scenario", netsim::scenario_to_json(sc)}, {"detector", detector.name}};
  const std::string hash = hash_document(doc);
  doc["config_hash"] = hash;

  const auto result = netsim::run_closed_loop(sc, detector, loop);
  netsim::ScenarioConfig quiet = sc;
  quiet.attack.intensity_mbps = 0.0;
  const auto baseline = netsim::run_closed_loop(quiet, detector, loop);

  ensure_dir(c.out);
  const fs::path out(c.out);
  write_text(out / "config.json", doc.dump(2) + "\n");
  {
    std::ofstream f(out / "eventlog.jsonl", std::ios::binary | std::ios::trunc);
    result.log.write_jsonl(f, hash);
    std::ofstream g(out / "baseline_eventlog.jsonl", std::ios::binary | std::ios::trunc);
    baseline.log.write_jsonl(g, hash);
    if (!f || !g) throw Error(Errc::IoFailure, "cannot write event logs under " + c.out);
  }
  ledger::write_chain_file((out / "ledger.chain").string(), result.chain);
  ledger::write_key_registry((out / "ledger.chain.keys.json").string(), result.registry, hash);
  {
    std::ofstream f(out / "ledger.export.jsonl", std::ios::binary | std::ios::trunc);
    f << json{{"type", "RunHeader"}, {"config_hash", hash}}.dump() << '\n';
    ledger::export_chain_jsonl(f, result.chain);
  }
  if (!o.export_flows.empty()) {
    std::ofstream f(o.export_flows, std::ios::binary | std::ios::trunc);
    f << "# config_hash=" << hash << '\n';
    write_flow_csv(f, result.flows);
    if (!f) throw Error(Errc::IoFailure, "cannot write " + o.export_flows);
  }

  metrics::MetricsReport report;
  report.config_hash = hash;
  report.source = "simulate";
  metrics::ConfusionMatrix cm;
  std::vector<metrics::PredictionResult> results;
  for (const auto& d : result.detections) {
    cm.add(d.truth, d.predicted);
    results.push_back({d.ts, d.truth, d.predicted});
  }
  add_confusion(report, cm);
  add_latencies(report, result.log);
  const double attack_end = sc.attack.stop < 0.0 ? sc.duration : std::min(sc.attack.stop, sc.duration);
  add_retention(report, baseline.log, result.log, metrics::Window{sc.attack.start, attack_end});
  add_drift(report, results);
  report.txn_latency_table = ledger::measure_txn_latency(c.latency);
  report.counters = {
      {"offered_packets", static_cast<double>(result.offered_packets)},
      {"offered_bytes", static_cast<double>(result.offered_bytes)},
      {"alerts", static_cast<double>(result.log.count<netsim::AlertRaised>())},
      {"rules_installed", static_cast<double>(result.log.count<netsim::RuleInstalled>())},
      {"txns_committed", static_cast<double>(result.log.count<netsim::TxnCommitted>())},
      {"blocks", static_cast<double>(result.chain.size())},
      {"flows_scored", static_cast<double>(result.detections.size())},
  };
  metrics::emit_report(report, (out / "report").string());

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "simulated " << sc.duration << " s (" << result.offered_packets << " packets, enforcement "
            << (sc.enforcement ? "on" : "off") << "): " << report.counters["alerts"] << " alerts, "
            << report.counters["rules_installed"] << " rules, " << report.counters["txns_committed"]
            << " ledger txns\n";
  for (const auto& [app, pct] : report.qos_retention_pct) std::cout << "  " << app << " retention " << fmt(pct) << "%\n";
  std::cout << "artifacts in " << c.out << " (config " << hash << ")\n";
  return 0;
}

int cmd_bench(const RunConfig& c, std::size_t flows, std::size_t train_flows) {
  const auto train_states = netsim::synthetic_flows(train_flows, c.seed);
  std::vector<FeatureVector> fv;
  std::vector<Label> labels;
  for (const auto& f : train_states) {
    fv.push_back(extract_features(f));
    labels.push_back(f.label.value_or(Label::Normal));
  }
  const LabeledDataset raw = make_dataset(fv, labels);
  const NormalizationStats stats = fit_normalizer(raw.feature_names, raw.values, raw.rows());
  ids::ForestParams fp = c.forest;
  fp.seed = c.seed;
  auto forest = std::make_shared<ids::ForestModel>(ids::train_forest(normalized_copy(raw, stats), fp));
  const ids::Ensemble ensemble({{forest, 1.0}}, c.fusion, c.theta);

  const auto test_states = netsim::synthetic_flows(flows, c.seed + 1);
  const auto run = ids::score_flows(ensemble, stats, test_states);

  std::vector<metrics::PredictionResult> results;
  metrics::ConfusionMatrix cm;
  for (std::size_t i = 0; i < test_states.size(); ++i) {
    const Label truth = test_states[i].label.value_or(Label::Normal);
    results.push_back({test_states[i].first_ts, truth, run.decisions[i].label});
    cm.add(truth, run.decisions[i].label);
  }
  metrics::MetricsReport report;
  report.config_hash = config_hash(c);
  report.source = "bench";
  add_confusion(report, cm);
  const auto td = metrics::throughput_and_drift(results, run.seconds, 4);
  report.throughput_flows_per_sec = td.flows_per_sec;
  report.drift_resilience_pct = td.drift_resilience_pct;
  report.segment_accuracy = td.segment_accuracy;
  report.txn_latency_table = ledger::measure_txn_latency(c.latency);
  report.counters = {{"flows", static_cast<double>(flows)},
                     {"trees", static_cast<double>(fp.n_trees)},
                     {"max_depth", static_cast<double>(fp.max_depth)},
                     {"wallclock_s", run.seconds}};
  metrics::emit_report(report, c.out);

  std::cout << "scored " << flows << " flows in " << fmt(run.seconds) << " s: " << fmt(td.flows_per_sec, 0)
            << " flows/sec (" << fp.n_trees << " trees, depth " << fp.max_depth << ")\n";
  for (const auto& row : report.txn_latency_table) {
    std::cout << "  ledger block " << row.block_size << ", concurrency " << row.concurrency << ": mean "
              << fmt(row.mean_ms, 1) << " ms\n";
  }
  return 0;
}

std::string default_keys(const std::string& chain, const std::string& keys) {
  return keys.empty() ? chain + ".keys.json" : keys;
}

int cmd_ledger_verify(const std::string& chain, const std::string& keys) {
  const auto bytes = ledger::read_file_bytes(chain);
  const auto registry = ledger::read_key_registry(default_keys(chain, keys));
  ledger::SignatureCache cache;
  const auto result = ledger::verify_chain_bytes(bytes, registry, &cache);
  if (result.ok) {
    std::cout << "Ok\n";
    return 0;
  }
  std::cerr << result.describe() << '\n';
  return 1;
}

int cmd_ledger_query(const std::string& chain, const std::string& keys, const std::string& flow_id) {
  const auto parsed = ledger::parse_chain(ledger::read_file_bytes(chain));
  if (parsed.fault_at) {
    throw Error(Errc::InvalidInput, "ledger unreadable at block " + std::to_string(*parsed.fault_at) + ": " + parsed.fault);
  }
  ledger::Ledger l(ledger::LedgerConfig{}, ledger::read_key_registry(default_keys(chain, keys)), parsed.blocks);
  for (const auto& r : l.query(flow_id)) {
    json j{{"flow_id", flow_id},
           {"label", label_name(r.label)},
           {"confidence", r.confidence},
           {"timestamp", r.timestamp},
           {"action", r.action ? json(policy::action_name(*r.action)) : json(nullptr)},
           {"qos_score", r.qos_score ? json(*r.qos_score) : json(nullptr)},
           {"block", r.block}};
    std::cout << j.dump() << '\n';
  }
  return 0;
}

int cmd_report(const RunConfig& c, const std::string& eventlog, const std::string& baseline,
               const std::vector<double>& window) {
  auto read_log = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
    return netsim::read_event_log_jsonl(in);
  };
  const auto log = read_log(eventlog);
  metrics::MetricsReport report;
  report.config_hash = config_hash(c);
  report.source = "report";
  add_latencies(report, log);
  if (!baseline.empty()) {
    std::optional<metrics::Window> w;
    if (window.size() == 2) w = metrics::Window{window[0], window[1]};
    add_retention(report, read_log(baseline), log, w);
  }
  report.counters = {{"events", static_cast<double>(log.size())},
                     {"alerts", static_cast<double>(log.count<netsim::AlertRaised>())},
                     {"rules_installed", static_cast<double>(log.count<netsim::RuleInstalled>())}};
  metrics::emit_report(report, c.out);
  std::cout << "alert response mean " << fmt(report.alert_latency_ms.mean) << " ms over "
            << report.alert_latency_ms.count << " rules; report in " << c.out << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  RunConfig c;
  std::string config_path;
  CLI::App app{"sdnguard: flow-based intrusion detection with policy enforcement and a tamper-evident alert ledger"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "sdnguard 1.0.0");
  app.add_option("--config", config_path, "JSON RunConfig; its values override flags");

  auto add_model_flags = [&](CLI::App* s) {
    s->add_option("--kind", c.kind, "forest | boosted | cat | ensemble")->capture_default_str();
    s->add_option("--seed", c.seed, "seed for training and simulation")->capture_default_str();
    s->add_option("--trees", c.forest.n_trees, "forest size")->capture_default_str();
    s->add_option("--depth", c.forest.max_depth, "forest depth cap")->capture_default_str();
    s->add_option("--stages", c.boosted.stages, "boosting stages")->capture_default_str();
    s->add_option("--learning-rate", c.boosted.learning_rate, "boosting step size")->capture_default_str();
    s->add_option("--weights", c.ensemble_weights, "ensemble weights (forest boosted cat)")->capture_default_str();
    s->add_option("--theta", c.theta, "alert and logging threshold")->capture_default_str();
  };

  std::string model_out;
  auto* train = app.add_subcommand("train", "train a model on a flow CSV");
  train->add_option("--data", c.dataset, "flow CSV")->required();
  train->add_option("--schema", c.schema, "JSON column mapping for foreign CSVs");
  train->add_option("--model-out", model_out, "output model file")->required();
  add_model_flags(train);

  auto* evaluate = app.add_subcommand("evaluate", "score a model or run stratified k-fold CV");
  evaluate->add_option("--data", c.dataset, "flow CSV")->required();
  evaluate->add_option("--schema", c.schema, "JSON column mapping for foreign CSVs");
  evaluate->add_option("--model", c.model, "model file; omitted -> cross-validate --kind");
  evaluate->add_option("--folds", c.folds, "CV folds")->capture_default_str();
  evaluate->add_option("--out", c.out, "output directory")->capture_default_str();
  add_model_flags(evaluate);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "run the closed detection/enforcement/ledger loop");
  simulate->add_option("--scenario", c.scenario, "scenario JSON (default: VoIP + DDoS on a 5 Mbps link)");
  simulate->add_option("--seed", sim.seed, "overrides the scenario seed");
  simulate->add_option("--enforce", sim.enforce, "on | off (default: scenario)")->check(CLI::IsMember({"on", "off"}));
  simulate->add_option("--model", c.model, "model file; omitted -> --detector stub");
  simulate->add_option("--detector", sim.detector, "perfect | never (stub detectors)")
      ->check(CLI::IsMember({"perfect", "never"}))
      ->capture_default_str();
  simulate->add_option("--theta", c.theta, "alert and logging threshold")->capture_default_str();
  simulate->add_option("--tau", c.tau, "flow idle timeout, seconds")->capture_default_str();
  simulate->add_option("--active-timeout", c.active_timeout, "flow active timeout, seconds (0 = off)")
      ->capture_default_str();
  simulate->add_option("--block-size", c.ledger.block_size, "ledger block size")->capture_default_str();
  simulate->add_option("--export-flows", sim.export_flows, "write scored flows as a training CSV");
  simulate->add_option("--out", c.out, "output directory")->capture_default_str();

  std::size_t bench_flows = 100'000;
  std::size_t bench_train = 5'000;
  auto* bench = app.add_subcommand("bench", "detection throughput and ledger latency table");
  bench->add_option("--flows", bench_flows, "flows to score")->capture_default_str();
  bench->add_option("--train-flows", bench_train, "flows to train the forest on")->capture_default_str();
  bench->add_option("--trees", c.forest.n_trees, "forest size")->capture_default_str();
  bench->add_option("--depth", c.forest.max_depth, "forest depth cap")->capture_default_str();
  bench->add_option("--seed", c.seed, "seed")->capture_default_str();
  bench->add_option("--out", c.out, "output directory")->capture_default_str();

  std::string chain_path, keys_path, flow_id;
  auto* ledger_cmd = app.add_subcommand("ledger", "audit a ledger file");
  ledger_cmd->require_subcommand(1);
  auto* verify = ledger_cmd->add_subcommand("verify", "recompute digests, signatures, hashes and links");
  verify->add_option("--ledger", chain_path, "ledger.chain file")->required();
  verify->add_option("--keys", keys_path, "key registry (default: <ledger>.keys.json)");
  auto* query = ledger_cmd->add_subcommand("query", "list committed alerts of one flow");
  query->add_option("--ledger", chain_path, "ledger.chain file")->required();
  query->add_option("--keys", keys_path, "key registry (default: <ledger>.keys.json)");
  query->add_option("--flow-id", flow_id, "flow id, e.g. 10.0.0.1:5000->10.0.0.2:80/TCP")->required();

  std::string eventlog, baseline;
  std::vector<double> window;
  auto* report = app.add_subcommand("report", "metrics from event logs");
  report->add_option("--eventlog", eventlog, "eventlog.jsonl")->required();
  report->add_option("--baseline", baseline, "baseline eventlog.jsonl for QoS retention");
  report->add_option("--window", window, "retention window start end (seconds)")->expected(2);
  report->add_option("--out", c.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) c = load_run_config(config_path, c);
    if (*train) return cmd_train(c, model_out);
    if (*evaluate) return cmd_evaluate(c);
    if (*simulate) return cmd_simulate(c, sim);
    if (*bench) return cmd_bench(c, bench_flows, bench_train);
    if (*verify) return cmd_ledger_verify(chain_path, keys_path);
    if (*query) return cmd_ledger_query(chain_path, keys_path, flow_id);
    if (*report) return cmd_report(c, eventlog, baseline, window);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sdnguard::cli
