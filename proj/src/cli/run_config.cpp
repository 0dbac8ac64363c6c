#include <fstream>

#include "sdnguard/cli.hpp"
#include "sdnguard/error.hpp"
#include "sdnguard/ledger/crypto.hpp"

namespace sdnguard::cli {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json label_actions(const policy::PolicyTable& t) {
  json j = json::object();
  for (const auto& [label, action] : t.actions) j[std::string(label_name(label))] = policy::action_name(action);
  j["default"] = policy::action_name(t.default_action);
  return j;
}

policy::PolicyTable table_from(const json& j, policy::PolicyTable t) {
  for (const auto& [key, value] : j.items()) {
    auto action = policy::parse_action(value.get<std::string>());
    if (!action) throw Error(Errc::InvalidConfig, "unknown action " + value.dump());
    if (key == "default") {
      t.default_action = *action;
      continue;
    }
    auto label = parse_label(key);
    if (!label) throw Error(Errc::InvalidConfig, "unknown label " + key);
    t.actions[*label] = *action;
  }
  return t;
}

}  // namespace

json to_json(const RunConfig& c) {
  const auto& f = c.forest;
  const auto& b = c.boosted;
  const auto& p = c.policy;
  const auto& l = c.ledger;
  const auto& lat = c.latency;
  return {
      {"paths", {{"dataset", c.dataset}, {"schema", c.schema}, {"model", c.model}, {"scenario", c.scenario}, {"out", c.out}}},
      {"kind", c.kind},
      {"forest",
       {{"n_trees", f.n_trees}, {"max_depth", f.max_depth}, {"min_leaf", f.min_leaf},
        {"feature_fraction", f.feature_fraction}, {"bootstrap", f.bootstrap}, {"max_bins", f.max_bins}}},
      {"boosted",
       {{"stages", b.stages}, {"learning_rate", b.learning_rate}, {"max_depth", b.max_depth}, {"lambda", b.lambda},
        {"gamma", b.gamma}, {"min_child_weight", b.min_child_weight}, {"row_subsample", b.row_subsample},
        {"col_subsample", b.col_subsample}, {"max_bins", b.max_bins}}},
      {"ensemble_weights", c.ensemble_weights},
      {"fusion", ids::fusion_mode_name(c.fusion)},
      {"theta", c.theta},
      {"tau", c.tau},
      {"active_timeout", c.active_timeout},
      {"folds", c.folds},
      {"policy",
       {{"table", label_actions(p.table)},
        {"severity_weights",
         {{"alpha", p.severity_weights.alpha}, {"beta", p.severity_weights.beta},
          {"gamma", p.severity_weights.gamma}, {"delta", p.severity_weights.delta}}},
        {"thresholds", {{"high", p.thresholds.high}, {"medium", p.thresholds.medium}}},
        {"qos_weights",
         {{"app", p.qos_weights.app}, {"latency", p.qos_weights.latency}, {"risk", p.qos_weights.risk},
          {"bandwidth", p.qos_weights.bandwidth}}},
        {"risk_term", p.risk_term == policy::RiskTerm::Severity ? "severity" : "confidence"}}},
      {"ledger",
       {{"peers", l.endorsement.peers}, {"required", l.endorsement.required}, {"block_size", l.block_size},
        {"block_timeout", l.block_timeout}}},
      {"latency_model",
       {{"block_sizes", lat.block_sizes}, {"concurrency", lat.concurrency}, {"transactions", lat.transactions},
        {"arrival_rate_tps", lat.arrival_rate_tps}, {"peers", lat.peers}, {"network_ms", lat.network_ms},
        {"verify_ms", lat.verify_ms}, {"jitter", lat.jitter}, {"ordering_ms", lat.ordering_ms},
        {"validation_per_txn_ms", lat.validation_per_txn_ms}, {"block_timeout_s", lat.block_timeout_s}}},
      {"seed", c.seed},
  };
}

RunConfig overlay(RunConfig c, const json& j) {
  try {
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      take(p, "dataset", c.dataset);
      take(p, "schema", c.schema);
      take(p, "model", c.model);
      take(p, "scenario", c.scenario);
      take(p, "out", c.out);
    }
    take(j, "kind", c.kind);
    if (j.contains("forest")) {
      const auto& f = j.at("forest");
      take(f, "n_trees", c.forest.n_trees);
      take(f, "max_depth", c.forest.max_depth);
      take(f, "min_leaf", c.forest.min_leaf);
      take(f, "feature_fraction", c.forest.feature_fraction);
      take(f, "bootstrap", c.forest.bootstrap);
      take(f, "max_bins", c.forest.max_bins);
    }
    if (j.contains("boosted")) {
      const auto& b = j.at("boosted");
      take(b, "stages", c.boosted.stages);
      take(b, "learning_rate", c.boosted.learning_rate);
      take(b, "max_depth", c.boosted.max_depth);
      take(b, "lambda", c.boosted.lambda);
      take(b, "gamma", c.boosted.gamma);
      take(b, "min_child_weight", c.boosted.min_child_weight);
      take(b, "row_subsample", c.boosted.row_subsample);
      take(b, "col_subsample", c.boosted.col_subsample);
      take(b, "max_bins", c.boosted.max_bins);
    }
    take(j, "ensemble_weights", c.ensemble_weights);
    if (j.contains("fusion")) {
      auto m = ids::parse_fusion_mode(j.at("fusion").get<std::string>());
      if (!m) throw Error(Errc::InvalidConfig, "unknown fusion mode " + j.at("fusion").dump());
      c.fusion = *m;
    }
    take(j, "theta", c.theta);
    take(j, "tau", c.tau);
    take(j, "active_timeout", c.active_timeout);
    take(j, "folds", c.folds);
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      if (p.contains("table")) c.policy.table = table_from(p.at("table"), c.policy.table);
      if (p.contains("severity_weights")) {
        const auto& w = p.at("severity_weights");
        take(w, "alpha", c.policy.severity_weights.alpha);
        take(w, "beta", c.policy.severity_weights.beta);
        take(w, "gamma", c.policy.severity_weights.gamma);
        take(w, "delta", c.policy.severity_weights.delta);
      }
      if (p.contains("thresholds")) {
        take(p.at("thresholds"), "high", c.policy.thresholds.high);
        take(p.at("thresholds"), "medium", c.policy.thresholds.medium);
      }
      if (p.contains("qos_weights")) {
        const auto& w = p.at("qos_weights");
        take(w, "app", c.policy.qos_weights.app);
        take(w, "latency", c.policy.qos_weights.latency);
        take(w, "risk", c.policy.qos_weights.risk);
        take(w, "bandwidth", c.policy.qos_weights.bandwidth);
      }
      if (p.contains("risk_term")) {
        const auto r = p.at("risk_term").get<std::string>();
        if (r != "severity" && r != "confidence") throw Error(Errc::InvalidConfig, "risk_term must be severity or confidence");
        c.policy.risk_term = r == "severity" ? policy::RiskTerm::Severity : policy::RiskTerm::Confidence;
      }
    }
    if (j.contains("ledger")) {
      const auto& l = j.at("ledger");
      take(l, "peers", c.ledger.endorsement.peers);
      take(l, "required", c.ledger.endorsement.required);
      take(l, "block_size", c.ledger.block_size);
      take(l, "block_timeout", c.ledger.block_timeout);
    }
    if (j.contains("latency_model")) {
      const auto& l = j.at("latency_model");
      take(l, "block_sizes", c.latency.block_sizes);
      take(l, "concurrency", c.latency.concurrency);
      take(l, "transactions", c.latency.transactions);
      take(l, "arrival_rate_tps", c.latency.arrival_rate_tps);
      take(l, "peers", c.latency.peers);
      take(l, "network_ms", c.latency.network_ms);
      take(l, "verify_ms", c.latency.verify_ms);
      take(l, "jitter", c.latency.jitter);
      take(l, "ordering_ms", c.latency.ordering_ms);
      take(l, "validation_per_txn_ms", c.latency.validation_per_txn_ms);
      take(l, "block_timeout_s", c.latency.block_timeout_s);
    }
    take(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open config " + path);
  try {
    return overlay(std::move(base), json::parse(in));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path + ": " + e.what());
  }
}

std::string hash_document(const json& doc) {
  json copy = doc;
  if (copy.contains("paths")) copy["paths"].erase("out");
  if (copy.contains("run") && copy["run"].contains("paths")) copy["run"]["paths"].erase("out");
  return ledger::to_hex(ledger::sha256(copy.dump())).substr(0, 16);
}

std::string config_hash(const RunConfig& c) { return hash_document(to_json(c)); }

}  // namespace sdnguard::cli
